"""Long run: prove that 279 is optimal for the order-31 cyclic group.

Usage: python scripts/order31_optimality.py [--budget 1h] [--bound refined]
"""

import argparse
import json

from qcf.groups import cyclic_subgroup_classes
from qcf.km import build_model
from qcf.solver import SolveConfig, parse_duration, solve


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--budget", default="1h")
    ap.add_argument("--bound", choices=["counting", "refined"], default="refined")
    args = ap.parse_args()
    model = build_model(7, 3, 4, cyclic_subgroup_classes(7, 31)[0])
    res = solve(model, SolveConfig(budget=parse_duration(args.budget), bound_mode=args.bound))
    out = res.to_json()
    out["bound_mode"] = args.bound
    out["variables"] = model.num_vars
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
