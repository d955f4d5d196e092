"""Run the reproduction battery and write its JSON report.

Usage: python scripts/run_battery.py [--fast] [--long] [-o report.json]
"""

import argparse
import sys
from pathlib import Path

from qcf.verify import run_battery


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--fast", action="store_true")
    ap.add_argument("--long", action="store_true")
    ap.add_argument("-o", "--output", default="battery_report.json")
    args = ap.parse_args()
    rep = run_battery(fast=args.fast, long=args.long, echo=print)
    Path(args.output).write_text(rep.to_json())
    print(rep.summary)
    return rep.exit_code()


if __name__ == "__main__":
    sys.exit(main())
