"""How many words of the bundled witness lie in each hyperplane of F_2^7.

Prints the distribution of hyperplane counts, the counts for the seven
coordinate hyperplanes, and which hyperplanes attain a requested count.
"""

import argparse
from collections import Counter

from qcf.data_files import appendix_code
from qcf.geometry import Subspace, coordinate_hyperplane, enumerate_grassmannian, hyperplane_members


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=35, help="list hyperplanes holding exactly this many words")
    args = ap.parse_args()
    code = appendix_code()
    counts = {h.key: hyperplane_members(code, h) for h in enumerate_grassmannian(7, 6)}
    dist = Counter(counts.values())
    print("count distribution:", dict(sorted(dist.items())))
    coords = [hyperplane_members(code, coordinate_hyperplane(7, j)) for j in range(7)]
    print("coordinate hyperplanes x_1..x_7 = 0:", coords)
    hits = [k for k, c in counts.items() if c == args.count]
    print(f"{len(hits)} hyperplanes hold {args.count} words")
    for k in hits:
        h = Subspace.from_key(k, 6, 7)
        # the hyperplane is the kernel of a single linear form; print that form
        form = next(v for v in range(1, 128) if all(bin(v & p).count("1") % 2 == 0 for p in h.rows))
        print(f"  form {form:07b}")


if __name__ == "__main__":
    main()
