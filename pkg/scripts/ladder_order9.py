"""Order-9 subgroups over the two surviving order-3 classes, up to conjugacy in GL(7,2)."""

from qcf.groups import fingerprint
from qcf.normalizer import LadderInput, ladder_search
from qcf.verify import surviving_order3_pairs


def main() -> None:
    res = ladder_search(LadderInput(surviving_order3_pairs(), 3, 9))
    for line in res.log:
        print(line)
    print(f"classes: between {res.lower} and {res.upper}")
    for g in res.groups:
        print(" ", fingerprint(g).name)


if __name__ == "__main__":
    main()
