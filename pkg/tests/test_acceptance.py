"""Acceptance battery: one test and one PASS/FAIL line per criterion.

Run directly (``python tests/test_acceptance.py``) to print the lines
without pytest.
"""

from __future__ import annotations

import sys
from collections import defaultdict

import pytest

from qcf.verify import CRITERIA, Check

RESULTS: dict[int, str] = {}
_CHECKS: dict[int, list[Check]] = {}


def _run_all() -> dict[int, list[Check]]:
    if not _CHECKS:
        grouped: dict[int, list[Check]] = defaultdict(list)
        for fn in CRITERIA:
            c = fn()
            grouped[c.criterion].append(c)
        _CHECKS.update(grouped)
    return _CHECKS


def summarize(num: int, checks: list[Check]) -> str:
    ok = all(c.passed for c in checks)
    detail = "; ".join(f"{c.name}: observed {c.observed} ({c.seconds:.1f}s)" for c in checks)
    expected = "; ".join(c.expected for c in checks)
    return f"{'PASS' if ok else 'FAIL'} criterion {num:>2}: expected {expected} | {detail}"


@pytest.mark.parametrize("num", range(1, 13))
def test_criterion(num):
    checks = _run_all()[num]
    line = summarize(num, checks)
    RESULTS[num] = line
    print(line)
    bad = [c for c in checks if not c.passed]
    assert not bad, "; ".join(f"{c.name}: expected {c.expected}, observed {c.observed}" for c in bad)


if __name__ == "__main__":
    failures = 0
    for num, checks in sorted(_run_all().items()):
        line = summarize(num, checks)
        failures += line.startswith("FAIL")
        print(line, flush=True)
    sys.exit(1 if failures else 0)
