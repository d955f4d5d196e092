from qcf.data_files import appendix_code
from qcf.groups import cyclic_subgroup_classes
from qcf.km import build_model
from qcf.verify import (
    NOT_REPRODUCIBLE,
    Check,
    VerificationReport,
    brute_force_optimum,
    brute_involutions,
    random_submodels,
    run_battery,
    verify_code,
)


def _check(passed, budget=False):
    return Check(1, "x", "a", "b", passed, "test", budget_exhausted=budget)


def test_exit_codes():
    assert VerificationReport([_check(True), _check(None)]).exit_code() == 0
    assert VerificationReport([_check(True), _check(False)]).exit_code() == 1
    assert VerificationReport([_check(False, budget=True)]).exit_code() == 2
    assert VerificationReport([_check(False), _check(False, budget=True)]).exit_code() == 1


def test_report_json():
    import json

    rep = VerificationReport([_check(True), _check(None)])
    data = json.loads(rep.to_json())
    assert data["summary"] == {"pass": 1, "fail": 0, "skip": 1}
    assert all(c["provenance"] for c in data["checks"])


def test_brute_force_oracle_tiny():
    m = build_model(7, 3, 4, cyclic_subgroup_classes(7, 127)[0])
    assert brute_force_optimum(m) == 254
    assert brute_force_optimum(m, chosen=(0,)) >= m.weights[0]


def test_brute_involutions():
    assert brute_involutions(2) == 3


def test_random_submodels_reproducible():
    a = random_submodels(5, seed=7)
    b = random_submodels(5, seed=7)
    assert a == b
    assert all(m.num_vars <= 22 for m in a)


def test_verify_code_expectations():
    from qcf.verify import APPENDIX_EXPECT
    from qcf.data_files import bundled_group

    rep = verify_code(appendix_code(), bundled_group("G_4_6").closure(), APPENDIX_EXPECT)
    by = {c.name: c for c in rep.checks}
    assert by["size"].passed and by["minimum distance"].passed and by["orbit type"].passed
    assert by["automorphism group order"].passed
    assert by["words in x_1 = 0"].observed == "39"


def test_fast_battery_lists_skips(monkeypatch):
    from qcf import verify

    monkeypatch.setattr(verify, "CRITERIA", [verify.check_counting, verify.check_oracle, verify.check_improvement])
    lines = []
    rep = run_battery(fast=True, echo=lines.append)
    skipped = [c for c in rep.checks if c.passed is None]
    assert len(skipped) == 2 + len(NOT_REPRODUCIBLE)
    assert rep.checks[0].passed
    assert len(lines) == len(rep.checks)
