import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qcf.data_files import appendix_code, bundled_group
from qcf.geometry import gaussian_binomial
from qcf.groups import cyclic_subgroup_classes, trivial_group
from qcf.km import ModelError, add_closeness, anticode_bound, build_model, from_lp, make_subproblems, to_lp
from qcf.normalizer import normalizer_of_cyclic

C127 = cyclic_subgroup_classes(7, 127)[0]
C31 = cyclic_subgroup_classes(7, 31)[0]


@pytest.fixture(scope="module")
def m31():
    return build_model(7, 3, 4, C31)


@pytest.fixture(scope="module")
def m14():
    return build_model(7, 3, 4, bundled_group("G_14_1").closure())


def test_coverage_conservation(m31):
    # each plane holds 7 lines: sum over rows of coefficient * row size = 7 * weight
    cols = m31.columns()
    for j in range(m31.num_vars):
        assert sum(c * m31.row_sizes[r] for r, c in cols[j]) == 7 * m31.weights[j]


def test_pruning(m31):
    full = build_model(7, 3, 4, C31, prune=False)
    assert full.num_vars == 381 and len(full.rows) == 87
    assert m31.num_vars == 270 and m31.pruned_type() == "31^111"
    assert all(c <= m31.lam for _, terms in m31.rows for _, c in terms)


def test_order127_model():
    m = build_model(7, 3, 4, C127)
    assert m.num_vars == 72 and m.pruned_type() == "127^21"


def test_trivial_model_small():
    m = build_model(4, 2, 4, trivial_group(4))
    assert m.num_vars == gaussian_binomial(4, 2)
    assert len(m.rows) == gaussian_binomial(4, 1)


def test_anticode_bound():
    assert anticode_bound(7, 3, 2) == 381
    assert anticode_bound(5, 2, 1) == 10


def test_decode_and_feasibility(m31):
    sel = [0]
    code = m31.decode(sel)
    assert len(code) == m31.weights[0]
    assert m31.is_feasible(sel)


def test_violations_report(m31):
    # two orbits meeting in a line violate some row
    rng = random.Random(3)
    for _ in range(200):
        a, b = rng.sample(range(m31.num_vars), 2)
        feasible = m31.is_feasible([a, b])
        assert feasible == (m31.decode([a, b]).min_distance() == 4)
        assert feasible == (not m31.violations([a, b]))


@given(st.lists(st.integers(0, 269), max_size=30, unique=True))
def test_lp_roundtrip(keep):
    m = build_model(7, 3, 4, C31) if not hasattr(test_lp_roundtrip, "m") else test_lp_roundtrip.m
    test_lp_roundtrip.m = m
    sub = m.submodel(sorted(keep)) if keep else m
    again = from_lp(to_lp(sub))
    assert again == sub
    assert to_lp(again) == to_lp(sub)


def test_lp_shape(m31):
    text = to_lp(m31)
    assert text.startswith("\\")
    for section in ("Maximize", "Subject To", "Binary", "End"):
        assert section in text


def test_closeness_roundtrip():
    g = bundled_group("G_4_6").closure()
    m = add_closeness(build_model(7, 3, 4, g), appendix_code(), 300)
    assert m.closeness[1] == 300
    assert from_lp(to_lp(m)) == m


def test_subproblems_order14(m14):
    g = bundled_group("G_14_1").closure()
    nr = normalizer_of_cyclic(g.generators[0])
    plan = make_subproblems(m14, g, nr.group.generators)
    assert len(plan) == 66
    assert plan.class_type() == "1^1 4^13 6^2 12^50"
    sizes = [sp.class_size for sp in plan.subproblems]
    assert sizes == sorted(sizes, reverse=True)
    # each subproblem excludes exactly the classes handled before it
    done: set[int] = set()
    for sp, cls in zip(plan.subproblems, plan.classes):
        assert set(sp.exclusions) == done
        assert sp.forced in cls
        done |= set(cls)


def test_subproblems_need_normalizing_elements(m14):
    g = bundled_group("G_14_1").closure()
    bad = cyclic_subgroup_classes(7, 127)[0].generators
    with pytest.raises(ModelError):
        make_subproblems(m14, g, bad)


def test_decode_requires_orbits(m31):
    with pytest.raises(ModelError):
        from_lp(to_lp(m31)).decode([0])
