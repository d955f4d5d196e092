import pytest
from hypothesis import assume, given, settings

from qcf.data_files import bundled_group
from qcf.gf2 import BitMatrix, element_order, inverse, mat_mul
from qcf.groups import closure, cyclic_subgroup_classes, fingerprint, gl_generators, subgroups_of_order
from qcf.normalizer import (
    CentralizerTooLarge,
    LadderInput,
    block_ambient,
    centralizer_basis,
    conjugacy_classes_of_subgroups,
    drop_containing,
    group_from_elements,
    is_normal_in,
    ladder_search,
    normalizer_in,
    normalizer_of_cyclic,
)
from strategies import invertible

GL3 = closure(gl_generators(3), 3)
GL4 = closure(gl_generators(4), 4)


@settings(max_examples=15)
@given(invertible(4))
def test_normalizer_matches_brute_force(c):
    assume(c != BitMatrix.identity(4))
    res = normalizer_of_cyclic(c)
    cyc = closure([c], 4)
    assert res.group.elements == normalizer_in(cyc, GL4).elements
    assert sum(res.slices.values()) == res.group.order
    assert res.group.order % cyc.order == 0
    assert closure(res.group.generators, 4).order == res.group.order


@given(invertible(4))
def test_centralizer_commutes(c):
    alg = centralizer_basis(c)
    assert alg.dim >= 4  # a centralizer always has dimension at least n
    for x in alg.basis:
        assert mat_mul(c, x) == mat_mul(x, c)


def test_identity_rejected():
    with pytest.raises(ValueError):
        normalizer_of_cyclic(BitMatrix.identity(4))


def test_centralizer_cap():
    c = bundled_group("G_2_1").generators[0]
    with pytest.raises(CentralizerTooLarge):
        normalizer_of_cyclic(c, dim_cap=10)


def test_order14_normalizer():
    res = normalizer_of_cyclic(bundled_group("G_14_1").generators[0])
    assert res.group.order == 168
    assert res.centralizer_dim == 7
    assert is_normal_in(bundled_group("G_14_1").closure().elements, res.group.generators, 7)


def _pairs(n, t):
    return [(c, normalizer_of_cyclic(c.generators[0]).group) for c in cyclic_subgroup_classes(n, t)]


def test_ladder_gl4_sylow3():
    # all order-9 subgroups of GL(4,2) are Sylow, hence one class
    res = ladder_search(LadderInput(_pairs(4, 3), 3, 9))
    assert res.exact and res.upper == 1
    assert fingerprint(res.groups[0]).name == "Z_3 x Z_3"


def test_ladder_gl3_order4_matches_brute_force():
    res = ladder_search(LadderInput(_pairs(3, 2), 2, 4))
    brute = conjugacy_classes_of_subgroups(subgroups_of_order(GL3, 4), GL3)
    assert res.exact and res.upper == len(brute) == 3
    where = {s: i for i, c in enumerate(brute) for s in c}
    assert sorted(where[g.elements] for g in res.groups) == [0, 1, 2]


def test_ladder_gl4_order4_matches_brute_force():
    res = ladder_search(LadderInput(_pairs(4, 2), 2, 4))
    brute = conjugacy_classes_of_subgroups(subgroups_of_order(GL4, 4), GL4)
    where = {s: i for i, c in enumerate(brute) for s in c}
    assert res.exact
    assert sorted(where[g.elements] for g in res.groups) == list(range(len(brute)))


def test_ambient_ladder_matches_brute_force():
    h = block_ambient([2, 2])
    cls = conjugacy_classes_of_subgroups(subgroups_of_order(h, 3, max_gens=1), h)
    pairs = [(t, normalizer_in(t, h)) for t in (group_from_elements(c[0], 4) for c in cls)]
    res = ladder_search(LadderInput(pairs, 3, 9, ambient=h))
    brute = conjugacy_classes_of_subgroups(subgroups_of_order(h, 9), h)
    assert len(res.groups) == len(brute) == 1


def test_ladder_rejects_composite_index():
    with pytest.raises(ValueError):
        LadderInput([], 2, 8)


def test_drop_containing():
    t = cyclic_subgroup_classes(4, 3)
    res = ladder_search(LadderInput(_pairs(4, 3), 3, 9))
    assert drop_containing(res.groups, t[:1]) == []
    assert drop_containing(res.groups, []) == res.groups


def test_block_ambient_order():
    assert block_ambient([3, 2, 2]).order == 168 * 6 * 6
