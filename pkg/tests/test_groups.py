import math
from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qcf.data_files import SURVIVING_GROUPS, bundled_group
from qcf.geometry import Subspace, act, gaussian_binomial
from qcf.gf2 import BitMatrix, element_order, gl_order, identity_rows, is_invertible_rows, mat_mul, unpack_rows
from qcf.groups import (
    GroupTooLarge,
    MatrixGroup,
    are_conjugate,
    closure,
    conjugate_group,
    conjugator,
    consistent_with_split_extension,
    cyclic_group,
    cyclic_subgroup_classes,
    elementary_divisors,
    fingerprint,
    fixed_space_dim,
    gl_generators,
    involution_count,
    normalize_type_name,
    orbit_space,
    rcf_class_reps,
    subgroup_conjugator,
    subspace_stabilizer,
    type_string,
)
from strategies import invertible, subspaces


def all_invertible(n):
    ident = identity_rows(n)
    for bits in range(1 << (n * n)):
        rows = unpack_rows(bits, n, n)
        if is_invertible_rows(rows):
            yield BitMatrix(rows, n)


def test_gl_generators_generate():
    for n in (2, 3, 4):
        assert closure(gl_generators(n), n).order == gl_order(n)


def test_closure_cap():
    with pytest.raises(GroupTooLarge):
        closure(gl_generators(4), 4, cap=1000)


def test_type_string():
    assert type_string([4, 1, 2, 4, 1]) == "1^2 2^1 4^2"


@given(invertible(4))
def test_cyclic_order(m):
    assert closure([m], 4).order == element_order(m)


@pytest.mark.parametrize("name", ["G_4_6", "G_8_3", "G_14_1", "G_5_1"])
def test_orbit_stabilizer(name):
    g = bundled_group(name).closure()
    os_ = orbit_space(7, 3, g)
    assert sum(os_.sizes) == gaussian_binomial(7, 3)
    for rep, orbit in list(zip(os_.transversal, os_.orbits))[:40]:
        assert len(orbit) * len(subspace_stabilizer(rep, g)) == g.order
        assert rep.key == min(orbit)


@given(invertible(7))
def test_conjugate_group_preserves_orbit_type(m):
    g = bundled_group("G_4_6").closure()
    h = conjugate_group(g, m)
    assert h.order == g.order
    assert orbit_space(7, 2, h).type_string == orbit_space(7, 2, g).type_string


@given(subspaces(7, 3), st.sampled_from(SURVIVING_GROUPS[1:10]))
def test_orbit_members_are_images(s, name):
    g = bundled_group(name).closure()
    os_ = orbit_space(7, 3, g, keys=None)
    orbit = os_.orbits[os_.rep_index(s)]
    images = {act(s, m).key for m in g.matrices()}
    assert images == set(orbit)


# ------------------------------------------------------------ classification


@pytest.mark.parametrize("n", [2, 3])
def test_rcf_classes_partition_gl(n):
    reps = [c for c in rcf_class_reps(n) if c.is_invertible]
    sizes = Counter(elementary_divisors(m) for m in all_invertible(n))
    assert len(reps) == len(sizes)
    assert {c.elementary for c in reps} == set(sizes)
    assert sum(sizes.values()) == gl_order(n)


def test_gl4_class_count():
    # GL(4,2) has 14 conjugacy classes
    assert len([c for c in rcf_class_reps(4) if c.is_invertible]) == 14


@given(invertible(5), invertible(5))
def test_conjugacy_invariant(m, g):
    from qcf.gf2 import inverse

    b = mat_mul(mat_mul(inverse(g), m), g)
    assert are_conjugate(m, b)
    x = conjugator(m, b)
    assert mat_mul(mat_mul(inverse(x), m), x) == b


@given(invertible(5), invertible(5))
def test_conjugacy_matches_brute_force_fixed_dims(a, b):
    if are_conjugate(a, b):
        assert fixed_space_dim(a) == fixed_space_dim(b)
        assert element_order(a) == element_order(b)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_involution_formula(n):
    ident = BitMatrix.identity(n)
    brute = sum(1 for m in all_invertible(n) if m != ident and mat_mul(m, m) == ident)
    assert involution_count(n) == brute


def test_involution_classes_n7():
    cls = rcf_class_reps(7, order_filter=2)
    assert sorted(c.fixed_dim for c in cls) == [4, 5, 6]
    assert involution_count(7) == 32_252_031


@pytest.mark.parametrize("m,count", [(2, 3), (3, 3), (5, 1), (7, 3), (31, 1), (127, 1)])
def test_cyclic_class_counts(m, count):
    classes = cyclic_subgroup_classes(7, m)
    assert len(classes) == count
    assert all(c.order == m for c in classes)


def test_cyclic_classes_small_brute_force():
    # order-3 cyclic subgroups of GL(4,2): brute-force conjugacy classes
    n = 4
    gens = gl_generators(n)
    subs = set()
    for m in all_invertible(n):
        if element_order(m) == 3:
            subs.add(closure([m], n).elements)
    classes = []
    seen = set()
    for s in sorted(subs, key=sorted):
        if s in seen:
            continue
        orbit = {s}
        frontier = [s]
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = conjugate_group(MatrixGroup(n, (), x, len(x)), g).elements
                if y not in orbit:
                    orbit.add(y)
                    frontier.append(y)
        seen |= orbit
        classes.append(orbit)
    assert len(cyclic_subgroup_classes(4, 3)) == len(classes)


# ------------------------------------------------------------- fingerprints


@pytest.mark.parametrize("name", [g for g in SURVIVING_GROUPS if g != "G_16_1"])
def test_bundled_types(name):
    rec = bundled_group(name)
    g = rec.closure()
    assert g.order == rec.stated_order
    assert fingerprint(g).name == normalize_type_name(rec.stated_type)


def test_order16_only_consistent():
    g = bundled_group("G_16_1").closure()
    fp = fingerprint(g)
    assert fp.ambiguous
    assert consistent_with_split_extension(g, "Z_4 x Z_2", 2)
    assert not consistent_with_split_extension(g, "Z_8", 2)


def test_order_eight_types_distinguished():
    names = {fingerprint(bundled_group(n).closure()).name for n in SURVIVING_GROUPS if n.startswith("G_8_")}
    assert {"Z_2 x Z_2 x Z_2", "Z_4 x Z_2", "D_8", "Q_8"} <= names


def test_alternative_transcription_is_conjugate():
    a = bundled_group("G_4_6").closure()
    b = bundled_group("G_4_6_alt").closure()
    g = subgroup_conjugator(b, a)
    assert g is not None
    assert conjugate_group(b, g).elements == a.elements


def test_non_conjugate_subgroups():
    assert subgroup_conjugator(bundled_group("G_4_1").closure(), bundled_group("G_4_6").closure()) is None


def test_conjugate_group_type_invariance():
    g = bundled_group("G_8_3").closure()
    m = next(iter(cyclic_subgroup_classes(7, 127))).generators[0]
    assert fingerprint(conjugate_group(g, m)).name == fingerprint(g).name
