import pytest
from hypothesis import given
from hypothesis import strategies as st

from qcf.automorphisms import SearchBudgetExceeded, automorphism_search, code_automorphisms
from qcf.data_files import appendix_code, bundled_group
from qcf.geometry import Code, Subspace, act, enumerate_grassmannian
from qcf.gf2 import gl_order, mat_mul
from qcf.groups import closure, conjugate_group, gl_generators
from strategies import invertible, subspaces

GL4 = closure(gl_generators(4), 4)
LINES4 = list(enumerate_grassmannian(4, 2))


def brute_aut_order(code: Code) -> int:
    keys = code.keys
    return sum(1 for m in GL4.matrices() if all(act(w, m).key in keys for w in code))


@given(st.lists(st.sampled_from(LINES4), min_size=1, max_size=12, unique_by=lambda s: s.key))
def test_matches_brute_force_in_dim4(words):
    code = Code(tuple(words))
    res = automorphism_search(code)
    assert res.order == brute_aut_order(code)
    keys = code.keys
    for g in res.group.generators:
        assert all(act(w, g).key in keys for w in code)


def test_witness_group():
    res = automorphism_search(appendix_code())
    assert res.order == 4
    assert res.group.elements == bundled_group("G_4_6").closure().elements


@given(invertible(7))
def test_automorphism_group_transforms_by_conjugation(m):
    code = appendix_code()
    a = code_automorphisms(code)
    b = code_automorphisms(code.act(m))
    assert b.elements == conjugate_group(a, m).elements


def test_single_plane_stabilizer():
    s = next(enumerate_grassmannian(7, 3))
    res = automorphism_search(Code((s,)))
    assert res.order == gl_order(7) // 11811


def test_full_grassmannian_short_circuit():
    res = automorphism_search(Code(tuple(LINES4)))
    assert res.order == gl_order(4)


def test_budget():
    with pytest.raises(SearchBudgetExceeded):
        automorphism_search(appendix_code(), budget=0.0)


def test_empty_code_rejected():
    with pytest.raises(ValueError):
        automorphism_search(Code(()))
