import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qcf.gf2 import (
    BitMatrix,
    GF2Poly,
    SingularMatrixError,
    block_diag,
    companion,
    element_order,
    gl_order,
    intertwiner_basis,
    inverse,
    irreducibles,
    is_irreducible,
    iter_span,
    kernel_basis,
    mat_mul,
    mat_pow,
    pack_rows,
    poly_divmod,
    poly_eval_matrix,
    poly_mul,
    poly_order,
    rank,
    rref,
    unpack_rows,
    vec_mat_table,
)
from strategies import invertible, matrices, square


@given(matrices(5, 7))
def test_rref_idempotent(m):
    r, rk, piv = rref(m)
    assert rref(r)[0] == r
    assert rk == len(piv) == rank(m)
    assert piv == sorted(piv)


@given(matrices(4, 6), matrices(6, 5))
def test_rank_of_product_bounded(a, b):
    assert rank(mat_mul(a, b)) <= min(rank(a), rank(b))


@given(matrices(5, 7))
def test_rank_nullity(m):
    kb = kernel_basis(m)
    assert rank(m) + kb.nrows == m.ncols
    assert rank(kb) == kb.nrows
    for v in kb.rows:
        assert all(bin(r & v).count("1") % 2 == 0 for r in m.rows)


@given(invertible(6))
def test_inverse(m):
    assert mat_mul(m, inverse(m)) == BitMatrix.identity(6)


def test_singular_inverse_raises():
    with pytest.raises(SingularMatrixError):
        inverse(BitMatrix((1, 1, 0), 3))


@given(invertible(4))
def test_order_divides_gl_order(m):
    o = element_order(m)
    assert gl_order(4) % o == 0
    assert mat_pow(m, o) == BitMatrix.identity(4)


def test_gl_orders():
    assert [gl_order(n) for n in (1, 2, 3, 4)] == [1, 6, 168, 20160]
    assert gl_order(7) == 163849992929280


@given(square(5))
def test_pack_roundtrip(m):
    assert unpack_rows(pack_rows(m.rows, 5), 5, 5) == m.rows


@given(invertible(5), st.integers(0, 31))
def test_vec_mat_table(m, v):
    table = vec_mat_table(m.rows)
    row = BitMatrix((v,), 5)
    assert table[v] == mat_mul(row, m).rows[0]


def test_irreducible_counts():
    # necklace counts of irreducible binary polynomials by degree
    counts = [sum(1 for p in irreducibles(7) if p.degree == d) for d in range(1, 8)]
    counts[0] += 1  # x itself is excluded by default
    assert len(irreducibles(1, include_x=True)) == 2
    assert counts == [2, 1, 2, 3, 6, 9, 18]


@given(st.integers(1, 255), st.integers(1, 255))
def test_poly_divmod(a, b):
    pa, pb = GF2Poly(a), GF2Poly(b)
    q, r = poly_divmod(pa, pb)
    assert poly_mul(q, pb).coeffs ^ r.coeffs == a
    assert r.degree < pb.degree or r.is_zero


@pytest.mark.parametrize("p", [p for p in irreducibles(7) if p.degree >= 2])
def test_companion_annihilated_and_order(p):
    c = companion(p)
    assert rank(poly_eval_matrix(p, c)) == 0
    assert element_order(c) == poly_order(p)


def test_primitive_degree_seven():
    # every irreducible of prime degree 7 has order 127
    assert all(poly_order(p) == 127 for p in irreducibles(7) if p.degree == 7)
    assert is_irreducible(GF2Poly(0b10000011))


@given(invertible(3), invertible(3))
def test_intertwiners(a, b):
    n = 3
    for x in intertwiner_basis(a.rows, b.rows):
        xm = BitMatrix(unpack_rows(x, n, n), n)
        assert mat_mul(a, xm) == mat_mul(xm, b)


def test_intertwiner_of_identity_is_everything():
    assert len(intertwiner_basis(BitMatrix.identity(3).rows, BitMatrix.identity(3).rows)) == 9


def test_iter_span_enumerates_once():
    basis = [0b1001, 0b0110, 0b0011]
    vals = list(iter_span(basis))
    assert len(vals) == len(set(vals)) == 8
    brute = {a ^ b ^ c for a, b, c in itertools.product([0, basis[0]], [0, basis[1]], [0, basis[2]])}
    assert set(vals) == brute


def test_block_diag():
    m = block_diag([BitMatrix.identity(2), companion(GF2Poly(0b111))])
    assert m.shape == (4, 4)
    assert element_order(m) == 3
