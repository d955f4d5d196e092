"""Shared hypothesis strategies."""

from hypothesis import strategies as st

from qcf.geometry import Subspace
from qcf.gf2 import BitMatrix, is_invertible_rows


def matrices(nrows: int, ncols: int):
    return st.lists(st.integers(0, (1 << ncols) - 1), min_size=nrows, max_size=nrows).map(
        lambda rows: BitMatrix(tuple(rows), ncols)
    )


def square(n: int):
    return matrices(n, n)


def invertible(n: int):
    return square(n).filter(lambda m: is_invertible_rows(m.rows))


def subspaces(n: int, k: int):
    return (
        st.lists(st.integers(1, (1 << n) - 1), min_size=k, max_size=k)
        .map(lambda rows: Subspace.from_rows(rows, n))
        .filter(lambda s: s.dim == k)
    )
