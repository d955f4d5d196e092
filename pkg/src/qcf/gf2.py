"""Bit-packed linear algebra and polynomial arithmetic over GF(2).

A matrix row is a Python int.  Column ``j`` (0-based) of an ``n``-column row
lives at bit ``n - 1 - j``, so comparing two row ints compares the rows
lexicographically starting from the first column, and the leading one of a
row is its highest set bit.

Polynomials are ints as well: bit ``i`` holds the coefficient of ``x**i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Iterator, Sequence

MAX_DIM = 62


class DimensionError(ValueError):
    pass


class SingularMatrixError(ValueError):
    pass


class OrderCapExceeded(RuntimeError):
    pass


def _check_dim(n: int) -> None:
    if not 0 <= n <= MAX_DIM:
        raise DimensionError(f"dimension {n} outside 0..{MAX_DIM}")


@dataclass(frozen=True)
class BitVector:
    bits: int
    n: int

    def __post_init__(self):
        _check_dim(self.n)
        if self.bits < 0 or self.bits >> self.n:
            raise ValueError(f"bits {self.bits:#x} do not fit in {self.n} positions")

    def __getitem__(self, j: int) -> int:
        return (self.bits >> (self.n - 1 - j)) & 1

    def __add__(self, other: "BitVector") -> "BitVector":
        if other.n != self.n:
            raise DimensionError("vector length mismatch")
        return BitVector(self.bits ^ other.bits, self.n)

    def weight(self) -> int:
        return self.bits.bit_count()

    def to_list(self) -> list[int]:
        return [self[j] for j in range(self.n)]

    @classmethod
    def from_list(cls, entries: Sequence[int]) -> "BitVector":
        return cls(row_from_list(entries), len(entries))


def row_from_list(entries: Sequence[int]) -> int:
    v = 0
    for e in entries:
        if e not in (0, 1):
            raise ValueError(f"entry {e!r} is not 0/1")
        v = (v << 1) | e
    return v


def row_to_list(row: int, n: int) -> list[int]:
    return [(row >> (n - 1 - j)) & 1 for j in range(n)]


@dataclass(frozen=True)
class BitMatrix:
    """Immutable matrix over GF(2), one packed int per row."""

    rows: tuple[int, ...]
    ncols: int

    def __post_init__(self):
        _check_dim(self.ncols)
        if not isinstance(self.rows, tuple):
            object.__setattr__(self, "rows", tuple(self.rows))
        for r in self.rows:
            if r < 0 or r >> self.ncols:
                raise ValueError(f"row {r:#x} does not fit in {self.ncols} columns")

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), self.ncols)

    def is_square(self) -> bool:
        return len(self.rows) == self.ncols

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return (self.rows[i] >> (self.ncols - 1 - j)) & 1

    def row(self, i: int) -> BitVector:
        return BitVector(self.rows[i], self.ncols)

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        return mat_mul(self, other)

    def __add__(self, other: "BitMatrix") -> "BitMatrix":
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")
        return BitMatrix(tuple(a ^ b for a, b in zip(self.rows, other.rows)), self.ncols)

    def transpose(self) -> "BitMatrix":
        m, n = self.shape
        out = []
        for j in range(n):
            bit = 1 << (n - 1 - j)
            v = 0
            for r in self.rows:
                v = (v << 1) | (1 if r & bit else 0)
            out.append(v)
        return BitMatrix(tuple(out), m)

    def pack(self) -> int:
        """Row-major packing into a single int (first row most significant)."""
        return pack_rows(self.rows, self.ncols)

    def to_lists(self) -> list[list[int]]:
        return [row_to_list(r, self.ncols) for r in self.rows]

    @classmethod
    def from_lists(cls, rows: Sequence[Sequence[int]], ncols: int | None = None) -> "BitMatrix":
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != ncols:
                raise DimensionError("ragged row lengths")
        return cls(tuple(row_from_list(r) for r in rows), ncols)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(identity_rows(n), n)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "BitMatrix":
        return cls((0,) * nrows, ncols)

    @classmethod
    def unpack(cls, key: int, nrows: int, ncols: int) -> "BitMatrix":
        return cls(unpack_rows(key, nrows, ncols), ncols)

    def __str__(self) -> str:
        return "\n".join("".join(map(str, row_to_list(r, self.ncols))) for r in self.rows)


def identity_rows(n: int) -> tuple[int, ...]:
    return tuple(1 << (n - 1 - i) for i in range(n))


def pack_rows(rows: Sequence[int], ncols: int) -> int:
    key = 0
    for r in rows:
        key = (key << ncols) | r
    return key


def unpack_rows(key: int, nrows: int, ncols: int) -> tuple[int, ...]:
    mask = (1 << ncols) - 1
    return tuple((key >> (ncols * (nrows - 1 - i))) & mask for i in range(nrows))


# ---------------------------------------------------------------- row kernels


def vec_mat(v: int, rows: Sequence[int]) -> int:
    """Row vector times matrix; ``len(rows)`` must equal the vector length."""
    acc = 0
    j = len(rows) - 1
    while v:
        if v & 1:
            acc ^= rows[j]
        v >>= 1
        j -= 1
    return acc


def mul_rows(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    return tuple(vec_mat(r, b) for r in a)


def vec_mat_table(rows: Sequence[int]) -> list[int]:
    """All products ``v @ M`` for ``v`` in ``0 .. 2**n - 1``."""
    n = len(rows)
    table = [0] * (1 << n)
    for j in range(n - 1, -1, -1):
        bit = 1 << (n - 1 - j)
        r = rows[j]
        for v in range(bit):
            table[v | bit] = table[v] ^ r
    return table


def echelon_rows(rows: Iterable[int]) -> tuple[int, ...]:
    """Reduced row echelon basis of the row span, nonzero rows only.

    Rows come back sorted by decreasing leading bit, i.e. by pivot column.
    """
    basis: list[int] = []
    for v in rows:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
    basis.sort(reverse=True)
    k = len(basis)
    for i in range(k):
        bi = basis[i]
        for j in range(k):
            if j != i:
                bj = basis[j]
                basis[j] = min(bj, bj ^ bi)
    return tuple(basis)


def rank_rows(rows: Iterable[int]) -> int:
    basis: list[int] = []
    for v in rows:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
            basis.sort(reverse=True)
    return len(basis)


def in_span(v: int, echelon: Sequence[int]) -> bool:
    for b in echelon:
        v = min(v, v ^ b)
    return v == 0


def is_invertible_rows(rows: Sequence[int]) -> bool:
    return rank_rows(rows) == len(rows)


def inverse_rows(rows: Sequence[int]) -> tuple[int, ...]:
    n = len(rows)
    aug = [(r << n) | (1 << (n - 1 - i)) for i, r in enumerate(rows)]
    for col in range(n):
        bit = 1 << (2 * n - 1 - col)
        piv = next((i for i in range(col, n) if aug[i] & bit), None)
        if piv is None:
            raise SingularMatrixError("matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col]
        for i in range(n):
            if i != col and aug[i] & bit:
                aug[i] ^= p
    mask = (1 << n) - 1
    return tuple(r & mask for r in aug)


def pow_rows(rows: Sequence[int], e: int) -> tuple[int, ...]:
    if e < 0:
        return pow_rows(inverse_rows(rows), -e)
    result = identity_rows(len(rows))
    base = tuple(rows)
    while e:
        if e & 1:
            result = mul_rows(result, base)
        e >>= 1
        if e:
            base = mul_rows(base, base)
    return result


# ------------------------------------------------------------- public matrix ops


def rref(m: BitMatrix) -> tuple[BitMatrix, int, list[int]]:
    """Reduced row echelon form, rank and 0-based pivot columns.

    The returned matrix keeps the shape of ``m``; zero rows go to the bottom.
    """
    basis = echelon_rows(m.rows)
    rank = len(basis)
    pivots = [m.ncols - r.bit_length() for r in basis]
    rows = basis + (0,) * (m.nrows - rank)
    return BitMatrix(rows, m.ncols), rank, pivots


def rank(m: BitMatrix) -> int:
    return rank_rows(m.rows)


def mat_mul(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    if a.ncols != b.nrows:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    return BitMatrix(mul_rows(a.rows, b.rows), b.ncols)


def kernel_basis(m: BitMatrix) -> BitMatrix:
    """Basis (as rows) of ``{x : m @ x.T == 0}``."""
    n = m.ncols
    basis = echelon_rows(m.rows)
    pivots = [n - r.bit_length() for r in basis]
    pivset = set(pivots)
    out = []
    for f in range(n):
        if f in pivset:
            continue
        fbit = 1 << (n - 1 - f)
        x = fbit
        for r, p in zip(basis, pivots):
            if r & fbit:
                x |= 1 << (n - 1 - p)
        out.append(x)
    return BitMatrix(tuple(out), n)


def inverse(m: BitMatrix) -> BitMatrix:
    if not m.is_square():
        raise DimensionError("inverse of a non-square matrix")
    return BitMatrix(inverse_rows(m.rows), m.ncols)


def mat_pow(m: BitMatrix, e: int) -> BitMatrix:
    if not m.is_square():
        raise DimensionError("power of a non-square matrix")
    return BitMatrix(pow_rows(m.rows, e), m.ncols)


def gl_order(n: int, q: int = 2) -> int:
    return math.prod(q**n - q**i for i in range(n))


def _prime_factors(x: int) -> list[int]:
    out = []
    d = 2
    while d * d <= x:
        if x % d == 0:
            out.append(d)
            while x % d == 0:
                x //= d
        d += 1
    if x > 1:
        out.append(x)
    return out


def order_rows(rows: Sequence[int], cap: int = 10**6) -> int:
    ident = identity_rows(len(rows))
    cur = tuple(rows)
    e = 1
    while cur != ident:
        e += 1
        if e > cap:
            raise OrderCapExceeded(f"element order exceeds {cap}")
        cur = mul_rows(cur, rows)
    return e


def element_order(m: BitMatrix, cap: int = 10**6, exponent_bound: int | None = None) -> int:
    """Multiplicative order of an invertible square matrix.

    With ``cap`` above 10**6 the order is found by stripping prime factors
    from ``exponent_bound`` (default ``|GL(n, 2)|``) instead of iterating.
    """
    if not m.is_square():
        raise DimensionError("order of a non-square matrix")
    if not is_invertible_rows(m.rows):
        raise SingularMatrixError("singular matrix has no order")
    if cap <= 10**6:
        return order_rows(m.rows, cap)
    e = exponent_bound if exponent_bound is not None else gl_order(m.ncols)
    ident = identity_rows(m.ncols)
    if pow_rows(m.rows, e) != ident:
        raise ValueError("exponent bound is not a multiple of the order")
    for p in _prime_factors(e):
        while e % p == 0 and pow_rows(m.rows, e // p) == ident:
            e //= p
    if e > cap:
        raise OrderCapExceeded(f"element order {e} exceeds {cap}")
    return e


def block_diag(blocks: Iterable[BitMatrix]) -> BitMatrix:
    blocks = list(blocks)
    n = sum(b.ncols for b in blocks)
    rows = []
    offset = 0
    for b in blocks:
        if not b.is_square():
            raise DimensionError("block_diag expects square blocks")
        shift = n - offset - b.ncols
        rows.extend(r << shift for r in b.rows)
        offset += b.ncols
    return BitMatrix(tuple(rows), n)


# ------------------------------------------------------------------ polynomials


@dataclass(frozen=True, order=True)
class GF2Poly:
    """Polynomial over GF(2); bit i of ``coeffs`` is the coefficient of x^i."""

    coeffs: int

    def __post_init__(self):
        if self.coeffs < 0:
            raise ValueError("negative coefficient mask")

    @property
    def degree(self) -> int:
        return self.coeffs.bit_length() - 1

    def is_zero(self) -> bool:
        return self.coeffs == 0

    def __mul__(self, other: "GF2Poly") -> "GF2Poly":
        return poly_mul(self, other)

    def __add__(self, other: "GF2Poly") -> "GF2Poly":
        return GF2Poly(self.coeffs ^ other.coeffs)

    def __mod__(self, other: "GF2Poly") -> "GF2Poly":
        return poly_divmod(self, other)[1]

    def __floordiv__(self, other: "GF2Poly") -> "GF2Poly":
        return poly_divmod(self, other)[0]

    def __call__(self, x: int) -> int:
        """Evaluate at 0 or 1."""
        if x == 0:
            return self.coeffs & 1
        return self.coeffs.bit_count() & 1

    def to_bitstring(self) -> str:
        """Coefficients low degree first, e.g. x^2 + 1 -> '101'."""
        if self.coeffs == 0:
            return "0"
        return "".join(str((self.coeffs >> i) & 1) for i in range(self.degree + 1))

    @classmethod
    def from_bitstring(cls, s: str) -> "GF2Poly":
        if not s or set(s) - {"0", "1"}:
            raise ValueError(f"bad polynomial bit string {s!r}")
        return cls(sum(1 << i for i, ch in enumerate(s) if ch == "1"))

    def __str__(self) -> str:
        if self.coeffs == 0:
            return "0"
        terms = []
        for i in range(self.degree, -1, -1):
            if (self.coeffs >> i) & 1:
                terms.append("1" if i == 0 else "x" if i == 1 else f"x^{i}")
        return " + ".join(terms)


X_PLUS_1 = GF2Poly(0b11)


def clmul(a: int, b: int) -> int:
    acc = 0
    while b:
        if b & 1:
            acc ^= a
        a <<= 1
        b >>= 1
    return acc


def poly_mul(a: GF2Poly, b: GF2Poly) -> GF2Poly:
    return GF2Poly(clmul(a.coeffs, b.coeffs))


def poly_divmod(a: GF2Poly, b: GF2Poly) -> tuple[GF2Poly, GF2Poly]:
    if b.coeffs == 0:
        raise ZeroDivisionError("polynomial division by zero")
    r = a.coeffs
    q = 0
    db = b.degree
    while r and r.bit_length() - 1 >= db:
        s = r.bit_length() - 1 - db
        q |= 1 << s
        r ^= b.coeffs << s
    return GF2Poly(q), GF2Poly(r)


def poly_divides(a: GF2Poly, b: GF2Poly) -> bool:
    """True when ``a`` divides ``b``."""
    if a.coeffs == 0:
        return b.coeffs == 0
    return poly_divmod(b, a)[1].coeffs == 0


def poly_gcd(a: GF2Poly, b: GF2Poly) -> GF2Poly:
    x, y = a.coeffs, b.coeffs
    while y:
        x, y = y, poly_divmod(GF2Poly(x), GF2Poly(y))[1].coeffs
    return GF2Poly(x)


def poly_pow(a: GF2Poly, e: int) -> GF2Poly:
    result = GF2Poly(1)
    for _ in range(e):
        result = poly_mul(result, a)
    return result


def poly_prod(polys: Iterable[GF2Poly]) -> GF2Poly:
    return reduce(poly_mul, polys, GF2Poly(1))


def poly_list(max_degree: int, min_degree: int = 1) -> Iterator[GF2Poly]:
    """All monic polynomials of degree ``min_degree .. max_degree``."""
    for d in range(min_degree, max_degree + 1):
        for low in range(1 << d):
            yield GF2Poly((1 << d) | low)


def is_irreducible(p: GF2Poly) -> bool:
    d = p.degree
    if d < 1:
        return False
    # x^(2^i) mod p for i = 1..d//2; p irreducible iff gcd(x^(2^i) - x, p) = 1
    x = GF2Poly(0b10)
    cur = x
    for _ in range(d // 2):
        cur = poly_mul(cur, cur) % p
        if poly_gcd(cur + x, p).degree > 0:
            return False
    return True


def irreducibles(max_degree: int, include_x: bool = False) -> list[GF2Poly]:
    out = [p for p in poly_list(max_degree) if is_irreducible(p)]
    if not include_x:
        out = [p for p in out if p.coeffs & 1]
    return out


def poly_order(p: GF2Poly) -> int:
    """Least e >= 1 with p | x^e - 1 (requires p(0) = 1)."""
    if not p.coeffs & 1:
        raise ValueError("polynomial divisible by x has no order")
    if p.degree == 0:
        return 1
    x = GF2Poly(0b10) % p
    cur = x
    e = 1
    while cur.coeffs != 1:
        cur = poly_mul(cur, x) % p
        e += 1
    return e


def companion(p: GF2Poly) -> BitMatrix:
    """Companion matrix acting on row vectors: e_i -> e_{i+1}, e_{d-1} -> low terms of p."""
    d = p.degree
    if d < 1:
        raise ValueError(f"companion matrix needs a monic polynomial of degree >= 1, got {p}")
    rows = [1 << (d - 2 - i) for i in range(d - 1)]
    last = 0
    for j in range(d):
        if (p.coeffs >> j) & 1:
            last |= 1 << (d - 1 - j)
    rows.append(last)
    return BitMatrix(tuple(rows), d)


def poly_eval_rows(p: GF2Poly, rows: Sequence[int]) -> tuple[int, ...]:
    """p(M) by Horner's rule."""
    n = len(rows)
    ident = identity_rows(n)
    acc: tuple[int, ...] = (0,) * n
    for i in range(p.degree, -1, -1):
        acc = mul_rows(acc, rows)
        if (p.coeffs >> i) & 1:
            acc = tuple(a ^ e for a, e in zip(acc, ident))
    return acc


def poly_eval_matrix(p: GF2Poly, m: BitMatrix) -> BitMatrix:
    if not m.is_square():
        raise DimensionError("polynomial of a non-square matrix")
    return BitMatrix(poly_eval_rows(p, m.rows), m.ncols)


# ---------------------------------------------------------------- serialization


def matrix_to_json(m: BitMatrix) -> list[list[int]]:
    return m.to_lists()


def matrix_from_json(data: Sequence[Sequence[int]]) -> BitMatrix:
    return BitMatrix.from_lists(data)


# ------------------------------------------------------------ matrix equations


def intertwiner_basis(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """Basis of ``{X : a @ X == X @ b}`` for square ``a``, ``b`` of equal size.

    Solutions are returned as row-major packed ints (``pack_rows``), so the
    solution space is an ordinary GF(2) subspace of ``n*n``-bit vectors.
    """
    n = len(a)
    if len(b) != n:
        raise DimensionError("intertwiner needs matrices of equal size")
    nn = n * n
    if nn > MAX_DIM:
        raise DimensionError(f"{n}x{n} unknowns exceed {MAX_DIM} bits")
    images = []
    for v in range(nn):
        e = unpack_rows(1 << (nn - 1 - v), n, n)
        ae = mul_rows(a, e)
        eb = mul_rows(e, b)
        images.append(pack_rows(tuple(x ^ y for x, y in zip(ae, eb)), n))
    system = BitMatrix(tuple(images), nn).transpose()
    return list(kernel_basis(system).rows)


def iter_span(basis: Sequence[int]) -> Iterator[int]:
    """Every element of the span of ``basis`` once, in Gray-code order."""
    cur = 0
    yield cur
    for i in range(1, 1 << len(basis)):
        cur ^= basis[(i & -i).bit_length() - 1]
        yield cur
