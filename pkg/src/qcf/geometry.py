"""Subspaces of F_2^n as canonical RREF objects, and codes made of them."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .gf2 import (
    BitMatrix,
    DimensionError,
    SingularMatrixError,
    echelon_rows,
    is_invertible_rows,
    pack_rows,
    rank_rows,
    unpack_rows,
    vec_mat,
    vec_mat_table,
)

GRASSMANNIAN_MAX_N = 20
ENUMERATION_BUDGET = 10**7


class BudgetExceeded(RuntimeError):
    pass


class CodeFormatError(ValueError):
    pass


def gaussian_binomial(n: int, k: int, q: int = 2) -> int:
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
    num = math.prod(q ** (n - i) - 1 for i in range(k))
    den = math.prod(q ** (i + 1) - 1 for i in range(k))
    return num // den


@dataclass(frozen=True)
class Subspace:
    """A k-dimensional subspace of F_2^n stored by its RREF basis rows."""

    rows: tuple[int, ...]
    n: int

    @classmethod
    def from_rows(cls, rows: Iterable[int], n: int) -> "Subspace":
        return cls(echelon_rows(rows), n)

    @classmethod
    def from_matrix(cls, m: BitMatrix) -> "Subspace":
        return cls(echelon_rows(m.rows), m.ncols)

    @classmethod
    def from_key(cls, key: int, k: int, n: int) -> "Subspace":
        return cls(unpack_rows(key, k, n), n)

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def key(self) -> int:
        return pack_rows(self.rows, self.n)

    @property
    def basis(self) -> BitMatrix:
        return BitMatrix(self.rows, self.n)

    @property
    def pivots(self) -> list[int]:
        return [self.n - r.bit_length() for r in self.rows]

    def __lt__(self, other: "Subspace") -> bool:
        return (self.dim, self.key) < (other.dim, other.key)

    def points(self) -> list[int]:
        """Nonzero vectors of the subspace."""
        pts = [0]
        for r in self.rows:
            pts += [p ^ r for p in pts]
        return pts[1:]

    def contains_vector(self, v: int) -> bool:
        for b in self.rows:
            v = min(v, v ^ b)
        return v == 0

    def contains(self, other: "Subspace") -> bool:
        return all(self.contains_vector(r) for r in other.rows)

    def __str__(self) -> str:
        return str(self.basis)


def act(s: Subspace, m: BitMatrix) -> Subspace:
    """Image ``s @ m`` under an invertible matrix, canonicalized."""
    if m.ncols != s.n or m.nrows != s.n:
        raise DimensionError(f"matrix shape {m.shape} does not act on F_2^{s.n}")
    if not is_invertible_rows(m.rows):
        raise SingularMatrixError("acting matrix is singular")
    return Subspace(echelon_rows(vec_mat(r, m.rows) for r in s.rows), s.n)


def act_key(key: int, k: int, n: int, table: Sequence[int]) -> int:
    """Fast path of ``act`` on packed keys with a precomputed ``vec_mat_table``."""
    mask = (1 << n) - 1
    img = [table[(key >> (n * (k - 1 - i))) & mask] for i in range(k)]
    return pack_rows(echelon_rows(img), n)


def subspace_sum(u: Subspace, w: Subspace) -> Subspace:
    if u.n != w.n:
        raise DimensionError("ambient dimension mismatch")
    return Subspace(echelon_rows(u.rows + w.rows), u.n)


def subspace_distance(u: Subspace, w: Subspace) -> int:
    if u.n != w.n:
        raise DimensionError("ambient dimension mismatch")
    return 2 * rank_rows(u.rows + w.rows) - u.dim - w.dim


def _rref_patterns(n: int, k: int) -> Iterator[tuple[int, ...]]:
    """RREF row tuples for every k-subspace, grouped by pivot pattern."""
    for pivots in itertools.combinations(range(n), k):
        pivset = set(pivots)
        free_slots = []
        for i, p in enumerate(pivots):
            for c in range(p + 1, n):
                if c not in pivset:
                    free_slots.append((i, 1 << (n - 1 - c)))
        base = [1 << (n - 1 - p) for p in pivots]
        for fill in range(1 << len(free_slots)):
            rows = list(base)
            j = 0
            f = fill
            while f:
                if f & 1:
                    i, bit = free_slots[j]
                    rows[i] |= bit
                f >>= 1
                j += 1
            yield tuple(rows)


def grassmannian_keys(n: int, k: int, budget: int = ENUMERATION_BUDGET) -> list[int]:
    """Sorted packed keys of all k-subspaces of F_2^n."""
    if not 1 <= k <= n <= GRASSMANNIAN_MAX_N:
        raise ValueError(f"need 1 <= k <= n <= {GRASSMANNIAN_MAX_N}")
    total = gaussian_binomial(n, k)
    if total > budget:
        raise BudgetExceeded(f"{total} subspaces exceed the enumeration budget {budget}")
    return sorted(pack_rows(rows, n) for rows in _rref_patterns(n, k))


def enumerate_grassmannian(n: int, k: int, budget: int = ENUMERATION_BUDGET) -> Iterator[Subspace]:
    for key in grassmannian_keys(n, k, budget):
        yield Subspace.from_key(key, k, n)


def sub_subspaces(s: Subspace, t: int) -> list[Subspace]:
    """All t-dimensional subspaces of ``s``."""
    k = s.dim
    if not 0 <= t <= k:
        raise ValueError(f"need 0 <= t <= {k}")
    if t == 0:
        return [Subspace((), s.n)]
    out = []
    for coeffs in _rref_patterns(k, t):
        out.append(Subspace(echelon_rows(vec_mat(c, s.rows) for c in coeffs), s.n))
    return sorted(out, key=lambda x: x.key)


def coordinate_hyperplane(n: int, j: int = 0) -> Subspace:
    """``{x : x_j = 0}`` for a 0-based coordinate ``j``."""
    return Subspace.from_rows((1 << (n - 1 - c) for c in range(n) if c != j), n)


# ------------------------------------------------------------------------ codes


@dataclass(frozen=True)
class Code:
    """Set of equal-dimension subspaces, kept sorted by key."""

    words: tuple[Subspace, ...]

    def __post_init__(self):
        words = sorted(set(self.words), key=lambda w: w.key)
        if len(words) != len(self.words):
            raise ValueError("duplicate codewords")
        if words:
            k, n = words[0].dim, words[0].n
            if any(w.dim != k or w.n != n for w in words):
                raise ValueError("codewords differ in dimension or ambient space")
        object.__setattr__(self, "words", tuple(words))

    @classmethod
    def from_words(cls, words: Iterable[Subspace]) -> "Code":
        seen: dict[int, int] = {}
        words = list(words)
        for i, w in enumerate(words):
            if w.key in seen:
                raise ValueError(f"duplicate codeword (entries {seen[w.key] + 1} and {i + 1}): {encode_row_or_key(w)}")
            seen[w.key] = i
        return cls(tuple(words))

    def __len__(self) -> int:
        return len(self.words)

    def __iter__(self):
        return iter(self.words)

    def __contains__(self, w: Subspace) -> bool:
        return w.key in self.keys

    @property
    def keys(self) -> frozenset[int]:
        return frozenset(w.key for w in self.words)

    @property
    def k(self) -> int:
        return self.words[0].dim

    @property
    def n(self) -> int:
        return self.words[0].n

    def min_distance(self) -> int | None:
        """Minimum pairwise subspace distance, None for fewer than two words."""
        if len(self.words) < 2:
            return None
        best = None
        rows = [w.rows for w in self.words]
        k = self.k
        for i in range(len(rows)):
            ri = rows[i]
            for j in range(i + 1, len(rows)):
                d = 2 * (rank_rows(ri + rows[j]) - k)
                if best is None or d < best:
                    best = d
                    if d == 0:
                        return 0
        return best

    def act(self, m: BitMatrix) -> "Code":
        return Code(tuple(act(w, m) for w in self.words))


def hyperplane_members(code: Code | Iterable[Subspace], h: Subspace) -> int:
    if h.dim != h.n - 1:
        raise ValueError("expected a hyperplane")
    return sum(1 for w in code if h.contains(w))


# -------------------------------------------------------------- appendix codec


def decode_appendix_row(digits: str, n: int = 7, k: int = 3) -> Subspace:
    """Decode a digit string: digit j is column j, bit i of the digit is row i."""
    digits = digits.strip()
    if len(digits) != n or any(ch not in "01234567"[: 1 << k] for ch in digits):
        raise CodeFormatError(f"expected {n} digits in 0..{(1 << k) - 1}, got {digits!r}")
    rows = [0] * k
    for j, ch in enumerate(digits):
        d = int(ch)
        for i in range(k):
            if (d >> i) & 1:
                rows[i] |= 1 << (n - 1 - j)
    rows_t = tuple(rows)
    canon = echelon_rows(rows_t)
    if len(canon) != k:
        raise CodeFormatError(f"{digits!r} has rank {len(canon)}, expected {k}")
    if canon != rows_t:
        raise CodeFormatError(f"{digits!r} is not in reduced row echelon form")
    return Subspace(rows_t, n)


def encode_appendix_row(s: Subspace) -> str:
    if s.dim > 3:
        raise ValueError("digit encoding covers at most 3 rows")
    out = []
    for j in range(s.n):
        bit = 1 << (s.n - 1 - j)
        out.append(str(sum(1 << i for i, r in enumerate(s.rows) if r & bit)))
    return "".join(out)


def encode_row_or_key(s: Subspace) -> str:
    if s.dim <= 3:
        return encode_appendix_row(s)
    return hex(s.key)


# ------------------------------------------------------------------ code files


def parse_appendix_text(text: str, n: int = 7, k: int = 3) -> list[Subspace]:
    """One digit row per line; blank, '#' and '[...]' lines are skipped."""
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if not s or s.startswith("#") or s.startswith("["):
            continue
        try:
            out.append(decode_appendix_row(s, n, k))
        except CodeFormatError as exc:
            raise CodeFormatError(f"line {lineno}: {exc}") from None
    return out


def parse_json_code(text: str) -> list[Subspace]:
    data = json.loads(text)
    if not isinstance(data, list):
        raise CodeFormatError("JSON code must be a list of matrices")
    out = []
    for i, m in enumerate(data, 1):
        try:
            mat = BitMatrix.from_lists(m)
        except (ValueError, TypeError, IndexError) as exc:
            raise CodeFormatError(f"entry {i}: {exc}") from None
        s = Subspace.from_matrix(mat)
        if s.dim != mat.nrows:
            raise CodeFormatError(f"entry {i}: matrix has rank {s.dim}, expected {mat.nrows}")
        out.append(s)
    return out


def read_code_file(path: str | Path, fmt: str = "auto") -> list[Subspace]:
    path = Path(path)
    text = path.read_text()
    if fmt == "auto":
        fmt = "json" if text.lstrip().startswith("[[") or path.suffix == ".json" else "appendix"
    if fmt == "json":
        return parse_json_code(text)
    if fmt == "appendix":
        return parse_appendix_text(text)
    raise ValueError(f"unknown code format {fmt!r}")


def format_code(words: Iterable[Subspace], fmt: str = "appendix") -> str:
    words = list(words)
    if fmt == "appendix":
        return "".join(encode_appendix_row(w) + "\n" for w in words)
    if fmt == "json":
        return json.dumps([w.basis.to_lists() for w in words]) + "\n"
    raise ValueError(f"unknown code format {fmt!r}")


__all__ = [
    "BudgetExceeded",
    "Code",
    "CodeFormatError",
    "Subspace",
    "act",
    "act_key",
    "coordinate_hyperplane",
    "decode_appendix_row",
    "encode_appendix_row",
    "enumerate_grassmannian",
    "format_code",
    "gaussian_binomial",
    "grassmannian_keys",
    "hyperplane_members",
    "parse_appendix_text",
    "read_code_file",
    "sub_subspaces",
    "subspace_distance",
    "vec_mat_table",
]
