"""Finite matrix groups over GF(2).

Group elements are stored as row-major packed ints (see ``gf2.pack_rows``);
generators stay ``BitMatrix`` values.  Right action everywhere: a subspace
``K`` maps to ``K @ M``.
"""

from __future__ import annotations

import math
import random
from collections import Counter, deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from .geometry import Subspace, act_key, gaussian_binomial, grassmannian_keys
from .gf2 import (
    BitMatrix,
    GF2Poly,
    SingularMatrixError,
    block_diag,
    companion,
    identity_rows,
    intertwiner_basis,
    inverse_rows,
    irreducibles,
    is_invertible_rows,
    iter_span,
    kernel_basis,
    mul_rows,
    order_rows,
    pack_rows,
    poly_eval_rows,
    poly_mul,
    poly_pow,
    pow_rows,
    rank_rows,
    unpack_rows,
    vec_mat_table,
)

CLOSURE_CAP = 10**6


class GroupTooLarge(RuntimeError):
    pass


class NotConjugate(ValueError):
    pass


@dataclass(frozen=True)
class MatrixGroup:
    """Generated subgroup of GL(n, 2), optionally with its full element set."""

    n: int
    generators: tuple[BitMatrix, ...]
    elements: frozenset[int] | None = None
    order: int | None = None
    name: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        for g in self.generators:
            if g.shape != (self.n, self.n):
                raise ValueError(f"generator shape {g.shape} in a group of degree {self.n}")
            if not is_invertible_rows(g.rows):
                raise SingularMatrixError("group generator is singular")
        if self.elements is not None and self.order is None:
            object.__setattr__(self, "order", len(self.elements))

    @property
    def is_closed(self) -> bool:
        return self.elements is not None

    def matrices(self) -> list[BitMatrix]:
        if self.elements is None:
            raise ValueError("group has no explicit element list; call closure() first")
        return [BitMatrix(unpack_rows(e, self.n, self.n), self.n) for e in sorted(self.elements)]

    def element_rows(self) -> list[tuple[int, ...]]:
        if self.elements is None:
            raise ValueError("group has no explicit element list; call closure() first")
        return [unpack_rows(e, self.n, self.n) for e in sorted(self.elements)]

    def __contains__(self, m: BitMatrix) -> bool:
        if self.elements is None:
            raise ValueError("membership needs an explicit element list")
        return m.pack() in self.elements

    def with_name(self, name: str) -> "MatrixGroup":
        return MatrixGroup(self.n, self.generators, self.elements, self.order, name)


def pack(rows: Sequence[int]) -> int:
    return pack_rows(rows, len(rows))


def unpack(key: int, n: int) -> tuple[int, ...]:
    return unpack_rows(key, n, n)


def closure(
    gens: Iterable[BitMatrix], n: int | None = None, cap: int = CLOSURE_CAP, name: str | None = None
) -> MatrixGroup:
    """Breadth-first product closure of a generator set."""
    gens = tuple(gens)
    if n is None:
        if not gens:
            raise ValueError("need n for an empty generator list")
        n = gens[0].ncols
    for g in gens:
        if not is_invertible_rows(g.rows):
            raise SingularMatrixError("group generator is singular")
    tables = [vec_mat_table(g.rows) for g in gens]
    ident = identity_rows(n)
    start = pack_rows(ident, n)
    seen = {start}
    queue = deque([ident])
    while queue:
        x = queue.popleft()
        for t in tables:
            y = tuple(t[r] for r in x)
            key = pack_rows(y, n)
            if key not in seen:
                seen.add(key)
                if len(seen) > cap:
                    raise GroupTooLarge(f"group order exceeds cap {cap}")
                queue.append(y)
    return MatrixGroup(n, gens, frozenset(seen), len(seen), name)


def closed(group: MatrixGroup, cap: int = CLOSURE_CAP) -> MatrixGroup:
    if group.is_closed:
        return group
    return closure(group.generators, group.n, cap, group.name)


def trivial_group(n: int) -> MatrixGroup:
    return closure((), n, name="1")


def gl_generators(n: int) -> tuple[BitMatrix, ...]:
    """Elementary transvections I + E_{i,i+1} and I + E_{i+1,i}; they generate GL(n, 2)."""
    gens = []
    for i in range(n - 1):
        for a, b in ((i, i + 1), (i + 1, i)):
            rows = list(identity_rows(n))
            rows[a] ^= 1 << (n - 1 - b)
            gens.append(BitMatrix(tuple(rows), n))
    return tuple(gens)


def cyclic_group(m: BitMatrix, name: str | None = None) -> MatrixGroup:
    return closure((m,), m.ncols, name=name)


def conjugate_group(group: MatrixGroup, g: BitMatrix) -> MatrixGroup:
    """``g^-1 U g``."""
    ginv = inverse_rows(g.rows)
    n = group.n

    def conj(rows):
        return mul_rows(mul_rows(ginv, rows), g.rows)

    gens = tuple(BitMatrix(conj(x.rows), n) for x in group.generators)
    elements = None
    if group.elements is not None:
        elements = frozenset(pack_rows(conj(unpack(e, n)), n) for e in group.elements)
    return MatrixGroup(n, gens, elements, group.order, group.name)


def is_group_closed_set(elements: Iterable[int], n: int) -> bool:
    """Check a finite element set contains I and is closed under products."""
    els = set(elements)
    if pack_rows(identity_rows(n), n) not in els:
        return False
    rows = [unpack(e, n) for e in els]
    tables = [vec_mat_table(r) for r in rows]
    for a in rows:
        for t in tables:
            if pack_rows(tuple(t[x] for x in a), n) not in els:
                return False
    return True


# ------------------------------------------------------------------ orbit spaces


def type_string(sizes: Iterable[int]) -> str:
    """Orbit type ``c1^n1 c2^n2 ...`` with sizes ascending."""
    counts = Counter(sizes)
    return " ".join(f"{c}^{counts[c]}" for c in sorted(counts))


@dataclass
class OrbitSpace:
    n: int
    k: int
    group_order: int | None
    transversal: list[Subspace]
    orbits: list[list[int]]
    orbit_of: dict[int, tuple[int, int]] = field(repr=False)

    @property
    def sizes(self) -> list[int]:
        return [len(o) for o in self.orbits]

    @property
    def type_string(self) -> str:
        return type_string(self.sizes)

    def __len__(self) -> int:
        return len(self.orbits)

    def rep_index(self, s: Subspace | int) -> int:
        key = s if isinstance(s, int) else s.key
        return self.orbit_of[key][0]


def orbit_space(n: int, k: int, group: MatrixGroup, keys: Sequence[int] | None = None) -> OrbitSpace:
    """Partition the k-subspaces of F_2^n into orbits.

    Keys are visited in increasing order, so every representative is the
    key-minimal member of its orbit.  Only the generators are used.
    """
    if keys is None:
        keys = grassmannian_keys(n, k)
    tables = [vec_mat_table(g.rows) for g in group.generators]
    orbit_of: dict[int, tuple[int, int]] = {}
    transversal: list[Subspace] = []
    orbits: list[list[int]] = []
    for key in keys:
        if key in orbit_of:
            continue
        idx = len(orbits)
        orbit = [key]
        seen = {key}
        i = 0
        while i < len(orbit):
            x = orbit[i]
            i += 1
            for t in tables:
                y = act_key(x, k, n, t)
                if y not in seen:
                    seen.add(y)
                    orbit.append(y)
        orbit.sort()
        size = len(orbit)
        for y in orbit:
            orbit_of[y] = (idx, size)
        orbits.append(orbit)
        transversal.append(Subspace.from_key(key, k, n))
    order = group.order if group.order is not None else None
    return OrbitSpace(n, k, order, transversal, orbits, orbit_of)


def subspace_stabilizer(s: Subspace, group: MatrixGroup) -> list[int]:
    """Elements of a closed group mapping ``s`` to itself (brute force)."""
    n = group.n
    out = []
    for e in closed(group).elements:
        t = vec_mat_table(unpack(e, n))
        if act_key(s.key, s.dim, n, t) == s.key:
            out.append(e)
    return out


# --------------------------------------------------------- element conjugacy


@lru_cache(maxsize=None)
def _irreducibles(n: int) -> tuple[GF2Poly, ...]:
    return tuple(sorted(irreducibles(n, include_x=True), key=lambda p: (p.degree, p.coeffs)))


def _nullity(rows: Sequence[int]) -> int:
    return len(rows) - rank_rows(rows)


def elementary_divisors(m: BitMatrix | Sequence[int]) -> tuple[tuple[int, tuple[int, ...]], ...]:
    """Complete GL(n,2)-conjugacy invariant of a square matrix.

    Sorted tuple of ``(p.coeffs, partition)`` over irreducible ``p``: the
    partition lists the exponents of ``p`` in the primary decomposition, read
    off from ``dim ker p(M)^j``.
    """
    rows = tuple(m.rows) if isinstance(m, BitMatrix) else tuple(m)
    n = len(rows)
    remaining = n
    out = []
    for p in _irreducibles(n):
        if p.degree > remaining:
            break
        a = poly_eval_rows(p, rows)
        null = _nullity(a)
        if null == 0:
            continue
        nulls = [0, null]
        power = a
        while True:
            power = mul_rows(power, a)
            nxt = _nullity(power)
            if nxt == nulls[-1]:
                break
            nulls.append(nxt)
        d = p.degree
        ge = [(nulls[j] - nulls[j - 1]) // d for j in range(1, len(nulls))]
        parts = []
        for j in range(len(ge)):
            nxt = ge[j + 1] if j + 1 < len(ge) else 0
            parts += [j + 1] * (ge[j] - nxt)
        parts.sort(reverse=True)
        out.append((p.coeffs, tuple(parts)))
        remaining -= nulls[-1]
        if remaining == 0:
            break
    return tuple(sorted(out))


def invariant_factors_from_elementary(ed) -> tuple[GF2Poly, ...]:
    """Divisibility chain f1 | f2 | ... | fr (no unit factors)."""
    r = max((len(parts) for _, parts in ed), default=0)
    chain = []
    for i in range(r):
        f = GF2Poly(1)
        for coeffs, parts in ed:
            if i < len(parts):
                f = poly_mul(f, poly_pow(GF2Poly(coeffs), parts[i]))
        chain.append(f)
    return tuple(reversed(chain))


def invariant_factors(m: BitMatrix) -> tuple[GF2Poly, ...]:
    return invariant_factors_from_elementary(elementary_divisors(m))


def fixed_space_dim(m: BitMatrix | Sequence[int]) -> int:
    rows = tuple(m.rows) if isinstance(m, BitMatrix) else tuple(m)
    n = len(rows)
    ident = identity_rows(n)
    return _nullity(tuple(a ^ b for a, b in zip(rows, ident)))


def fixed_space(m: BitMatrix) -> BitMatrix:
    """Basis of ``{v : v @ M = v}`` as rows."""
    return kernel_basis((m + BitMatrix.identity(m.ncols)).transpose())


@dataclass(frozen=True)
class RcfClass:
    invariant_factors: tuple[GF2Poly, ...]
    representative: BitMatrix
    elementary: tuple[tuple[int, tuple[int, ...]], ...]
    order: int | None

    @property
    def fixed_dim(self) -> int:
        return fixed_space_dim(self.representative)

    @property
    def is_invertible(self) -> bool:
        return all(f.coeffs & 1 for f in self.invariant_factors)

    def label(self) -> str:
        return " | ".join(f.to_bitstring() for f in self.invariant_factors)


def _partitions(m: int, max_part: int | None = None):
    if max_part is None:
        max_part = m
    if m == 0:
        yield ()
        return
    for first in range(min(m, max_part), 0, -1):
        for rest in _partitions(m - first, first):
            yield (first,) + rest


def _elementary_configs(n: int, polys: list[GF2Poly], start: int = 0):
    if n == 0:
        yield ()
        return
    for i in range(start, len(polys)):
        d = polys[i].degree
        if d > n:
            break
        for mult in range(1, n // d + 1):
            for parts in _partitions(mult):
                for rest in _elementary_configs(n - d * mult, polys, i + 1):
                    yield ((polys[i].coeffs, parts),) + rest


def rcf_representative(ed) -> BitMatrix:
    blocks = [companion(f) for f in invariant_factors_from_elementary(ed) if f.degree > 0]
    return block_diag(blocks)


def rcf_class_reps(n: int, order_filter: int | None = None) -> list[RcfClass]:
    """One Frobenius-normal-form representative per conjugacy class of GL(n, 2)."""
    if n > 10:
        raise ValueError("class enumeration is limited to n <= 10")
    polys = sorted(irreducibles(n), key=lambda p: (p.degree, p.coeffs))
    out = []
    for ed in _elementary_configs(n, polys):
        ed = tuple(sorted(ed))
        rep = rcf_representative(ed)
        order = order_rows(rep.rows, cap=CLOSURE_CAP)
        if order_filter is not None and order != order_filter:
            continue
        out.append(RcfClass(invariant_factors_from_elementary(ed), rep, ed, order))
    return out


def cyclic_subgroup_classes(n: int, m: int) -> list[MatrixGroup]:
    """One cyclic group per conjugacy class of cyclic subgroups of order m.

    Element classes are fused when one representative's k-th power, for k
    coprime to m, falls in the other class.
    """
    if m < 2:
        raise ValueError("order must be at least 2")
    classes = rcf_class_reps(n, order_filter=m)
    index = {c.elementary: i for i, c in enumerate(classes)}
    parent = list(range(len(classes)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, c in enumerate(classes):
        for k in range(2, m):
            if math.gcd(k, m) != 1:
                continue
            j = index[elementary_divisors(pow_rows(c.representative.rows, k))]
            a, b = find(i), find(j)
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups = []
    for i, c in enumerate(classes):
        if find(i) == i:
            g = cyclic_group(c.representative, name=f"C{m}[{c.label()}]")
            groups.append(g)
    return groups


def are_conjugate(a: BitMatrix, b: BitMatrix) -> bool:
    return elementary_divisors(a) == elementary_divisors(b)


def conjugator(a: BitMatrix, b: BitMatrix, seed: int = 0, tries: int = 4096) -> BitMatrix:
    """Some invertible g with ``g^-1 @ a @ g == b``.

    The solutions of ``a @ g == g @ b`` form a linear space; its invertible
    members are sampled at random, and enumerated exhaustively if sampling
    fails.
    """
    if a.shape != b.shape or not a.is_square():
        raise ValueError("conjugator needs square matrices of equal size")
    if elementary_divisors(a) != elementary_divisors(b):
        raise NotConjugate("matrices have different invariant factors")
    basis = intertwiner_basis(a.rows, b.rows)
    n = a.ncols
    rng = random.Random(seed)
    for _ in range(tries):
        x = 0
        for v in basis:
            if rng.getrandbits(1):
                x ^= v
        rows = unpack(x, n)
        if is_invertible_rows(rows):
            return BitMatrix(rows, n)
    for x in iter_span(basis):
        rows = unpack(x, n)
        if is_invertible_rows(rows):
            return BitMatrix(rows, n)
    raise NotConjugate("no invertible intertwiner")  # unreachable for conjugate inputs


def involution_count(n: int) -> int:
    """Number of elements of order 2 in GL(n, 2).

    Sum over the rank r of M + I: choose its kernel (an (n-r)-space) and an
    injective map from the r-dimensional quotient into that kernel.
    """
    if n > 30:
        raise ValueError("n must be at most 30")
    total = 0
    for r in range(1, n // 2 + 1):
        maps = math.prod(2 ** (n - r) - 2**i for i in range(r))
        total += gaussian_binomial(n, r) * maps
    return total


# ------------------------------------------------------------------ fingerprints


@dataclass(frozen=True)
class AbstractTypeLabel:
    name: str
    ambiguous: bool
    order: int
    order_histogram: tuple[tuple[int, int], ...]
    center_order: int
    derived_order: int
    abelian_invariants: tuple[int, ...] | None

    def __str__(self) -> str:
        return f"Ambiguous({self.fingerprint()})" if self.ambiguous else self.name

    def fingerprint(self) -> str:
        hist = ",".join(f"{o}:{c}" for o, c in self.order_histogram)
        return f"order={self.order} orders={{{hist}}} |Z|={self.center_order} |G'|={self.derived_order}"

    @property
    def is_klein_four(self) -> bool:
        return self.abelian_invariants == (2, 2)


def _element_order_packed(e: int, n: int, cap: int) -> int:
    return order_rows(unpack(e, n), cap)


def _abelian_invariants(order: int, hist: Counter) -> tuple[int, ...]:
    """Invariant factors (descending) of an abelian group from its order statistics."""
    factors: dict[int, list[int]] = {}
    x = order
    p = 2
    primes = []
    while x > 1:
        if x % p == 0:
            primes.append(p)
            while x % p == 0:
                x //= p
        p += 1
    for p in primes:
        logs = [0]
        j = 1
        while True:
            cnt = sum(c for o, c in hist.items() if (p**j) % o == 0 and _is_p_power(o, p))
            logs.append(round(math.log(cnt, p)))
            if logs[-1] == logs[-2]:
                break
            j += 1
        ge = [logs[i] - logs[i - 1] for i in range(1, len(logs))]
        exps = []
        for i in range(len(ge)):
            nxt = ge[i + 1] if i + 1 < len(ge) else 0
            exps += [i + 1] * (ge[i] - nxt)
        factors[p] = sorted(exps, reverse=True)
    r = max((len(v) for v in factors.values()), default=0)
    inv = []
    for i in range(r):
        d = 1
        for p, exps in factors.items():
            if i < len(exps):
                d *= p ** exps[i]
        inv.append(d)
    return tuple(inv)


def _is_p_power(o: int, p: int) -> bool:
    while o % p == 0:
        o //= p
    return o == 1


# nonabelian types keyed by (order, sorted element-order histogram)
_NONABELIAN = {
    (6, ((1, 1), (2, 3), (3, 2))): "S_3",
    (8, ((1, 1), (2, 5), (4, 2))): "D_8",
    (8, ((1, 1), (2, 1), (4, 6))): "Q_8",
    (10, ((1, 1), (2, 5), (5, 4))): "D_10",
    (12, ((1, 1), (2, 3), (3, 8))): "A_4",
    (12, ((1, 1), (2, 7), (3, 2), (6, 2))): "D_12",
    (12, ((1, 1), (2, 1), (3, 2), (4, 6), (6, 2))): "Z_3 : Z_4",
    (14, ((1, 1), (2, 7), (7, 6))): "D_14",
    (18, ((1, 1), (2, 9), (3, 2), (9, 6))): "D_18",
    (18, ((1, 1), (2, 3), (3, 8), (6, 6))): "Z_3 x S_3",
    (18, ((1, 1), (2, 9), (3, 8))): "(Z_3 x Z_3) : Z_2",
    (21, ((1, 1), (3, 14), (7, 6))): "Z_7 : Z_3",
}


def _commutator_subgroup(els: list[tuple[int, ...]], n: int) -> int:
    comms = set()
    inv = [inverse_rows(x) for x in els]
    for i, x in enumerate(els):
        for j, y in enumerate(els):
            c = mul_rows(mul_rows(inv[i], inv[j]), mul_rows(x, y))
            comms.add(c)
    gens = [BitMatrix(c, n) for c in comms]
    return closure(gens, n).order


def fingerprint(group: MatrixGroup) -> AbstractTypeLabel:
    """Name the abstract type of a small group from coarse invariants."""
    g = closed(group)
    order = g.order
    if order > 64:
        raise ValueError("fingerprint is limited to groups of order <= 64")
    n = g.n
    els = g.element_rows()
    hist = Counter(order_rows(x, order) for x in els)
    hist_t = tuple(sorted(hist.items()))
    gens = [x.rows for x in g.generators]
    center = 0
    for x in els:
        if all(mul_rows(x, y) == mul_rows(y, x) for y in gens):
            center += 1
    abelian = center == order
    derived = 1 if abelian else _commutator_subgroup(els, n)
    if abelian:
        inv = _abelian_invariants(order, hist)
        name = " x ".join(f"Z_{d}" for d in inv) if inv else "Z_1"
        return AbstractTypeLabel(name, False, order, hist_t, center, derived, inv)
    name = _NONABELIAN.get((order, hist_t))
    if name is None:
        return AbstractTypeLabel(f"order-{order} group", True, order, hist_t, center, derived, None)
    return AbstractTypeLabel(name, False, order, hist_t, center, derived, None)


def normalize_type_name(label: str) -> str:
    s = label.replace("\\rtimes", ":").replace("\\times", "x").replace("{", "").replace("}", "")
    s = s.replace("⋊", ":").replace("×", "x")
    return " ".join(s.split())


def subgroups_of_order(group: MatrixGroup, order: int, max_gens: int = 2) -> list[frozenset[int]]:
    """Brute-force list of subgroups of a given order generated by <= max_gens elements."""
    g = closed(group)
    n = g.n
    els = sorted(g.elements)
    cand = [e for e in els if order % _element_order_packed(e, n, g.order) == 0]
    found: set[frozenset[int]] = set()

    def grow(current: frozenset[int], gens: list[int], start: int):
        if len(current) == order:
            found.add(current)
            return
        if len(gens) == max_gens:
            return
        for idx in range(start, len(cand)):
            e = cand[idx]
            if e in current:
                continue
            try:
                sub = closure([BitMatrix(unpack(x, n), n) for x in gens + [e]], n, cap=order)
            except GroupTooLarge:
                continue
            if order % sub.order:
                continue
            if sub.elements in seen_prefix:
                continue
            seen_prefix.add(sub.elements)
            grow(sub.elements, gens + [e], idx + 1)

    seen_prefix: set[frozenset[int]] = set()
    grow(frozenset([pack_rows(identity_rows(n), n)]), [], 0)
    return sorted(found, key=lambda s: sorted(s))


def consistent_with_split_extension(group: MatrixGroup, normal_type: str, complement_order: int) -> bool:
    """Is there a normal subgroup N of the given type with a complement of prime order?"""
    g = closed(group)
    n = g.n
    target = normalize_type_name(normal_type)
    sub_order = g.order // complement_order
    if sub_order * complement_order != g.order:
        return False
    gens = [x.rows for x in g.generators]
    for sub in subgroups_of_order(g, sub_order, max_gens=3):
        normal = True
        for y in gens:
            yinv = inverse_rows(y)
            for e in sub:
                if pack_rows(mul_rows(mul_rows(yinv, unpack(e, n)), y), n) not in sub:
                    normal = False
                    break
            if not normal:
                break
        if not normal:
            continue
        sg = MatrixGroup(n, tuple(BitMatrix(unpack(e, n), n) for e in sub), sub, len(sub))
        if fingerprint(sg).name != target:
            continue
        outside = [e for e in g.elements if e not in sub]
        if any(_element_order_packed(e, n, g.order) == complement_order for e in outside):
            return True
    return False


def _kernel_of_images(images: Sequence[int]) -> list[int]:
    """Combinations (bitmask over inputs) whose images XOR to zero."""
    piv: dict[int, tuple[int, int]] = {}
    kernel = []
    for v, img in enumerate(images):
        combo = 1 << v
        while img:
            top = img.bit_length() - 1
            if top not in piv:
                piv[top] = (img, combo)
                break
            pi, pc = piv[top]
            img ^= pi
            combo ^= pc
        if img == 0:
            kernel.append(combo)
    return kernel


def common_intertwiners(pairs: Sequence[tuple[Sequence[int], Sequence[int]]], n: int) -> list[int]:
    """Packed basis of {X : a X = X b for every (a, b)}."""
    nn = n * n
    images = []
    for v in range(nn):
        e = unpack_rows(1 << (nn - 1 - v), n, n)
        img = 0
        for a, b in pairs:
            d = tuple(x ^ y for x, y in zip(mul_rows(a, e), mul_rows(e, b)))
            img = (img << nn) | pack_rows(d, n)
        images.append(img)
    out = []
    for combo in _kernel_of_images(images):
        x = 0
        for v in range(nn):
            if (combo >> v) & 1:
                x |= 1 << (nn - 1 - v)
        out.append(x)
    return out


def subgroup_conjugator(a: MatrixGroup, b: MatrixGroup, dim_cap: int = 24, seed: int = 0) -> BitMatrix | None:
    """Some g with g^-1 A g = B for small closed groups, or None if none exists.

    Each generator of A is sent to every element of B with the same
    invariant factors; each assignment is a linear system in g.
    """
    A, B = closed(a), closed(b)
    if A.order != B.order or A.n != B.n:
        return None
    n = A.n
    if A.elements == B.elements:
        return BitMatrix.identity(n)
    gens = [g.rows for g in A.generators]
    targets = []
    for g in gens:
        ed = elementary_divisors(g)
        targets.append([unpack(e, n) for e in sorted(B.elements) if elementary_divisors(unpack(e, n)) == ed])
    rng = random.Random(seed)
    inconclusive = False

    def search(i: int, chosen: list[tuple[int, ...]]):
        nonlocal inconclusive
        if i == len(gens):
            basis = common_intertwiners(list(zip(gens, chosen)), n)
            if not basis:
                return None
            for _ in range(256):
                x = 0
                for v in basis:
                    if rng.getrandbits(1):
                        x ^= v
                rows = unpack(x, n)
                if is_invertible_rows(rows):
                    return rows
            if len(basis) <= dim_cap:
                for x in iter_span(basis):
                    rows = unpack(x, n)
                    if is_invertible_rows(rows):
                        return rows
            else:
                inconclusive = True
            return None
        for t in targets[i]:
            got = search(i + 1, chosen + [t])
            if got is not None:
                return got
        return None

    rows = search(0, [])
    if rows is None:
        if inconclusive:
            raise RuntimeError("solution space above the enumeration cap; conjugacy undecided")
        return None
    g = BitMatrix(rows, n)
    if conjugate_group(A, g).elements != B.elements:
        raise AssertionError("conjugator does not map the groups onto each other")
    return g
