"""Centralizers and normalizers of cyclic matrix groups, and the prime-index ladder.

The normalizer of <c> is the union over k coprime to ord(c) of the invertible
solutions of ``c @ g == g @ c^k``.  Each such slice is a coset of the
centralizer algebra, so it is enumerated as a linear span.
"""

from __future__ import annotations

import math
import random
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Sequence

from .gf2 import (
    BitMatrix,
    block_diag,
    identity_rows,
    intertwiner_basis,
    inverse_rows,
    mul_rows,
    order_rows,
    pack_rows,
    pow_rows,
    unpack_rows,
)
from .groups import MatrixGroup, closed, closure, conjugator, elementary_divisors, gl_generators

CENTRALIZER_DIM_CAP = 24


class CentralizerTooLarge(RuntimeError):
    pass


@dataclass(frozen=True)
class CentralizerAlgebra:
    """Matrices commuting with ``m``, as a GF(2)-linear span."""

    m: BitMatrix
    basis: tuple[BitMatrix, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)


def centralizer_basis(m: BitMatrix) -> CentralizerAlgebra:
    if not m.is_square():
        raise ValueError("centralizer needs a square matrix")
    n = m.ncols
    basis = intertwiner_basis(m.rows, m.rows)
    return CentralizerAlgebra(m, tuple(BitMatrix(unpack_rows(x, n, n), n) for x in basis))


def _is_invertible(rows: list[int]) -> bool:
    piv: list[int] = []
    for v in rows:
        for b in piv:
            v = min(v, v ^ b)
        if v == 0:
            return False
        piv.append(v)
    return True


def invertible_in_span(basis_packed: list[int], n: int) -> list[int]:
    """Packed invertible matrices in the span of ``basis_packed`` (Gray-code walk)."""
    brows = [unpack_rows(x, n, n) for x in basis_packed]
    cur = [0] * n
    out = []
    for i in range(1, 1 << len(brows)):
        d = brows[(i & -i).bit_length() - 1]
        for r in range(n):
            cur[r] ^= d[r]
        if _is_invertible(cur):
            out.append(pack_rows(cur, n))
    return out


@dataclass
class NormalizerResult:
    group: MatrixGroup
    centralizer_dim: int
    slices: dict[int, int]  # k -> number of invertible solutions (0 = empty slice)


def _generators_for(elements: frozenset[int], n: int, seed: int = 0) -> tuple[BitMatrix, ...]:
    """A small generating set, checked by closure."""
    order = len(elements)
    if order == 1:
        return ()
    pool = sorted(elements)
    rng = random.Random(seed)
    gens: list[int] = []
    cur = 1
    for _ in range(64):
        gens.append(rng.choice(pool))
        mats = [BitMatrix(unpack_rows(g, n, n), n) for g in gens]
        cur = closure(mats, n, cap=order).order
        if cur == order:
            return tuple(mats)
    raise RuntimeError("failed to find generators")  # pragma: no cover


def normalizer_of_cyclic(
    c: BitMatrix, dim_cap: int = CENTRALIZER_DIM_CAP, seed: int = 0
) -> NormalizerResult:
    """N_GL(<c>) by enumerating each slice ``c g = g c^k``."""
    n = c.ncols
    m = order_rows(c.rows)
    if m == 1:
        raise ValueError("the normalizer of the trivial group is all of GL(n, 2)")
    cent = intertwiner_basis(c.rows, c.rows)
    if len(cent) > dim_cap:
        raise CentralizerTooLarge(f"centralizer dimension {len(cent)} exceeds cap {dim_cap}")
    elements: set[int] = set()
    slices: dict[int, int] = {}
    for k in range(1, m):
        if math.gcd(k, m) != 1:
            continue
        ck = pow_rows(c.rows, k)
        basis = intertwiner_basis(c.rows, ck)
        sols = invertible_in_span(basis, n) if basis else []
        slices[k] = len(sols)
        elements.update(sols)
    frozen = frozenset(elements)
    gens = _generators_for(frozen, n, seed)
    group = MatrixGroup(n, gens, frozen, len(frozen), "N(<c>)")
    return NormalizerResult(group, len(cent), slices)


# -------------------------------------------------------------------- ladder


@dataclass
class LadderInput:
    """Pairs (T, N) with T normal in N; extend each T to order u inside N."""

    pairs: list[tuple[MatrixGroup, MatrixGroup]]
    t: int
    u: int
    ambient: MatrixGroup | None = None  # fuse up to conjugacy in this group instead of GL

    def __post_init__(self):
        if self.u % self.t:
            raise ValueError("t must divide u")
        p = self.u // self.t
        if p < 2 or any(p % q == 0 for q in range(2, math.isqrt(p) + 1)):
            raise ValueError("only prime index u/t is implemented")


@dataclass
class LadderResult:
    groups: list[MatrixGroup]
    lower: int
    upper: int
    per_pair: list[int] = field(default_factory=list)  # N-classes found per pair
    log: list[str] = field(default_factory=list)

    @property
    def exact(self) -> bool:
        return self.lower == self.upper


def _conj_set(els: frozenset[int], x: tuple[int, ...], xinv: tuple[int, ...], n: int) -> frozenset[int]:
    return frozenset(pack_rows(mul_rows(mul_rows(xinv, unpack_rows(e, n, n)), x), n) for e in els)


def _generator(group: MatrixGroup) -> tuple[int, ...] | None:
    """A generator if the closed group is cyclic."""
    g = closed(group)
    for e in sorted(g.elements):
        rows = unpack_rows(e, g.n, g.n)
        if order_rows(rows, cap=g.order) == g.order:
            return rows
    return None


def _cyclic_signature(gen: tuple[int, ...], m: int):
    return min(elementary_divisors(pow_rows(gen, k)) for k in range(1, m) if math.gcd(k, m) == 1) if m > 1 else ()


def _class_invariant(els: frozenset[int], n: int):
    """Conjugation-invariant summary used to separate classes."""
    return tuple(sorted(Counter(elementary_divisors(unpack_rows(e, n, n)) for e in els).items()))


def is_normal_in(sub: frozenset[int], gens: tuple[BitMatrix, ...], n: int) -> bool:
    for g in gens:
        if _conj_set(sub, g.rows, inverse_rows(g.rows), n) != sub:
            return False
    return True


def _extensions(T: MatrixGroup, N: MatrixGroup, p: int) -> list[frozenset[int]]:
    """All <T, g> with g in N \\ T and g^p in T."""
    n = T.n
    tel = closed(T).elements
    tmats = list(T.generators)
    found: dict[frozenset[int], None] = {}
    covered: set[int] = set(tel)
    for e in sorted(closed(N).elements):
        if e in covered:
            continue
        rows = unpack_rows(e, n, n)
        if pack_rows(pow_rows(rows, p), n) not in tel:
            continue
        u = closure(tmats + [BitMatrix(rows, n)], n, cap=len(tel) * p).elements
        found.setdefault(u, None)
        covered.update(u)
    return list(found)


def _orbit_partition(cands: list[frozenset[int]], gens: tuple[BitMatrix, ...], n: int) -> list[int]:
    """Class id per candidate under conjugation by the group generated by ``gens``."""
    index = {c: i for i, c in enumerate(cands)}
    cls = [-1] * len(cands)
    invs = [(g.rows, inverse_rows(g.rows)) for g in gens]
    nxt = 0
    for i in range(len(cands)):
        if cls[i] >= 0:
            continue
        cls[i] = nxt
        stack = [cands[i]]
        while stack:
            s = stack.pop()
            for x, xinv in invs:
                y = _conj_set(s, x, xinv, n)
                j = index.get(y)
                if j is None:
                    raise AssertionError("conjugate of a ladder group missing from the candidate list")
                if cls[j] < 0:
                    cls[j] = nxt
                    stack.append(y)
        nxt += 1
    return cls


def ladder_search(inp: LadderInput) -> LadderResult:
    p = inp.u // inp.t
    log: list[str] = []
    per_pair_cands: list[list[frozenset[int]]] = []
    per_pair_cls: list[list[int]] = []
    n = inp.pairs[0][0].n if inp.pairs else 7
    for idx, (T, N) in enumerate(inp.pairs):
        T, N = closed(T), closed(N)
        if T.order != inp.t:
            raise ValueError(f"pair {idx}: |T| = {T.order}, expected {inp.t}")
        if not is_normal_in(T.elements, N.generators, n):
            raise ValueError(f"pair {idx}: T is not normal in N")
        cands = _extensions(T, N, p)
        cls = _orbit_partition(cands, N.generators, n)
        per_pair_cands.append(cands)
        per_pair_cls.append(cls)
        log.append(f"pair {idx}: |N| = {N.order}, {len(cands)} extensions, {max(cls) + 1 if cls else 0} N-classes")

    # one node per (pair, N-class)
    nodes: list[tuple[int, int]] = []
    node_of: dict[tuple[int, int], int] = {}
    for i, cls in enumerate(per_pair_cls):
        for c in sorted(set(cls)):
            node_of[(i, c)] = len(nodes)
            nodes.append((i, c))
    parent = list(range(len(nodes)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        a, b = find(a), find(b)
        if a != b:
            parent[max(a, b)] = min(a, b)

    reps: list[frozenset[int]] = []
    for i, c in nodes:
        reps.append(per_pair_cands[i][per_pair_cls[i].index(c)])
    lookup = [{s: per_pair_cls[i][j] for j, s in enumerate(per_pair_cands[i])} for i in range(len(inp.pairs))]
    unknown = False

    if inp.ambient is not None:
        H = closed(inp.ambient)
        keyed: dict[frozenset[int], int] = {}
        hinv = [(g.rows, inverse_rows(g.rows)) for g in H.generators]
        for a, s in enumerate(reps):
            seen = {s}
            stack = [s]
            while stack:
                x = stack.pop()
                if x in keyed:
                    union(a, keyed[x])
                for y, yinv in hinv:
                    z = _conj_set(x, y, yinv, n)
                    if z not in seen:
                        seen.add(z)
                        stack.append(z)
            for x in seen:
                keyed.setdefault(x, a)
        log.append(f"fused up to conjugacy in an ambient group of order {H.order}")
    else:
        tgens = [_generator(T) for T, _ in inp.pairs]
        tsig = [None if g is None else _cyclic_signature(g, inp.t) for g in tgens]
        if any(g is None for g in tgens) and inp.t > 1:
            unknown = True
            log.append("a non-cyclic T: cross-pair fusion not attempted for it")
        cyc_sig: dict = {}
        for a, s in enumerate(reps):
            g = _generator(MatrixGroup(n, (), s, len(s)))
            if g is not None:
                sig = _cyclic_signature(g, inp.u)
                if sig in cyc_sig:
                    union(a, cyc_sig[sig])
                else:
                    cyc_sig[sig] = a
                continue
            if inp.t == 1:
                continue
            # anchors: cyclic normal subgroups of order t inside s
            sub_gens = [BitMatrix(unpack_rows(e, n, n), n) for e in sorted(s)]
            seen_a: set[frozenset[int]] = set()
            for e in sorted(s):
                rows = unpack_rows(e, n, n)
                if order_rows(rows, cap=inp.u) != inp.t:
                    continue
                A = closure([BitMatrix(rows, n)], n, cap=inp.t).elements
                if A in seen_a or not is_normal_in(A, tuple(sub_gens), n):
                    continue
                seen_a.add(A)
                for j, tg in enumerate(tgens):
                    if tg is None or _cyclic_signature(rows, inp.t) != tsig[j]:
                        continue
                    ed = None
                    for k in range(1, inp.t):
                        if math.gcd(k, inp.t) != 1:
                            continue
                        ak = pow_rows(rows, k)
                        if elementary_divisors(ak) == elementary_divisors(tg):
                            ed = ak
                            break
                    x = conjugator(BitMatrix(ed, n), BitMatrix(tg, n))
                    img = _conj_set(s, x.rows, inverse_rows(x.rows), n)
                    cj = lookup[j].get(img)
                    if cj is None:
                        raise AssertionError("transported group not found among the pair's extensions")
                    union(a, node_of[(j, cj)])

    comps: dict[int, list[int]] = defaultdict(list)
    for a in range(len(nodes)):
        comps[find(a)].append(a)
    groups = []
    for root in sorted(comps):
        i, _ = nodes[root]
        s = reps[root]
        gens = tuple(BitMatrix(unpack_rows(e, n, n), n) for e in _small_gens(s, n))
        groups.append(MatrixGroup(n, gens, s, len(s), f"U{len(groups) + 1}"))
    upper = len(groups)
    lower = upper if not unknown else len({_class_invariant(g.elements, n) for g in groups})
    return LadderResult(groups, lower, upper, [max(c) + 1 if c else 0 for c in per_pair_cls], log)


def _small_gens(els: frozenset[int], n: int) -> list[int]:
    ordered = sorted(els)
    gens: list[int] = []
    cur = frozenset([pack_rows(identity_rows(n), n)])
    for e in ordered:
        if e in cur:
            continue
        gens.append(e)
        cur = closure([BitMatrix(unpack_rows(g, n, n), n) for g in gens], n, cap=len(els)).elements
        if len(cur) == len(els):
            break
    return gens


def group_from_elements(els: frozenset[int], n: int, name: str | None = None) -> MatrixGroup:
    """Wrap a closed element set, with a short generating list."""
    gens = tuple(BitMatrix(unpack_rows(g, n, n), n) for g in _small_gens(els, n))
    return MatrixGroup(n, gens, frozenset(els), len(els), name)


def ladder_extend(inp: LadderInput) -> list[MatrixGroup]:
    return ladder_search(inp).groups


def drop_containing(groups: list[MatrixGroup], excluded: list[MatrixGroup]) -> list[MatrixGroup]:
    """Remove groups that contain a conjugate of an excluded cyclic group."""
    sigs = set()
    for x in excluded:
        g = _generator(x)
        sigs.add((x.order, _cyclic_signature(g, closed(x).order)))
    out = []
    for grp in groups:
        n = grp.n
        bad = False
        for e in grp.elements:
            rows = unpack_rows(e, n, n)
            o = order_rows(rows, cap=grp.order)
            if (o, _cyclic_signature(rows, o)) in sigs:
                bad = True
                break
        if not bad:
            out.append(grp)
    return out


# ------------------------------------------------------- brute-force helpers


def block_ambient(sizes: Sequence[int]) -> MatrixGroup:
    """Block-diagonal product of GL(s, 2) over the given block sizes."""
    n = sum(sizes)
    gens = []
    for i, s in enumerate(sizes):
        for g in gl_generators(s):
            gens.append(block_diag([g if j == i else BitMatrix.identity(t) for j, t in enumerate(sizes)]))
    return closure(gens, n, name="x".join(f"GL({s},2)" for s in sizes))


def normalizer_in(sub: MatrixGroup, ambient: MatrixGroup) -> MatrixGroup:
    """N_H(S) by testing every element of a closed ambient group."""
    H = closed(ambient)
    S = closed(sub)
    n = H.n
    keep = []
    for e in H.elements:
        rows = unpack_rows(e, n, n)
        if _conj_set(S.elements, rows, inverse_rows(rows), n) == S.elements:
            keep.append(e)
    els = frozenset(keep)
    return group_from_elements(els, n, "N_H")


def conjugacy_classes_of_subgroups(subs: list[frozenset[int]], ambient: MatrixGroup) -> list[list[frozenset[int]]]:
    """Partition subgroups into ambient-conjugacy classes (all conjugates must be present)."""
    H = closed(ambient)
    cls = _orbit_partition(subs, H.generators, H.n)
    out: dict[int, list[frozenset[int]]] = defaultdict(list)
    for s, c in zip(subs, cls):
        out[c].append(s)
    return [out[c] for c in sorted(out)]


__all__ = [
    "CENTRALIZER_DIM_CAP",
    "CentralizerAlgebra",
    "CentralizerTooLarge",
    "LadderInput",
    "LadderResult",
    "NormalizerResult",
    "centralizer_basis",
    "conjugacy_classes_of_subgroups",
    "drop_containing",
    "group_from_elements",
    "invertible_in_span",
    "is_normal_in",
    "ladder_extend",
    "ladder_search",
    "normalizer_in",
    "normalizer_of_cyclic",
    "block_ambient",
]
