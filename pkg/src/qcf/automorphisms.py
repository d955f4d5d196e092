"""Full automorphism group of a constant-dimension code.

An automorphism is fixed by the images of a basis b_1..b_n of F_2^n.  The
search walks a stabilizer chain: at level i, with b_1..b_{i-1} fixed, it
finds the orbit of b_i by searching for one automorphism per candidate image
not already reached by the generators found so far.  The group order is the
product of the orbit lengths, so large groups never need to be listed.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass

from .geometry import Code, gaussian_binomial
from .gf2 import BitMatrix, echelon_rows, gl_order, inverse_rows, mul_rows, pack_rows, vec_mat
from .groups import CLOSURE_CAP, MatrixGroup, closure, gl_generators


class SearchBudgetExceeded(RuntimeError):
    pass


@dataclass
class _Ctx:
    n: int
    words: frozenset[int]  # packed RREF keys
    word_points: dict[int, tuple[int, ...]]
    through: list[list[int]]  # point -> keys of words containing it
    inv: list[tuple]  # point invariant
    line: list[list[int]]  # line[p][q] = #words containing the line <p, q>
    deadline: float | None


def _key_of(rows, n: int) -> int:
    return pack_rows(echelon_rows(rows), n)


def _context(code: Code, deadline: float | None) -> _Ctx:
    n = code.n
    npts = 1 << n
    through: list[list[int]] = [[] for _ in range(npts)]
    word_points: dict[int, tuple[int, ...]] = {}
    line = [[0] * npts for _ in range(npts)]
    for w in code:
        pts = tuple(w.points())
        word_points[w.key] = pts
        for p in pts:
            through[p].append(w.key)
        for i, p in enumerate(pts):
            for q in pts[i + 1:]:
                line[p][q] += 1
                line[q][p] += 1
    deg = [len(t) for t in through]
    inv: list[tuple] = [()]
    for p in range(1, npts):
        nb = Counter()
        for key in through[p]:
            for q in word_points[key]:
                if q != p:
                    nb[deg[q]] += 1
        lines = Counter(line[p][q] for q in range(1, npts) if q != p)
        inv.append((deg[p], tuple(sorted(nb.items())), tuple(sorted(lines.items()))))
    return _Ctx(n, code.keys, word_points, through, inv, line, deadline)


def _choose_base(ctx: _Ctx) -> list[int]:
    """Basis picked greedily from the rarest point-invariant classes."""
    freq = Counter(ctx.inv[1:])
    base: list[int] = []
    span = {0}
    for _ in range(ctx.n):
        best = min((p for p in range(1, 1 << ctx.n) if p not in span), key=lambda p: (freq[ctx.inv[p]], p))
        base.append(best)
        span |= {v ^ best for v in span}
    return base


def _extend(ctx: _Ctx, imap: dict[int, int], b: int, c: int) -> dict[int, int] | None:
    """Add b -> c to a partial linear map, or None if an invariant breaks."""
    inv, line = ctx.inv, ctx.line
    old = list(imap.items())
    new: dict[int, int] = {}
    for v, w in [(0, 0)] + old:
        p, q = v ^ b, w ^ c
        if inv[p] != inv[q]:
            return None
        new[p] = q
    for p, q in new.items():
        for v, w in old:
            if line[p][v] != line[q][w]:
                return None
    merged = dict(imap)
    merged.update(new)
    k = ctx.n
    for p in new:
        for key in ctx.through[p]:
            pts = ctx.word_points[key]
            if all(x in merged for x in pts):
                img = _key_of([merged[x] for x in pts], k)
                if img not in ctx.words:
                    return None
    return merged


def _leaf(ctx: _Ctx, base: list[int], imap: dict[int, int], level: int) -> list[int] | None:
    """Complete a partial map to an automorphism; return the images of the base."""
    if level == len(base):
        return [imap[b] for b in base]
    if ctx.deadline is not None and time.monotonic() > ctx.deadline:
        raise SearchBudgetExceeded("automorphism search exceeded its time budget")
    b = base[level]
    target = ctx.inv[b]
    used = set(imap.values())
    for c in range(1, 1 << ctx.n):
        if c in used or ctx.inv[c] != target:
            continue
        nxt = _extend(ctx, imap, b, c)
        if nxt is None:
            continue
        found = _leaf(ctx, base, nxt, level + 1)
        if found is not None:
            return found
    return None


@dataclass
class AutomorphismResult:
    group: MatrixGroup
    base: list[int]
    orbit_lengths: list[int]

    @property
    def order(self) -> int:
        return self.group.order


def _full_gl(n: int) -> MatrixGroup:
    return MatrixGroup(n, gl_generators(n), None, gl_order(n), f"GL({n},2)")


def automorphism_search(code: Code, budget: float | None = None, element_cap: int = CLOSURE_CAP) -> AutomorphismResult:
    """Stabilizer-chain search for {M in GL(n,2) : C M = C}."""
    if len(code) == 0:
        raise ValueError("automorphisms of an empty code are not defined here")
    n, k = code.n, code.k
    if len(code) == gaussian_binomial(n, k):
        return AutomorphismResult(_full_gl(n), [1 << (n - 1 - i) for i in range(n)], [])
    deadline = None if budget is None else time.monotonic() + budget
    ctx = _context(code, deadline)
    base = _choose_base(ctx)
    binv = inverse_rows(tuple(base))
    gens: list[tuple[int, ...]] = []  # as matrices in the standard basis
    orbit_lengths = [0] * n
    for level in range(n - 1, -1, -1):
        # identity on base[:level]
        imap: dict[int, int] = {}
        for b in base[:level]:
            imap = _extend(ctx, imap, b, b)
        stab = [g for g in gens if all(vec_mat(b, g) == b for b in base[:level])]
        b = base[level]
        orbit = {b}
        frontier = [b]

        def grow():
            while frontier:
                x = frontier.pop()
                for g in stab:
                    y = vec_mat(x, g)
                    if y not in orbit:
                        orbit.add(y)
                        frontier.append(y)

        grow()
        used = set(imap.values())
        for c in range(1, 1 << n):
            if c in orbit or c in used or ctx.inv[c] != ctx.inv[b]:
                continue
            nxt = _extend(ctx, imap, b, c)
            if nxt is None:
                continue
            images = _leaf(ctx, base, nxt, level + 1)
            if images is None:
                continue
            m = mul_rows(binv, tuple(images))
            gens.append(m)
            stab.append(m)
            frontier.extend(orbit)
            grow()
        orbit_lengths[level] = len(orbit)
    order = 1
    for x in orbit_lengths:
        order *= x
    mats = tuple(BitMatrix(g, n) for g in gens)
    if order <= element_cap:
        group = closure(mats, n, cap=element_cap, name="Aut(C)")
        if group.order != order:
            raise AssertionError("stabilizer chain order disagrees with closure")
    else:
        group = MatrixGroup(n, mats, None, order, "Aut(C)")
    return AutomorphismResult(group, base, orbit_lengths)


def code_automorphisms(code: Code, budget: float | None = None) -> MatrixGroup:
    return automorphism_search(code, budget).group
