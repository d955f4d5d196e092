"""Orbit-packing models for codes with a prescribed automorphism group.

A variable is a U-orbit of k-subspaces with weight equal to its size; a row
is a U-orbit of t-subspaces, t = k - d/2 + 1.  The coefficient of variable K
in row T counts the members of the orbit K·U that contain the fixed
representative T, and a feasible selection keeps every row at most lambda.
"""

from __future__ import annotations

import logging
import re
from collections import defaultdict
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

from .geometry import Code, Subspace, act_key, gaussian_binomial
from .gf2 import BitMatrix, echelon_rows, inverse_rows, mul_rows, pack_rows, unpack_rows, vec_mat_table
from .groups import MatrixGroup, closed, orbit_space, type_string

log = logging.getLogger(__name__)


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class KMModel:
    n: int
    k: int
    t: int
    lam: int
    var_keys: tuple[int, ...]  # representative key per variable
    weights: tuple[int, ...]
    rows: tuple[tuple[int, tuple[tuple[int, int], ...]], ...]  # (row rep key, ((var, coef), ...))
    fixed_one: frozenset[int] = frozenset()
    fixed_zero: frozenset[int] = frozenset()
    closeness: tuple[tuple[int, ...], int] | None = None  # (var indices, c)
    orbits: tuple[tuple[int, ...], ...] | None = field(default=None, repr=False, compare=False)
    pruned: tuple[tuple[int, int], ...] = field(default=(), compare=False)  # (rep key, weight)
    group_order: int | None = None
    row_sizes: tuple[int, ...] = ()  # size of each row's t-orbit

    def __post_init__(self):
        if not self.row_sizes:
            object.__setattr__(self, "row_sizes", (1,) * len(self.rows))
        if len(self.row_sizes) != len(self.rows):
            raise ModelError("row_sizes must match rows")

    @property
    def num_vars(self) -> int:
        return len(self.var_keys)

    @property
    def d(self) -> int:
        return 2 * (self.k - self.t + 1)

    def var_type(self) -> str:
        return type_string(self.weights)

    def pruned_type(self) -> str:
        return type_string(w for _, w in self.pruned)

    def columns(self) -> list[list[tuple[int, int]]]:
        cols: list[list[tuple[int, int]]] = [[] for _ in self.var_keys]
        for r, (_, coeffs) in enumerate(self.rows):
            for j, m in coeffs:
                cols[j].append((r, m))
        return cols

    def objective(self, selection: Iterable[int]) -> int:
        return sum(self.weights[j] for j in selection)

    def violations(self, selection: Iterable[int]) -> list[str]:
        sel = set(selection)
        out = []
        for r, (key, coeffs) in enumerate(self.rows):
            load = sum(m for j, m in coeffs if j in sel)
            if load > self.lam:
                out.append(f"row {r} load {load} > {self.lam}")
        if not self.fixed_one <= sel:
            out.append("a fixed-one variable is unselected")
        if self.fixed_zero & sel:
            out.append("a fixed-zero variable is selected")
        if self.closeness is not None:
            idx, c = self.closeness
            got = sum(self.weights[j] for j in idx if j in sel)
            if got < c:
                out.append(f"closeness {got} < {c}")
        return out

    def is_feasible(self, selection: Iterable[int]) -> bool:
        return not self.violations(selection)

    def with_fixtures(self, one: Iterable[int] = (), zero: Iterable[int] = ()) -> "KMModel":
        return replace(self, fixed_one=self.fixed_one | frozenset(one), fixed_zero=self.fixed_zero | frozenset(zero))

    def decode(self, selection: Iterable[int]) -> Code:
        """Union of the selected orbits as a code (needs orbit lists)."""
        if self.orbits is None:
            raise ModelError("model carries no orbit lists; rebuild it from the group")
        words = []
        for j in sorted(set(selection)):
            words += [Subspace.from_key(key, self.k, self.n) for key in self.orbits[j]]
        return Code(tuple(words))

    def var_index(self) -> dict[int, int]:
        """Key of every orbit member -> variable index."""
        if self.orbits is None:
            return {key: j for j, key in enumerate(self.var_keys)}
        return {key: j for j, orb in enumerate(self.orbits) for key in orb}

    def submodel(self, keep: Sequence[int]) -> "KMModel":
        """Restrict to a subset of variables (rows keep their capacity)."""
        keep = list(keep)
        remap = {j: i for i, j in enumerate(keep)}
        rows = [(key, tuple((remap[j], m) for j, m in coeffs if j in remap)) for key, coeffs in self.rows]
        close = None
        if self.closeness is not None:
            close = (tuple(remap[j] for j in self.closeness[0] if j in remap), self.closeness[1])
        return KMModel(
            self.n, self.k, self.t, self.lam,
            tuple(self.var_keys[j] for j in keep), tuple(self.weights[j] for j in keep), tuple(rows),
            frozenset(remap[j] for j in self.fixed_one if j in remap),
            frozenset(remap[j] for j in self.fixed_zero if j in remap),
            close,
            None if self.orbits is None else tuple(self.orbits[j] for j in keep),
            self.pruned, self.group_order, self.row_sizes,
        )


def _sub_keys(key: int, k: int, t: int, n: int) -> list[int]:
    """Keys of all t-subspaces of the k-subspace with this key."""
    rows = unpack_rows(key, k, n)
    pts = [0]
    for r in rows:
        pts += [p ^ r for p in pts]
    pts = pts[1:]
    out = set()
    if t == 1:
        return sorted(pack_rows((p,), n) for p in pts)

    def grow(basis: tuple[int, ...], start: int):
        if len(basis) == t:
            out.add(pack_rows(echelon_rows(basis), n))
            return
        for i in range(start, len(pts)):
            if len(echelon_rows(basis + (pts[i],))) == len(basis) + 1:
                grow(basis + (pts[i],), i + 1)

    grow((), 0)
    return sorted(out)


def build_model(n: int, k: int, d: int, group: MatrixGroup, lam: int = 1, prune: bool = True) -> KMModel:
    if d % 2 or d < 2 or d > 2 * k:
        raise ModelError("d must be even with 2 <= d <= 2k")
    t = k - d // 2 + 1
    var_space = orbit_space(n, k, group)
    row_space = orbit_space(n, t, group)
    row_rep = {orb[0]: i for i, orb in enumerate(row_space.orbits)}  # orbits are sorted: min key is first
    for i, orb in enumerate(row_space.orbits):
        assert row_space.transversal[i].key == orb[0]
    rows: dict[int, list[tuple[int, int]]] = defaultdict(list)
    keep_keys, keep_w, keep_orbits, pruned = [], [], [], []
    for orb in var_space.orbits:
        counts: dict[int, int] = defaultdict(int)
        for w in orb:
            for sk in _sub_keys(w, k, t, n):
                r = row_rep.get(sk)
                if r is not None:
                    counts[r] += 1
        if prune and any(m > lam for m in counts.values()):
            pruned.append((orb[0], len(orb)))
            continue
        j = len(keep_keys)
        keep_keys.append(orb[0])
        keep_w.append(len(orb))
        keep_orbits.append(tuple(orb))
        for r, m in counts.items():
            rows[r].append((j, m))
    row_list = tuple((row_space.orbits[r][0], tuple(sorted(rows[r]))) for r in range(len(row_space.orbits)))
    return KMModel(
        n, k, t, lam, tuple(keep_keys), tuple(keep_w), row_list,
        orbits=tuple(keep_orbits), pruned=tuple(pruned), group_order=closed(group).order,
        row_sizes=tuple(len(o) for o in row_space.orbits),
    )


def add_closeness(model: KMModel, reference: Code | Iterable[Subspace], c: int) -> KMModel:
    """Require the selection to keep at least c codewords from the reference orbits."""
    index = model.var_index()
    words = list(reference)
    vars_: set[int] = set()
    missing = 0
    for w in words:
        j = index.get(w.key)
        if j is None:
            missing += 1
            continue
        vars_.add(j)
    if missing:
        log.warning("%d reference codewords lie in pruned orbits and are ignored", missing)
    if model.orbits is not None:
        keys = {w.key for w in words}
        partial = [j for j in vars_ if not set(model.orbits[j]) <= keys]
        if partial:
            log.warning("reference is not a union of full orbits; %d orbits projected", len(partial))
    return replace(model, closeness=(tuple(sorted(vars_)), c))


# ------------------------------------------------------------- subproblems


@dataclass(frozen=True)
class Subproblem:
    forced: int  # variable set to one
    exclusions: tuple[int, ...]  # variables set to zero
    class_size: int
    forced_weight: int

    def apply(self, model: KMModel) -> KMModel:
        return model.with_fixtures([self.forced], self.exclusions)


@dataclass(frozen=True)
class SubproblemPlan:
    subproblems: tuple[Subproblem, ...]
    classes: tuple[tuple[int, ...], ...]  # normalizer classes of variables, in plan order

    def __len__(self) -> int:
        return len(self.subproblems)

    def class_type(self) -> str:
        return type_string(len(c) for c in self.classes)


def _normalizes(normalizer_gens: Sequence[BitMatrix], group: MatrixGroup) -> bool:
    g = closed(group)
    n = g.n
    for x in normalizer_gens:
        xinv = inverse_rows(x.rows)
        for e in g.elements:
            if pack_rows(mul_rows(mul_rows(xinv, unpack_rows(e, n, n)), x.rows), n) not in g.elements:
                return False
    return True


def make_subproblems(model: KMModel, group: MatrixGroup, normalizer_gens: Sequence[BitMatrix]) -> SubproblemPlan:
    if not _normalizes(normalizer_gens, group):
        raise ModelError("supplied elements do not normalize the group")
    index = model.var_index()
    if model.orbits is None:
        raise ModelError("subproblem generation needs orbit lists")
    tables = [vec_mat_table(x.rows) for x in normalizer_gens]
    parent = list(range(model.num_vars))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for j, key in enumerate(model.var_keys):
        for tb in tables:
            img = index.get(act_key(key, model.k, model.n, tb))
            if img is None:
                raise ModelError("normalizer maps a kept orbit onto a pruned one")
            a, b = find(j), find(img)
            if a != b:
                parent[max(a, b)] = min(a, b)
    members: dict[int, list[int]] = defaultdict(list)
    for j in range(model.num_vars):
        members[find(j)].append(j)
    live = [sorted(v) for v in members.values()]
    live = [c for c in live if not (set(c) <= model.fixed_zero)]

    def rep_of(cls):
        return min((j for j in cls if j not in model.fixed_zero), key=lambda j: model.var_keys[j])

    live.sort(key=lambda c: (-len(c), -model.weights[rep_of(c)], model.var_keys[rep_of(c)]))
    subs = []
    excluded: list[int] = []
    for cls in live:
        f = rep_of(cls)
        subs.append(Subproblem(f, tuple(sorted(excluded)), len(cls), model.weights[f]))
        excluded += cls
    return SubproblemPlan(tuple(subs), tuple(tuple(c) for c in live))


# --------------------------------------------------------------- LP format


def _expr(terms: Iterable[tuple[int, int]]) -> str:
    parts = []
    for j, c in terms:
        parts.append(f"x{j}" if c == 1 else f"{c} x{j}")
    return " + ".join(parts) if parts else "0 x0"


def to_lp(model: KMModel) -> str:
    """CPLEX LP text; representative keys travel in comments for the loader."""
    out = [
        f"\\ qcf km-model n={model.n} k={model.k} t={model.t} lambda={model.lam} group_order={model.group_order}",
    ]
    for j, (key, w) in enumerate(zip(model.var_keys, model.weights)):
        out.append(f"\\ var x{j} rep {key} weight {w}")
    for r, (key, _) in enumerate(model.rows):
        out.append(f"\\ row r{r} rep {key} size {model.row_sizes[r]}")
    for key, w in model.pruned:
        out.append(f"\\ pruned rep {key} weight {w}")
    out.append("Maximize")
    out.append(" obj: " + _expr((j, w) for j, w in enumerate(model.weights)))
    out.append("Subject To")
    for r, (_, coeffs) in enumerate(model.rows):
        out.append(f" r{r}: {_expr(coeffs)} <= {model.lam}")
    if model.closeness is not None:
        idx, c = model.closeness
        out.append(f" close: {_expr((j, model.weights[j]) for j in idx)} >= {c}")
    if model.fixed_one or model.fixed_zero:
        out.append("Bounds")
        for j in sorted(model.fixed_one):
            out.append(f" x{j} = 1")
        for j in sorted(model.fixed_zero):
            out.append(f" x{j} = 0")
    out.append("Binary")
    names = [f"x{j}" for j in range(model.num_vars)]
    for i in range(0, len(names), 16):
        out.append(" " + " ".join(names[i:i + 16]))
    out.append("End")
    return "\n".join(out) + "\n"


_TERM = re.compile(r"(?:(\d+)\s+)?x(\d+)")


def _parse_terms(s: str) -> list[tuple[int, int]]:
    terms = [(int(j), int(c) if c else 1) for c, j in _TERM.findall(s)]
    return [(j, c) for j, c in terms if c]


def from_lp(text: str) -> KMModel:
    """Inverse of ``to_lp`` (orbit lists are not stored and come back as None)."""
    header = None
    var_keys: dict[int, tuple[int, int]] = {}
    row_keys: dict[int, int] = {}
    pruned = []
    rows: dict[int, tuple] = {}
    closeness = None
    one, zero = set(), set()
    section = None
    for line in text.splitlines():
        s = line.strip()
        if not s:
            continue
        if s.startswith("\\"):
            m = re.match(r"\\ qcf km-model n=(\d+) k=(\d+) t=(\d+) lambda=(\d+) group_order=(\S+)", s)
            if m:
                header = m.groups()
            elif m := re.match(r"\\ var x(\d+) rep (\d+) weight (\d+)", s):
                var_keys[int(m[1])] = (int(m[2]), int(m[3]))
            elif m := re.match(r"\\ row r(\d+) rep (\d+) size (\d+)", s):
                row_keys[int(m[1])] = (int(m[2]), int(m[3]))
            elif m := re.match(r"\\ pruned rep (\d+) weight (\d+)", s):
                pruned.append((int(m[1]), int(m[2])))
            continue
        if s in ("Maximize", "Subject To", "Bounds", "Binary", "End"):
            section = s
            continue
        if section == "Subject To":
            name, expr = s.split(":", 1)
            if name == "close":
                lhs, c = expr.split(">=")
                terms = _parse_terms(lhs)
                closeness = (tuple(j for j, _ in terms), int(c))
            else:
                lhs, _ = expr.split("<=")
                rows[int(name[1:])] = tuple((j, c) for j, c in _parse_terms(lhs))
        elif section == "Bounds":
            m = re.match(r"x(\d+)\s*=\s*([01])", s)
            if m:
                (one if m[2] == "1" else zero).add(int(m[1]))
    if header is None:
        raise ModelError("not a qcf LP export (missing header comment)")
    n, k, t, lam, go = header
    nv = len(var_keys)
    return KMModel(
        int(n), int(k), int(t), int(lam),
        tuple(var_keys[j][0] for j in range(nv)), tuple(var_keys[j][1] for j in range(nv)),
        tuple((row_keys[r][0], rows[r]) for r in range(len(rows))),
        frozenset(one), frozenset(zero), closeness, None, tuple(pruned),
        None if go == "None" else int(go),
        tuple(row_keys[r][1] for r in range(len(rows))),
    )


def write_lp(model: KMModel, path: str | Path) -> None:
    Path(path).write_text(to_lp(model))


def read_lp(path: str | Path) -> KMModel:
    return from_lp(Path(path).read_text())


def anticode_bound(n: int, k: int, t: int, lam: int = 1) -> int:
    return lam * gaussian_binomial(n, t) // gaussian_binomial(k, t)
