"""Reproduction battery: one check per acceptance criterion.

Shared by ``qcf verify-paper`` and the acceptance tests.  Each check records
what was expected, what was observed, the provenance of the expectation, and
the wall time against its limit.
"""

from __future__ import annotations

import json
import math
import random
import time
from collections import Counter
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Callable

from .automorphisms import automorphism_search
from .data_files import SURVIVING_GROUPS, appendix_code, bundled_group
from .geometry import Code, coordinate_hyperplane, gaussian_binomial, hyperplane_members
from .gf2 import identity_rows, is_invertible_rows, mat_pow, mul_rows, unpack_rows
from .groups import (
    MatrixGroup,
    are_conjugate,
    consistent_with_split_extension,
    cyclic_subgroup_classes,
    fingerprint,
    involution_count,
    normalize_type_name,
    orbit_space,
    rcf_class_reps,
    subgroups_of_order,
    type_string,
)
from .km import KMModel, add_closeness, build_model, make_subproblems
from .normalizer import (
    LadderInput,
    block_ambient,
    conjugacy_classes_of_subgroups,
    drop_containing,
    group_from_elements,
    ladder_search,
    normalizer_in,
    normalizer_of_cyclic,
)
from .solver import SolveConfig, Status, solve

SURVIVOR_ORDERS = "1^1 2^1 3^2 4^7 5^1 6^3 7^2 8^11 9^2 12^1 14^1 16^1"

NOT_REPRODUCIBLE = [
    ("exclusion runs for the order-2, order-5 and G_16_1 groups", "multi-day ILP runs"),
    ("12 isomorphism classes of 329-codes under G_16_1", "needs the full G_16_1 optimality run"),
    ("order-32 and order-64 ladder values 327 and 317", "normalizers of non-cyclic order-16 groups are not given"),
]


@dataclass
class Check:
    criterion: int | None
    name: str
    expected: str
    observed: str
    passed: bool | None  # None = skipped
    provenance: str
    seconds: float = 0.0
    limit: float | None = None
    budget_exhausted: bool = False

    @property
    def status(self) -> str:
        if self.passed is None:
            return "SKIP"
        return "PASS" if self.passed else "FAIL"

    def line(self) -> str:
        tag = f"[{self.criterion}]" if self.criterion is not None else "[-]"
        lim = f" / {self.limit:g}s" if self.limit else ""
        return f"{self.status} {tag} {self.name}: expected {self.expected}; observed {self.observed} ({self.seconds:.2f}s{lim})"


@dataclass
class VerificationReport:
    checks: list[Check] = field(default_factory=list)

    def add(self, c: Check) -> Check:
        self.checks.append(c)
        return c

    @property
    def summary(self) -> dict[str, int]:
        cnt = Counter(c.status for c in self.checks)
        return {"pass": cnt["PASS"], "fail": cnt["FAIL"], "skip": cnt["SKIP"]}

    def exit_code(self) -> int:
        if any(c.passed is False and not c.budget_exhausted for c in self.checks):
            return 1
        if any(c.budget_exhausted for c in self.checks):
            return 2
        return 0

    def to_json(self) -> str:
        return json.dumps({"checks": [asdict(c) | {"status": c.status} for c in self.checks], "summary": self.summary}, indent=2)

    def text(self) -> str:
        lines = [c.line() for c in self.checks]
        s = self.summary
        lines.append(f"{s['pass']} passed, {s['fail']} failed, {s['skip']} skipped")
        return "\n".join(lines)


def _timed(criterion, name, provenance, limit, fn: Callable[[], tuple[bool, str, str]]) -> Check:
    t0 = time.monotonic()
    ok, expected, observed = fn()
    dt = time.monotonic() - t0
    passed = ok and (limit is None or dt <= limit)
    if ok and not passed:
        observed += " (over time limit)"
    return Check(criterion, name, expected, observed, passed, provenance, dt, limit)


# ----------------------------------------------------------------- caches


@lru_cache(maxsize=None)
def group(name: str) -> MatrixGroup:
    return bundled_group(name).closure()


@lru_cache(maxsize=None)
def cyclic_class(m: int) -> MatrixGroup:
    classes = cyclic_subgroup_classes(7, m)
    if len(classes) != 1:
        raise ValueError(f"order {m} has {len(classes)} classes")
    return classes[0]


@lru_cache(maxsize=None)
def model_for(key: str) -> KMModel:
    g = cyclic_class(int(key[1:])) if key.startswith("C") else group(key)
    return build_model(7, 3, 4, g)


# ------------------------------------------------------------------ oracles


def brute_force_optimum(model: KMModel, chosen=(), allowed=None) -> int:
    """Exhaustive maximum over feasible supersets of ``chosen`` inside ``allowed``.

    Fixtures and closeness are ignored; the caller passes plain packing models.
    """
    cols = model.columns()
    loads = [0] * len(model.rows)
    lam = model.lam
    for j in chosen:
        for r, m in cols[j]:
            loads[r] += m
    if any(x > lam for x in loads):
        return -1
    base = sum(model.weights[j] for j in chosen)
    free = sorted(set(range(model.num_vars) if allowed is None else allowed) - set(chosen))
    best = 0

    def rec(i: int, acc: int):
        nonlocal best
        if acc > best:
            best = acc
        for idx in range(i, len(free)):
            j = free[idx]
            if all(loads[r] + m <= lam for r, m in cols[j]):
                for r, m in cols[j]:
                    loads[r] += m
                rec(idx + 1, acc + model.weights[j])
                for r, m in cols[j]:
                    loads[r] -= m

    rec(0, 0)
    return base + best


def brute_involutions(n: int) -> int:
    count = 0
    ident = identity_rows(n)
    for bits in range(1 << (n * n)):
        rows = unpack_rows(bits, n, n)
        if rows != ident and is_invertible_rows(rows) and mul_rows(rows, rows) == ident:
            count += 1
    return count


# ------------------------------------------------------------------ criteria


def check_counting() -> Check:
    def run():
        g = gaussian_binomial(7, 2)
        b = g // gaussian_binomial(3, 2)
        return (g == 2667 and b == 381, "gauss(7,2)=2667, bound 381", f"gauss(7,2)={g}, bound {b}")

    return _timed(1, "counting identities", "2-subspace count and anticode bound", 1.0, run)


def check_appendix_code() -> Check:
    def run():
        code = appendix_code()
        d = code.min_distance()
        ot = orbit_space(7, 3, group("G_4_6"), keys=sorted(code.keys)).type_string
        h = hyperplane_members(code, coordinate_hyperplane(7, 0))
        ok = len(code) == 333 and d == 4 and ot == "1^9 2^26 4^68" and h == 35
        return ok, "333 words, d=4, type 1^9 2^26 4^68, 35 in x_1=0", f"{len(code)} words, d={d}, type {ot}, {h} in x_1=0"

    return _timed(2, "witness code", "decoded bundled code", 10.0, run)


def check_automorphisms() -> Check:
    def run():
        res = automorphism_search(appendix_code(), budget=600)
        g = res.group
        fp = fingerprint(g)
        same = g.elements == group("G_4_6").elements
        ok = g.order == 4 and fp.is_klein_four and same
        return ok, "order 4, Klein four, equal to <G_4_6>", f"order {g.order}, {fp.name}, equal={same}"

    return _timed(3, "automorphism group of the witness", "full stabilizer search", 600.0, run)


def check_appendix_groups() -> Check:
    def run():
        bad = []
        orders = []
        for name in SURVIVING_GROUPS:
            rec = bundled_group(name)
            g = group(name)
            orders.append(g.order)
            if g.order != rec.stated_order:
                bad.append(f"{name} order {g.order}")
                continue
            fp = fingerprint(g)
            stated = normalize_type_name(rec.stated_type)
            if g.order == 16:
                if not (fp.ambiguous and consistent_with_split_extension(g, "Z_4 x Z_2", 2)):
                    bad.append(f"{name} not consistent with {stated}")
            elif fp.name != stated:
                bad.append(f"{name} {fp.name} != {stated}")
        ts = type_string(orders)
        ok = not bad and ts == SURVIVOR_ORDERS and len(orders) == 33
        obs = f"{len(orders)} groups, orders {ts}" + (f"; mismatches {bad}" if bad else "")
        return ok, f"33 groups, orders {SURVIVOR_ORDERS}, all types consistent", obs

    return _timed(4, "bundled group integrity", "bundled group files", 60.0, run)


def check_involutions() -> Check:
    def run():
        c7 = involution_count(7)
        b2, b3 = brute_involutions(2), brute_involutions(3)
        f2, f3 = involution_count(2), involution_count(3)
        cls = rcf_class_reps(7, order_filter=2)
        dims = sorted(c.fixed_dim for c in cls)
        ok = c7 == 32_252_031 and (b2, b3) == (f2, f3) and dims == [4, 5, 6]
        return (
            ok,
            "32252031; formula = brute force for n=2,3; 3 classes with fixed dims [4, 5, 6]",
            f"{c7}; n=2 {f2}/{b2}, n=3 {f3}/{b3}; {len(cls)} classes with fixed dims {dims}",
        )

    return _timed(5, "involution census", "closed formula plus brute force", 60.0, run)


def check_cyclic_classes() -> Check:
    want = {2: 3, 3: 3, 5: 1, 7: 3, 31: 1, 127: 1}

    def run():
        got = {m: len(cyclic_subgroup_classes(7, m)) for m in want}
        return got == want, str(want), str(got)

    return _timed(6, "cyclic subgroup classes", "invariant-factor fusion", 300.0, run)


def check_orbit_types() -> Check:
    def run():
        g31, g5, g14 = cyclic_class(31), group("G_5_1"), group("G_14_1")
        obs = {
            "31/3": orbit_space(7, 3, g31).type_string,
            "31/2": orbit_space(7, 2, g31).type_string,
            "G51/3": orbit_space(7, 3, g5).type_string,
            "G51/2": orbit_space(7, 2, g5).type_string,
            "G141/3": orbit_space(7, 3, g14).type_string,
            "G141/pruned": model_for("G_14_1").var_type(),
        }
        exp = {
            "31/3": "31^381",
            "31/2": "1^1 31^86",
            "G51/3": "1^1 5^2362",
            "G51/2": "1^7 5^532",
            "G141/3": "1^1 2^4 7^30 14^828",
            "G141/pruned": "1^1 2^4 7^28 14^632",
        }
        return obs == exp, str(exp), str(obs)

    return _timed(7, "orbit types", "orbit enumeration", 300.0, run)


def check_normalizer() -> Check:
    def run():
        g = group("G_14_1")
        nr = normalizer_of_cyclic(g.generators[0])
        plan = make_subproblems(model_for("G_14_1"), g, nr.group.generators)
        ok = nr.group.order == 168 and len(plan) == 66 and plan.class_type() == "1^1 4^13 6^2 12^50"
        return ok, "|N| = 168, 66 subproblems, 1^1 4^13 6^2 12^50", f"|N| = {nr.group.order}, {len(plan)} subproblems, {plan.class_type()}"

    return _timed(8, "order-14 normalizer", "slice enumeration", 1800.0, run)


def check_solver_127() -> Check:
    def run():
        m = model_for("C127")
        r = solve(m, SolveConfig(budget=600))
        code = m.decode(r.selection)
        ok = r.status == Status.OPTIMAL and r.objective == 254 and code.min_distance() == 4
        return ok, "proven optimum 254", f"{r.objective} ({r.status.value}, {r.nodes} nodes)"

    return _timed(9, "order-127 optimum", "branch and bound", 600.0, run)


def check_solver_31() -> Check:
    t0 = time.monotonic()
    m = model_for("C31")
    r = solve(m, SolveConfig(mode="decide", target=279, budget=7200))
    code = m.decode(r.selection) if r.selection else Code(())
    dt = time.monotonic() - t0
    ok = r.status == Status.FEASIBLE_AT_TARGET and r.objective >= 279 and (code.min_distance() or 0) >= 4
    c = Check(9, "order-31 incumbent", "incumbent >= 279", f"{r.objective} ({r.status.value})", ok and dt <= 7200,
              "decision-mode branch and bound", dt, 7200.0, r.status == Status.TIMED_OUT)
    return c


def check_solver_31_optimal(budget: float = 3600.0) -> Check:
    """Optional long run: optimality of 279 with the refined bound."""
    t0 = time.monotonic()
    r = solve(model_for("C31"), SolveConfig(budget=budget, bound_mode="refined"))
    dt = time.monotonic() - t0
    ok = r.status == Status.OPTIMAL and r.objective == 279
    return Check(None, "order-31 optimum (optional)", "proven optimum 279", f"{r.objective} ({r.status.value}, {r.nodes} nodes)",
                 ok, "refined-bound branch and bound", dt, budget, r.status == Status.TIMED_OUT)


def random_submodels(count: int, seed: int = 0, max_vars: int = 22) -> list[KMModel]:
    rng = random.Random(seed)
    bases = [model_for("C31"), model_for("G_14_1"), model_for("G_4_6")]
    out = []
    for _ in range(count):
        base = rng.choice(bases)
        size = rng.randint(1, max_vars)
        keep = sorted(rng.sample(range(base.num_vars), size))
        out.append(base.submodel(keep))
    return out


def check_oracle(trials: int = 200, seed: int = 0, nodes_per_model: int = 40) -> Check:
    def run():
        mismatches = bound_violations = bad_codes = 0
        for m in random_submodels(trials, seed):
            r = solve(m, SolveConfig(trace=True, trace_limit=nodes_per_model))
            opt = brute_force_optimum(m)
            if r.objective != opt or r.status != Status.OPTIMAL:
                mismatches += 1
            for chosen, cand, b in r.bound_trace:
                if brute_force_optimum(m, chosen, cand) > b:
                    bound_violations += 1
            d = m.decode(r.selection).min_distance()
            if d is not None and d < 4:
                bad_codes += 1
        ok = mismatches == bound_violations == bad_codes == 0
        return ok, "0 mismatches, 0 bound violations, 0 bad codes", f"{mismatches} mismatches, {bound_violations} bound violations, {bad_codes} bad codes over {trials} models"

    return _timed(10, "solver oracle equivalence", "exhaustive enumeration", 600.0, run)


def surviving_order3_pairs() -> list[tuple[MatrixGroup, MatrixGroup]]:
    out = []
    for name in ("G_3_1", "G_3_2"):
        t = group(name)
        out.append((t, normalizer_of_cyclic(t.generators[0]).group))
    return out


def _conjugate_cyclic(a: MatrixGroup, b: MatrixGroup) -> bool:
    x = a.generators[0]
    y = b.generators[0]
    return any(are_conjugate(x, mat_pow(y, e)) for e in range(1, b.order) if math.gcd(e, b.order) == 1)


def check_ladder() -> Check:
    def run():
        pairs = surviving_order3_pairs()
        res = ladder_search(LadderInput(pairs, 3, 9))
        survivors = [p[0] for p in pairs]
        excluded = [c for c in cyclic_subgroup_classes(7, 3) if not any(_conjugate_cyclic(c, s) for s in survivors)]
        kept = drop_containing(res.groups, excluded)
        types = sorted({fingerprint(g).name for g in kept})
        gl_ok = res.exact and types == ["Z_3 x Z_3", "Z_9"]

        H = block_ambient([3, 2, 2])
        cl3 = conjugacy_classes_of_subgroups(subgroups_of_order(H, 3, max_gens=1), H)
        hp = []
        for cls in cl3:
            t = group_from_elements(cls[0], 7)
            hp.append((t, normalizer_in(t, H)))
        hres = ladder_search(LadderInput(hp, 3, 9, ambient=H))
        cl9 = conjugacy_classes_of_subgroups(subgroups_of_order(H, 9), H)
        where = {s: i for i, c in enumerate(cl9) for s in c}
        hit = sorted(where.get(g.elements, -1) for g in hres.groups)
        h_ok = hit == list(range(len(cl9)))
        return (
            gl_ok and h_ok,
            "types Z_3 x Z_3 and Z_9 only; ambient ladder classes = brute-force classes",
            f"{res.upper} ladder classes, types {types} after exclusion; ambient: ladder {len(hres.groups)}, brute force {len(cl9)}",
        )

    return _timed(11, "order-9 ladder", "prime-index extension vs brute force in GL(3,2)xGL(2,2)xGL(2,2)", 1800.0, run)


def check_improvement() -> Check:
    def run():
        m = model_for("G_4_6")
        code = appendix_code()
        r1 = solve(add_closeness(m, code, 333), SolveConfig(budget=1800))
        idx = m.var_index()
        four = min(j for j in {idx[w.key] for w in code} if m.weights[j] == 4)
        reduced = Code(tuple(w for w in code if idx[w.key] != four))
        r2 = solve(add_closeness(m, reduced, 329), SolveConfig(budget=1800))
        d2 = m.decode(r2.selection).min_distance()
        ok = r1.objective >= 333 and r1.status != Status.INFEASIBLE and r2.objective >= 333 and d2 == 4
        return ok, "feasible at 333; recovers >= 333 from 329", f"{r1.objective} ({r1.status.value}); {len(reduced)} -> {r2.objective} ({r2.status.value})"

    return _timed(12, "improvement protocol", "closeness-constrained solve", 3600.0, run)


CRITERIA: list[Callable[[], Check]] = [
    check_counting,
    check_appendix_code,
    check_automorphisms,
    check_appendix_groups,
    check_involutions,
    check_cyclic_classes,
    check_orbit_types,
    check_normalizer,
    check_solver_127,
    check_solver_31,
    check_oracle,
    check_ladder,
    check_improvement,
]

_FAST_SKIP = {check_solver_31, check_oracle, check_improvement}


def run_battery(fast: bool = False, long: bool = False, echo: Callable[[str], None] | None = None) -> VerificationReport:
    rep = VerificationReport()
    for fn in CRITERIA:
        if fast and fn in _FAST_SKIP:
            doc = fn.__name__.replace("check_", "")
            c = Check(None, doc, "-", "skipped with --fast", None, "fast mode")
        else:
            c = fn()
        rep.add(c)
        if echo:
            echo(c.line())
    if long:
        c = rep.add(check_solver_31_optimal())
        if echo:
            echo(c.line())
    for name, why in NOT_REPRODUCIBLE:
        c = rep.add(Check(None, name, "-", f"not reproduced: {why}", None, "out of desk scope"))
        if echo:
            echo(c.line())
    return rep


def verify_code(words, group_: MatrixGroup | None = None, expect: dict | None = None, aut_budget: float = 600.0) -> VerificationReport:
    """Size, distance, orbit type, hyperplane count and automorphism order of a code."""
    rep = VerificationReport()
    code = words if isinstance(words, Code) else Code.from_words(words)
    expect = expect or {}

    def add(name, observed, key):
        want = expect.get(key)
        passed = True if want is None else observed == want
        rep.add(Check(None, name, "-" if want is None else str(want), str(observed), passed, "code file"))

    add("size", len(code), "size")
    d = code.min_distance()
    add("minimum distance", "none" if d is None else d, "min_distance")
    if not len(code):
        return rep
    if group_ is not None:
        add("orbit type", orbit_space(code.n, code.k, group_, keys=sorted(code.keys)).type_string, "orbit_type")
    if code.n == 7 and code.k == 3:
        add("words in x_1 = 0", hyperplane_members(code, coordinate_hyperplane(7, 0)), "hyperplane")
        try:
            res = automorphism_search(code, budget=aut_budget)
            add("automorphism group order", res.order, "aut_order")
        except Exception as e:  # budget exhaustion is reported, not raised
            rep.add(Check(None, "automorphism group order", str(expect.get("aut_order", "-")), str(e), False, "code file",
                          budget_exhausted=True))
    return rep


APPENDIX_EXPECT = {"size": 333, "min_distance": 4, "orbit_type": "1^9 2^26 4^68", "hyperplane": 35, "aut_order": 4}

__all__ = [
    "APPENDIX_EXPECT",
    "CRITERIA",
    "Check",
    "VerificationReport",
    "brute_force_optimum",
    "brute_involutions",
    "run_battery",
    "verify_code",
]
