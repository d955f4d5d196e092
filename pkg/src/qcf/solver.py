"""Exact maximum-weight orbit packing by depth-first branch and bound.

Variables are renumbered by decreasing weight (ties by representative key),
so the lowest set bit of the candidate bitset is always the branching
variable.  A node's bound is its weight plus the smaller of the remaining
candidate weight and the counting bound on uncovered t-subspaces.
"""

from __future__ import annotations

import enum
import math
import multiprocessing as mp
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from fractions import Fraction

from .groups import MatrixGroup
from .km import KMModel, SubproblemPlan, build_model


class Status(str, enum.Enum):
    OPTIMAL = "Optimal"
    FEASIBLE_AT_TARGET = "FeasibleAtTarget"
    INFEASIBLE_BELOW_TARGET = "InfeasibleBelowTarget"
    TIMED_OUT = "TimedOut"
    INFEASIBLE = "Infeasible"


_UNITS = {"s": 1, "m": 60, "h": 3600, "d": 86400}


def parse_duration(text: str | float | int) -> float:
    """'48h', '90m', '30s', '1.5d' or a plain number of seconds."""
    if isinstance(text, (int, float)):
        return float(text)
    m = re.fullmatch(r"\s*([0-9]*\.?[0-9]+)\s*([smhd]?)\s*", text)
    if not m:
        raise ValueError(f"bad duration {text!r}")
    return float(m[1]) * _UNITS[m[2] or "s"]


@dataclass
class SolveConfig:
    kappa: int = 328
    target: int | None = None  # decision threshold; defaults to kappa + 1
    mode: str = "optimize"  # or "decide"
    budget: float = 48 * 3600.0  # seconds
    threads: int = 1
    deterministic: bool = True
    bound_mode: str = "counting"  # or "refined"
    lower_bound: int = -1  # optimisation prunes subtrees that cannot beat this
    trace: bool = False
    trace_limit: int = 100_000

    def __post_init__(self):
        if self.mode not in ("optimize", "decide"):
            raise ValueError("mode must be 'optimize' or 'decide'")
        if self.bound_mode not in ("counting", "refined"):
            raise ValueError("bound_mode must be 'counting' or 'refined'")
        if self.decision_target < 1:
            raise ValueError("target must be at least 1")

    @property
    def decision_target(self) -> int:
        return self.kappa + 1 if self.target is None else self.target


@dataclass
class SolveResult:
    selection: tuple[int, ...]
    objective: int
    status: Status
    nodes: int = 0
    wall_time: float = 0.0
    root_bound: int | None = None
    bound_trace: list[tuple[tuple[int, ...], tuple[int, ...], int]] = field(default_factory=list, repr=False)
    sub_results: list["SolveResult"] = field(default_factory=list, repr=False)

    @property
    def proven(self) -> bool:
        return self.status in (Status.OPTIMAL, Status.INFEASIBLE_BELOW_TARGET, Status.INFEASIBLE)

    def to_json(self) -> dict:
        return {
            "selection": list(self.selection),
            "objective": self.objective,
            "status": self.status.value,
            "nodes": self.nodes,
            "wall_time": round(self.wall_time, 3),
            "root_bound": self.root_bound,
        }


class _Stop(Exception):
    pass


class _Search:
    def __init__(self, model: KMModel, config: SolveConfig, shared=None):
        self.model = model
        self.cfg = config
        self.shared = shared
        nv = model.num_vars
        order = sorted(range(nv), key=lambda j: (-model.weights[j], model.var_keys[j]))
        self.order = order
        pos = {j: i for i, j in enumerate(order)}
        self.w = [model.weights[j] for j in order]
        lam = model.lam
        nrows = len(model.rows)
        self.rows_of: list[list[tuple[int, int]]] = [[] for _ in range(nv)]
        self.over = [[0] * (lam + 1) for _ in range(nrows)]
        self.row_mask = [0] * nrows
        for r, (_, coeffs) in enumerate(model.rows):
            for j, m in coeffs:
                i = pos[j]
                self.rows_of[i].append((r, m))
                self.row_mask[r] |= 1 << i
                for s in range(lam + 1):
                    if m > lam - s:
                        self.over[r][s] |= 1 << i
        groups: dict[int, int] = {}
        for i, wi in enumerate(self.w):
            groups[wi] = groups.get(wi, 0) | (1 << i)
        self.wgroups = sorted(groups.items(), reverse=True)
        # coverage of var j = sum_r m_{r,j} |row orbit r|; equals weight * gauss(k,t)
        # for geometric models.  rho = min coverage per unit weight keeps the
        # counting bound valid for any model.
        self.row_size = list(model.row_sizes)
        self.cov = [sum(m * self.row_size[r] for r, m in self.rows_of[i]) for i in range(nv)]
        self.rho = min((Fraction(c, wi) for c, wi in zip(self.cov, self.w) if wi > 0), default=Fraction(1))
        self.capacity = lam * sum(self.row_size)
        self.loads = [0] * nrows
        self.fixed_one = [pos[j] for j in sorted(model.fixed_one)]
        self.fixed_zero = 0
        for j in model.fixed_zero:
            self.fixed_zero |= 1 << pos[j]
        self.R = 0
        self.c = 0
        if model.closeness is not None:
            for j in model.closeness[0]:
                self.R |= 1 << pos[j]
            self.c = model.closeness[1]
        self.best = -1
        self.best_sel: list[int] = []
        self.nodes = 0
        self.trace: list = []
        self.deadline = time.monotonic() + config.budget
        self.decide = config.mode == "decide"
        self.target = config.decision_target
        self.floor = max(config.lower_bound, -1)
        self.covered = 0
        sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * nv + 1000))

    # ---------------------------------------------------------------- helpers
    def weight_of(self, mask: int) -> int:
        return sum(w * (mask & g).bit_count() for w, g in self.wgroups)

    def bound(self, cur: int, cand: int) -> int:
        rem = self.weight_of(cand)
        if self.cfg.bound_mode == "refined":
            lam, loads, size = self.model.lam, self.loads, self.row_size
            cap = sum(size[r] * (lam - loads[r]) for r, rm in enumerate(self.row_mask) if rm & cand)
        else:
            cap = self.capacity - self.covered
        count = cur + math.floor(cap / self.rho) if self.rho > 0 else cur + rem
        return min(cur + rem, count)

    def include(self, i: int, cand: int) -> int:
        self.covered += self.cov[i]
        cand &= ~(1 << i)
        loads, over = self.loads, self.over
        for r, m in self.rows_of[i]:
            loads[r] += m
            cand &= ~over[r][loads[r]]
        return cand

    def undo(self, i: int) -> None:
        self.covered -= self.cov[i]
        loads = self.loads
        for r, m in self.rows_of[i]:
            loads[r] -= m

    def _record(self, cur: int, chosen: list[int]) -> None:
        if cur > self.best:
            self.best = cur
            self.best_sel = list(chosen)
            if self.shared is not None:
                self.shared.offer(cur)

    def _threshold(self) -> int:
        """Subtrees whose bound is below this value are pruned."""
        best = max(self.best, self.floor)
        if self.shared is not None:
            best = max(best, self.shared.get())
        if self.decide:
            return self.target
        return best + 1

    # ----------------------------------------------------------------- search
    def run(self) -> SolveResult:
        t0 = time.monotonic()
        status = None
        chosen: list[int] = []
        cand = (1 << len(self.w)) - 1
        cand &= ~self.fixed_zero
        for r in range(len(self.model.rows)):
            cand &= ~self.over[r][0]
        root_bound = None
        feasible = True
        for i in self.fixed_one:
            if not (cand >> i) & 1:
                feasible = False
                break
            cand = self.include(i, cand)
            chosen.append(i)
        cur = sum(self.w[i] for i in chosen)
        curR = sum(self.w[i] for i in chosen if (self.R >> i) & 1)
        if feasible and self.R and curR + self.weight_of(cand & self.R) < self.c:
            feasible = False
        if not feasible:
            return SolveResult((), 0, Status.INFEASIBLE, 0, time.monotonic() - t0, 0)
        root_bound = self.bound(cur, cand)
        try:
            self.dfs(cur, cand, curR, chosen)
        except _Stop as e:
            status = Status(str(e))
        if status is None:
            if self.decide:
                status = Status.FEASIBLE_AT_TARGET if self.best >= self.target else Status.INFEASIBLE_BELOW_TARGET
            else:
                status = Status.OPTIMAL
        if self.best < 0:
            if status == Status.OPTIMAL and self.floor < 0:
                status = Status.INFEASIBLE
            sel: tuple[int, ...] = ()
            obj = 0
        else:
            sel = tuple(sorted(self.order[i] for i in self.best_sel))
            obj = self.best
        res = SolveResult(sel, obj, status, self.nodes, time.monotonic() - t0, root_bound, self.trace)
        return res

    def dfs(self, cur: int, cand: int, curR: int, chosen: list[int]) -> None:
        self.nodes += 1
        if (self.nodes & 1023) == 0:
            if time.monotonic() > self.deadline:
                raise _Stop(Status.TIMED_OUT.value)
            if self.decide and self.shared is not None and self.shared.get() >= self.target:
                raise _Stop(Status.FEASIBLE_AT_TARGET.value)
        forced: list[int] = []
        try:
            # closeness propagation: include vars whose exclusion breaks the constraint
            while self.R:
                avail = self.weight_of(cand & self.R)
                slack = curR + avail - self.c
                if slack < 0:
                    return
                heavy = 0
                for w, g in self.wgroups:
                    if w > slack:
                        heavy |= g
                must = cand & self.R & heavy
                if not must:
                    break
                i = (must & -must).bit_length() - 1
                cand = self.include(i, cand)
                forced.append(i)
                chosen.append(i)
                cur += self.w[i]
                curR += self.w[i]
            if curR >= self.c:
                self._record(cur, chosen)
                if self.decide and self.best >= self.target:
                    raise _Stop(Status.FEASIBLE_AT_TARGET.value)
            while True:
                b = self.bound(cur, cand)
                if self.cfg.trace and len(self.trace) < self.cfg.trace_limit:
                    self.trace.append((
                        tuple(sorted(self.order[i] for i in chosen)),
                        tuple(sorted(self.order[i] for i in range(len(self.w)) if (cand >> i) & 1)),
                        b,
                    ))
                if not cand or b < self._threshold():
                    return
                if self.R and curR + self.weight_of(cand & self.R) < self.c:
                    return
                i = (cand & -cand).bit_length() - 1
                inR = (self.R >> i) & 1
                ncand = self.include(i, cand)
                chosen.append(i)
                try:
                    self.dfs(cur + self.w[i], ncand, curR + (self.w[i] if inR else 0), chosen)
                finally:
                    chosen.pop()
                    self.undo(i)
                cand &= ~(1 << i)
        finally:
            for i in reversed(forced):
                self.undo(i)
                chosen.pop()


def solve(model: KMModel, config: SolveConfig | None = None, shared=None) -> SolveResult:
    config = config or SolveConfig()
    return _Search(model, config, shared).run()


def p_protocol(group: MatrixGroup, config: SolveConfig | None = None) -> tuple[int, SolveResult]:
    config = config or SolveConfig()
    cfg = SolveConfig(**{**config.__dict__, "mode": "decide"})
    model = build_model(7, 3, 4, group)
    res = solve(model, cfg)
    value = 1 if res.status in (Status.FEASIBLE_AT_TARGET, Status.TIMED_OUT) else 0
    return value, res


def compute_P(group: MatrixGroup, config: SolveConfig | None = None) -> int:
    return p_protocol(group, config)[0]


# --------------------------------------------------------------- portfolio


class LocalIncumbent:
    def __init__(self, value: int = -1):
        self.value = value

    def get(self) -> int:
        return self.value

    def offer(self, v: int) -> None:
        if v > self.value:
            self.value = v


class SharedIncumbent:
    """Monotone best-value cell shared between worker processes."""

    def __init__(self, cell):
        self.cell = cell

    def get(self) -> int:
        return self.cell.value

    def offer(self, v: int) -> None:
        with self.cell.get_lock():
            if v > self.cell.value:
                self.cell.value = v


_worker_cell = None


def _init_worker(cell):
    global _worker_cell
    _worker_cell = cell


def _solve_task(args):
    model, config = args
    return solve(model, config, SharedIncumbent(_worker_cell))


def _aggregate(results: list[SolveResult], config: SolveConfig, wall: float) -> SolveResult:
    feasible = [r for r in results if r.status != Status.INFEASIBLE and (r.selection or r.objective > 0)]
    best = max(feasible, key=lambda r: r.objective, default=None)
    timed_out = any(r.status == Status.TIMED_OUT for r in results)
    nodes = sum(r.nodes for r in results)
    if config.mode == "decide":
        if best is not None and best.objective >= config.decision_target:
            status = Status.FEASIBLE_AT_TARGET
        elif timed_out:
            status = Status.TIMED_OUT
        else:
            status = Status.INFEASIBLE_BELOW_TARGET
    else:
        status = Status.TIMED_OUT if timed_out else (Status.OPTIMAL if best is not None else Status.INFEASIBLE)
    if best is None:
        return SolveResult((), 0, status, nodes, wall, None, [], results)
    return SolveResult(best.selection, best.objective, status, nodes, wall, None, [], results)


def solve_portfolio(model: KMModel, plan: SubproblemPlan, config: SolveConfig | None = None) -> SolveResult:
    """Solve every subproblem of a plan; the best subproblem value is the model optimum."""
    config = config or SolveConfig()
    t0 = time.monotonic()
    tasks = [sp.apply(model) for sp in plan.subproblems]
    results: list[SolveResult] = []
    if config.deterministic or config.threads <= 1:
        inc = LocalIncumbent(config.lower_bound)
        for sub in tasks:
            cfg = SolveConfig(**{**config.__dict__, "lower_bound": inc.get()})
            left = config.budget - (time.monotonic() - t0)
            cfg.budget = max(left, 0.0)
            r = solve(sub, cfg, None if config.mode == "decide" else inc)
            results.append(r)
            if r.selection or r.objective:
                inc.offer(r.objective)
            if config.mode == "decide" and r.status == Status.FEASIBLE_AT_TARGET:
                break
            if r.status == Status.TIMED_OUT:
                break
        return _aggregate(results, config, time.monotonic() - t0)
    ctx = mp.get_context("spawn")
    cell = ctx.Value("q", config.lower_bound)
    with ProcessPoolExecutor(max_workers=config.threads, mp_context=ctx, initializer=_init_worker, initargs=(cell,)) as ex:
        futs = [ex.submit(_solve_task, (sub, config)) for sub in tasks]
        for f in as_completed(futs):
            if f.cancelled():
                continue
            r = f.result()
            results.append(r)
            if config.mode == "decide" and r.status == Status.FEASIBLE_AT_TARGET:
                for g in futs:
                    g.cancel()
                break
    return _aggregate(results, config, time.monotonic() - t0)
