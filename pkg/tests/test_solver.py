import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qcf.data_files import appendix_code, bundled_group
from qcf.gf2 import BitMatrix, mat_pow
from qcf.groups import closure, cyclic_subgroup_classes, gl_generators, trivial_group
from qcf.km import add_closeness, build_model, make_subproblems
from qcf.normalizer import normalizer_of_cyclic
from qcf.solver import SolveConfig, Status, parse_duration, solve, solve_portfolio
from qcf.verify import brute_force_optimum
from strategies import invertible

C127 = cyclic_subgroup_classes(7, 127)[0]
C31 = cyclic_subgroup_classes(7, 31)[0]


@pytest.fixture(scope="module")
def m31():
    return build_model(7, 3, 4, C31)


@pytest.fixture(scope="module")
def m127():
    return build_model(7, 3, 4, C127)


def test_parse_duration():
    assert parse_duration("48h") == 48 * 3600
    assert parse_duration("90s") == 90
    assert parse_duration(5) == 5
    with pytest.raises(ValueError):
        parse_duration("soon")


def test_order127_optimum(m127):
    r = solve(m127)
    assert r.objective == 254 and r.status == Status.OPTIMAL
    assert m127.decode(r.selection).min_distance() == 4


def test_order31_decision(m31):
    r = solve(m31, SolveConfig(mode="decide", target=279, budget=600))
    assert r.status == Status.FEASIBLE_AT_TARGET and r.objective >= 279
    assert m31.is_feasible(r.selection)


def test_known_spread_values():
    # a spread of F_2^4 has 5 lines; a maximal partial spread of F_2^5 has 9
    assert solve(build_model(4, 2, 4, trivial_group(4))).objective == 5
    c3 = cyclic_subgroup_classes(5, 3)[0]
    assert solve(build_model(5, 2, 4, c3)).objective == 9


@given(st.integers(0, 10**6), st.integers(1, 20))
def test_matches_brute_force(seed, size):
    base = test_matches_brute_force.base
    rng = random.Random(seed)
    m = base.submodel(sorted(rng.sample(range(base.num_vars), size)))
    r = solve(m, SolveConfig(trace=True, trace_limit=30))
    assert r.status == Status.OPTIMAL
    assert r.objective == brute_force_optimum(m)
    assert m.is_feasible(r.selection)
    for chosen, cand, bound in r.bound_trace:
        assert brute_force_optimum(m, chosen, cand) <= bound


test_matches_brute_force.base = build_model(7, 3, 4, bundled_group("G_14_1").closure())


@given(invertible(4))
def test_subgroup_monotonicity(g):
    # a larger prescribed group can only shrink the optimum
    big = closure([g], 4)
    small = closure([mat_pow(g, 2)], 4)
    a = solve(build_model(4, 2, 4, big)).objective
    b = solve(build_model(4, 2, 4, small)).objective
    assert a <= b <= 5


def test_decision_infeasible_below_target(m127):
    r = solve(m127, SolveConfig(mode="decide", target=255))
    assert r.status == Status.INFEASIBLE_BELOW_TARGET


def test_timeout_reported(m31):
    r = solve(m31, SolveConfig(budget=0.2))
    assert r.status == Status.TIMED_OUT
    assert m31.is_feasible(r.selection)


def test_refined_bound_not_weaker(m31):
    a = solve(m31, SolveConfig(mode="decide", target=279, bound_mode="refined", budget=600))
    assert a.status == Status.FEASIBLE_AT_TARGET


def test_closeness_self_feasible():
    g = bundled_group("G_4_6").closure()
    m = build_model(7, 3, 4, g)
    r = solve(add_closeness(m, appendix_code(), 333), SolveConfig(budget=600))
    assert r.objective == 333
    over = solve(add_closeness(m, appendix_code(), 334))
    assert over.status == Status.INFEASIBLE


def test_deterministic(m127):
    a = solve(m127)
    b = solve(m127)
    assert (a.selection, a.objective, a.nodes) == (b.selection, b.objective, b.nodes)


def test_portfolio_serial_and_parallel(m127):
    nr = normalizer_of_cyclic(C127.generators[0])
    plan = make_subproblems(m127, C127, nr.group.generators)
    assert plan.class_type() == "1^2 7^10"
    serial = solve_portfolio(m127, plan, SolveConfig())
    again = solve_portfolio(m127, plan, SolveConfig())
    par = solve_portfolio(m127, plan, SolveConfig(threads=2, deterministic=False))
    dec = solve_portfolio(m127, plan, SolveConfig(threads=2, deterministic=False, mode="decide", target=254))
    assert serial.objective == par.objective == 254
    assert serial.selection == again.selection
    assert dec.status == Status.FEASIBLE_AT_TARGET
    assert m127.is_feasible(par.selection)


def test_config_validation():
    with pytest.raises(ValueError):
        SolveConfig(mode="fast")
    with pytest.raises(ValueError):
        SolveConfig(bound_mode="magic")


def test_order31_optimum_refined(m31):
    r = solve(m31, SolveConfig(bound_mode="refined", budget=900))
    assert r.status == Status.OPTIMAL and r.objective == 279
