from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mcsgame.model import TaskTimePoint, rho_star
from mcsgame.routing import (
    OracleTooLarge,
    Route,
    RoutePlanner,
    SplitGraph,
    best_response,
    build_route_graph,
    enumerate_routes,
    is_feasible,
    route_cost_ticks,
    stay_home,
    validate_route,
)

from conftest import random_table_scenario, small_generated, table_scenario, uniform_tables


def oracle_value(scenario, route, shares):
    """Payoff of ``route`` against opponents' share counts, from first principles."""
    reward = sum(
        (Fraction(rho_star(scenario, p)) / (shares.get(p, 0) + 1) for p in set(route.points)),
        Fraction(0),
    )
    return reward - Fraction(route_cost_ticks(scenario, route), 10**4)


def sample_scenario(d13=3):
    # locations: 1 = home, 2 = task 1, 3 = task 3's site; task 2 unused here
    times = [[1, 1, 1, 2], [1, 1, 2, d13], [1, 2, 1, 2], [2, d13, 2, 1]]
    costs = [[0] * 4 for _ in range(4)]
    tasks = [(2, 2, 3), (3, 4, 1), (4, 5, 2)]
    return table_scenario(times, costs, tasks, [(1,)], horizon=7)


class TestValidateRoute:
    def test_sample_route_ok(self):
        sc = sample_scenario()
        init = sc.virtual_task_id(1)
        r = Route(1, ((init, 1), (1, 2), (3, 5), (3, 6), (3, 7)))
        assert validate_route(sc, r) == []

    def test_wrong_gap(self):
        sc = sample_scenario(d13=2)
        init = sc.virtual_task_id(1)
        r = Route(1, ((init, 1), (1, 2), (3, 5), (3, 6), (3, 7)))
        assert [v.condition for v in validate_route(sc, r)] == [4]

    def test_must_start_at_virtual(self):
        sc = sample_scenario()
        r = Route(1, ((1, 1), (1, 2)))
        assert 3 in {v.condition for v in validate_route(sc, r)}

    def test_time_must_increase(self):
        sc = sample_scenario()
        init = sc.virtual_task_id(1)
        assert 1 in {v.condition for v in validate_route(sc, Route(1, ((init, 1), (init, 1))))}

    def test_ineligible(self):
        times, costs = uniform_tables(2)
        sc = table_scenario(times, costs, [(2, 2, 5, 3)], [(1, 1)], horizon=3)
        r = Route(1, ((sc.virtual_task_id(1), 1), (1, 2)))
        assert 2 in {v.condition for v in validate_route(sc, r)}

    def test_stay_home_feasible(self):
        sc = sample_scenario()
        assert is_feasible(sc, stay_home(sc, 1))


class TestRouteGraph:
    def test_no_eligible_task(self):
        times, costs = uniform_tables(2)
        sc = table_scenario(times, costs, [(2, 2, 5, 3)], [(1, 0)], horizon=4)
        g = build_route_graph(sc, 1, {})
        v = sc.virtual_task_id(1)
        assert g.vertices == [(v, t) for t in range(1, 5)]
        assert all(len(g.succ[i]) == 1 for i in range(3)) and g.succ[3] == []

    def test_one_task_reachability(self):
        times, costs = uniform_tables(2, delta=1)
        sc = table_scenario(times, costs, [(2, 2, 10)], [(1,)], horizon=3)
        g = build_route_graph(sc, 1, {})
        v = sc.virtual_task_id(1)
        assert set(g.vertices) == {(v, 1), (v, 2), (v, 3), (1, 2), (1, 3)}

    def test_theta_halves(self):
        times, costs = uniform_tables(2)
        sc = table_scenario(times, costs, [(2, 2, 10)], [(1,), (1,)], horizon=3)
        g = build_route_graph(sc, 1, {(1, 2): 1})
        assert g.theta_value(g.index[(1, 2)]) == 5

    def test_scale_widens(self):
        times, costs = uniform_tables(2)
        sc = table_scenario(times, costs, [(2, 2, 10)], [(1,)], horizon=3)
        g = build_route_graph(sc, 1, {(1, 2): 2})
        assert g.theta_value(g.index[(1, 2)]) == Fraction(10, 3)

    def test_topological(self):
        g = build_route_graph(small_generated(3), 1, {})
        pos = {v: i for i, v in enumerate(g.topological_order())}
        for v, outs in enumerate(g.succ):
            for w, _ in outs:
                assert pos[v] < pos[w]

    def test_split_graph_and_dot(self):
        times, costs = uniform_tables(2, cost=1)
        sc = table_scenario(times, costs, [(2, 2, 10)], [(1,)], horizon=2)
        split = SplitGraph.from_route_graph(build_route_graph(sc, 1, {}))
        assert len(split.vertices) == 2 * 3
        assert len(split.internal_edges) == 3
        split.topological_order()
        dot = split.to_dot()
        assert dot.startswith("digraph split {") and dot.endswith("}")
        assert '[label="10"]' in dot and '[label="-1"]' in dot


class TestBestResponse:
    def test_isolated_profitable(self):
        times, costs = uniform_tables(2, cost=3)
        sc = table_scenario(times, costs, [(2, 3, 10)], [(1,)], horizon=4)
        route, value = best_response(sc, 1, {})
        assert value == 7
        assert (1, 3) in route.points

    def test_too_expensive(self):
        times, costs = uniform_tables(2, cost=11)
        sc = table_scenario(times, costs, [(2, 3, 10)], [(1,)], horizon=4)
        route, value = best_response(sc, 1, {})
        assert value == 0
        assert route == stay_home(sc, 1)

    def test_exclusive_branches(self):
        # Tasks 1 and 2 both run at t=3 in different places.
        times, costs = uniform_tables(3, delta=2, cost=1)
        sc = table_scenario(times, costs, [(2, 3, 10), (3, 3, 20)], [(1,)], horizon=3)
        route, value = best_response(sc, 1, {})
        assert value == 19
        assert route.points[-1] == (2, 3)

    def test_crowded_task_avoided(self):
        times, costs = uniform_tables(3, delta=2, cost=1)
        sc = table_scenario(times, costs, [(2, 3, 10), (3, 3, 12)], [(1,)] * 4, horizon=3)
        route, value = best_response(sc, 1, {(2, 3): 3})
        assert value == 9 and route.points[-1] == (1, 3)

    def test_stop_preferred_on_tie(self):
        times, costs = uniform_tables(2, cost=0)
        sc = table_scenario(times, costs, [(2, 2, 10)], [(1,)], horizon=5)
        route, _ = best_response(sc, 1, {})
        assert route.points[-1] == (1, 2)

    def test_planner_matches(self):
        sc = small_generated(11, I=4)
        planner = RoutePlanner(sc)
        for user in range(1, 5):
            assert planner.best_response(user, {}) == best_response(sc, user, {})


class TestEnumeration:
    def test_single_slot(self):
        times, costs = uniform_tables(2)
        sc = table_scenario(times, costs, [(2, 1, 10)], [(1,)], horizon=1)
        routes = enumerate_routes(sc, 1)
        assert [r.points for r in routes] == [((sc.virtual_task_id(1), 1),)]

    def test_two_slots(self):
        times, costs = uniform_tables(2)
        sc = table_scenario(times, costs, [(2, 2, 10)], [(1,)], horizon=2)
        v = sc.virtual_task_id(1)
        got = {r.points for r in enumerate_routes(sc, 1)}
        assert got == {((v, 1),), ((v, 1), (v, 2)), ((v, 1), (1, 2))}

    def test_guard(self):
        times, costs = uniform_tables(3)
        sc = table_scenario(times, costs, [(2, 2, 1), (3, 2, 1)], [(1,)], horizon=12)
        with pytest.raises(OracleTooLarge):
            enumerate_routes(sc, 1, limit=1000)

    def test_all_enumerated_feasible(self):
        sc = random_table_scenario(random.Random(5))
        for user in range(1, sc.num_users + 1):
            assert all(is_feasible(sc, r) for r in enumerate_routes(sc, user))


def _random_shares(rng, scenario):
    return {p: rng.randint(0, 3) for p in scenario.rewarded_points if rng.random() < 0.5}


@given(st.integers(0, 10**6))
@settings(max_examples=150, deadline=None)
def test_best_response_matches_enumeration(seed):
    rng = random.Random(seed)
    sc = random_table_scenario(rng)
    user = rng.randint(1, sc.num_users)
    shares = _random_shares(rng, sc)
    route, value = best_response(sc, user, shares)
    assert is_feasible(sc, route)
    assert oracle_value(sc, route, shares) == value
    assert value == max(oracle_value(sc, r, shares) for r in enumerate_routes(sc, user))


@given(st.integers(0, 10**6))
@settings(max_examples=100, deadline=None)
def test_best_response_nonnegative(seed):
    sc = small_generated(seed, I=2, K=4, T=8)
    _, value = best_response(sc, 1, {})
    assert value >= 0


@given(st.integers(0, 10**6))
@settings(max_examples=100, deadline=None)
def test_best_response_is_lexicographic_minimum(seed):
    rng = random.Random(seed)
    sc = random_table_scenario(rng, max_horizon=6)
    shares = _random_shares(rng, sc)
    route, value = best_response(sc, 1, shares)
    optimal = [r for r in enumerate_routes(sc, 1) if oracle_value(sc, r, shares) == value]
    key = lambda r: [(t, k) for k, t in r.points]  # noqa: E731
    assert key(route) == min(key(r) for r in optimal)


def test_point_type():
    assert TaskTimePoint(1, 2) == (1, 2)
