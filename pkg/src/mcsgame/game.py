"""Payoffs, share counts, the exact potential, and equilibrium checks."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple, Sequence

from .model import Scenario, rho_star_ticks, ticks_to_money
from .routing import Route, RoutePlanner, route_cost_ticks, stay_home, validate_route

DEFAULT_EPSILON = 1e-9


@dataclass(frozen=True, eq=False)
class StrategyProfile:
    """One route per user, users in id order."""

    scenario: Scenario = field(repr=False)
    routes: tuple[Route, ...]

    def __post_init__(self):
        object.__setattr__(self, "routes", tuple(self.routes))
        if len(self.routes) != self.scenario.num_users:
            raise ValueError(f"need {self.scenario.num_users} routes, got {len(self.routes)}")
        for i, r in enumerate(self.routes, 1):
            if r.owner != i:
                raise ValueError(f"route {i} belongs to user {r.owner}")

    @classmethod
    def stay_home(cls, scenario: Scenario) -> StrategyProfile:
        return cls(scenario, tuple(stay_home(scenario, i) for i in range(1, scenario.num_users + 1)))

    @cached_property
    def shares(self) -> Counter:
        """``m[(k, t)]``: number of routes through each point."""
        return count_shares(self.routes)

    def route(self, user: int) -> Route:
        return self.routes[user - 1]

    def replace(self, user: int, route: Route) -> StrategyProfile:
        routes = list(self.routes)
        routes[user - 1] = route
        return StrategyProfile(self.scenario, tuple(routes))

    def opponents_share(self, user: int) -> Counter:
        shares = Counter(self.shares)
        shares.subtract(self.route(user).points)
        return shares

    def validate(self) -> dict[int, list]:
        return {r.owner: v for r in self.routes if (v := validate_route(self.scenario, r))}

    def worked(self) -> list[list[int]]:
        return [r.worked_tasks(self.scenario) for r in self.routes]


def count_shares(routes: Sequence[Route]) -> Counter:
    shares: Counter = Counter()
    for r in routes:
        shares.update(set(r.points))
    return shares


def payoff_parts(profile: StrategyProfile, user: int) -> tuple[Fraction, Fraction]:
    """Split a payoff into its reward term and its (nonpositive) movement term."""
    sc = profile.scenario
    route = profile.route(user)
    m = profile.shares
    reward = sum(
        (Fraction(rho_star_ticks(sc, k, t), m[k, t]) for k, t in set(route.points)),
        Fraction(0),
    )
    return ticks_to_money(reward), -ticks_to_money(route_cost_ticks(sc, route))


def payoff(profile: StrategyProfile, user: int) -> Fraction:
    """Shared rewards collected along the user's route minus her movement costs."""
    reward, movement = payoff_parts(profile, user)
    return reward + movement


def payoffs(profile: StrategyProfile) -> list[Fraction]:
    return [payoff(profile, i) for i in range(1, profile.scenario.num_users + 1)]


def _harmonic(n: int) -> Fraction:
    return sum((Fraction(1, q) for q in range(1, n + 1)), Fraction(0))


def potential(profile: StrategyProfile) -> Fraction:
    """Exact potential: harmonic-weighted rewards minus all movement costs."""
    sc = profile.scenario
    m = profile.shares
    vertex_term = sum(
        (rho_star_ticks(sc, k, t) * _harmonic(m[k, t]) for k, t in sc.rewarded_points),
        Fraction(0),
    )
    edge_term = sum(route_cost_ticks(sc, r) for r in profile.routes)
    return ticks_to_money(vertex_term - edge_term)


def deviation_delta(profile: StrategyProfile, user: int, new_route: Route) -> tuple[Fraction, Fraction]:
    """Payoff change of ``user`` and potential change, both from scratch."""
    if new_route.owner != user:
        raise ValueError(f"route belongs to user {new_route.owner}, not {user}")
    problems = validate_route(profile.scenario, new_route)
    if problems:
        raise ValueError(f"infeasible route for user {user}: {problems}")
    after = profile.replace(user, new_route)
    return payoff(after, user) - payoff(profile, user), potential(after) - potential(profile)


class NashCheck(NamedTuple):
    is_nash: bool
    user: int | None = None
    route: Route | None = None
    gain: Fraction = Fraction(0)

    def __bool__(self) -> bool:
        return self.is_nash


def is_nash(
    profile: StrategyProfile,
    epsilon: float = DEFAULT_EPSILON,
    planner: RoutePlanner | None = None,
) -> NashCheck:
    """Check that no user gains more than ``epsilon`` by a best response.

    Returns the first improving user and route as a witness otherwise.
    """
    planner = planner or RoutePlanner(profile.scenario)
    for user in range(1, profile.scenario.num_users + 1):
        route, value = planner.best_response(user, profile.opponents_share(user))
        gain = value - payoff(profile, user)
        if gain > epsilon:
            return NashCheck(False, user, route, gain)
    return NashCheck(True)


def rewarded_visits(profile: StrategyProfile) -> int:
    rewarded = set(profile.scenario.rewarded_points)
    return sum(1 for r in profile.routes for p in set(r.points) if p in rewarded)

