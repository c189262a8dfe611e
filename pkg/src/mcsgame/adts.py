"""Asynchronous distributed task selection: best-response dynamics over a claim board.

Users update one at a time.  Each reads the aggregate claims ``q`` for the
rewarded points, removes her own claims, computes a best response, and
re-claims the rewarded points on her new route.  The provider only ever sees
claims, never routes.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal

from .game import DEFAULT_EPSILON, StrategyProfile, is_nash, payoff, potential
from .model import Scenario, TaskTimePoint
from .routing import Route, RoutePlanner

UpdateOrder = Literal["round_robin", "random"]


class ClaimBoard:
    """Provider-side claim state ``q_i`` for every rewarded point.

    Only aggregates and a caller's own claims are exposed.
    """

    def __init__(self, rewarded: tuple[TaskTimePoint, ...], num_users: int):
        self._rewarded = frozenset(rewarded)
        self._claims: list[frozenset[TaskTimePoint]] = [frozenset()] * (num_users + 1)
        self._aggregate: dict[TaskTimePoint, int] = {p: 0 for p in rewarded}
        self.clock = 0

    @classmethod
    def for_scenario(cls, scenario: Scenario) -> ClaimBoard:
        return cls(scenario.rewarded_points, scenario.num_users)

    def copy(self) -> ClaimBoard:
        other = ClaimBoard.__new__(ClaimBoard)
        other._rewarded = self._rewarded
        other._claims = list(self._claims)
        other._aggregate = dict(self._aggregate)
        other.clock = self.clock
        return other

    def aggregate(self) -> dict[TaskTimePoint, int]:
        return dict(self._aggregate)

    def own_claims(self, user: int) -> frozenset[TaskTimePoint]:
        return self._claims[user]

    def others(self, user: int) -> dict[TaskTimePoint, int]:
        """``q - q_i`` for every rewarded point."""
        mine = self._claims[user]
        return {p: q - (p in mine) for p, q in self._aggregate.items()}

    def claim(self, user: int, route: Route) -> None:
        new = frozenset(route.points) & self._rewarded
        old = self._claims[user]
        for p in old - new:
            self._aggregate[p] -= 1
        for p in new - old:
            self._aggregate[p] += 1
        self._claims[user] = new

    def recount(self) -> dict[TaskTimePoint, int]:
        """Aggregates recomputed from the per-user claims."""
        out = {p: 0 for p in self._aggregate}
        for claims in self._claims:
            for p in claims:
                out[p] += 1
        return out


def apply_claim_update(board: ClaimBoard, user: int, route: Route) -> ClaimBoard:
    """Return a new board with ``user``'s claims replaced by those of ``route``."""
    new = board.copy()
    new.claim(user, route)
    return new


@dataclass(frozen=True)
class AdtsConfig:
    tau_max: int = 50
    update_order: UpdateOrder = "round_robin"
    seed: int | None = None
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        if self.tau_max < 1:
            raise ValueError("tau_max must be >= 1")
        if self.update_order not in ("round_robin", "random"):
            raise ValueError(f"unknown update order {self.update_order!r}")


@dataclass(frozen=True)
class AdtsStep:
    tau: int
    pass_index: int
    user: int
    old_payoff: Fraction
    new_payoff: Fraction
    potential: Fraction
    applied: bool


@dataclass
class AdtsTrace:
    steps: list[AdtsStep] = field(default_factory=list)
    profile: StrategyProfile | None = None
    converged: bool = False
    passes: int = 0

    @property
    def updates(self) -> list[AdtsStep]:
        return [s for s in self.steps if s.applied]

    @property
    def passes_to_converge(self) -> int:
        """Index of the last pass that changed any route (0 if none did)."""
        ups = self.updates
        return ups[-1].pass_index if ups else 0

    @property
    def iterations_to_converge(self) -> int:
        """Micro-iteration of the last applied update (0 if none)."""
        ups = self.updates
        return ups[-1].tau if ups else 0

    def to_lines(self) -> str:
        rows = ["iteration\tuser\tdelta_payoff\tpotential\tapplied"]
        for s in self.steps:
            rows.append(
                f"{s.tau}\t{s.user}\t{float(s.new_payoff - s.old_payoff):.10g}\t{float(s.potential):.10g}\t{int(s.applied)}"
            )
        return "\n".join(rows) + "\n"


def run_adts(scenario: Scenario, config: AdtsConfig = AdtsConfig()) -> AdtsTrace:
    """Run best-response dynamics from the all-stay-home profile.

    Each pass visits every user once, in id order or in a seeded random
    permutation.  A user's route changes only when the best response beats
    her current payoff by more than ``epsilon``.  The run stops after a pass
    with no change (converged) or after ``tau_max`` passes.
    """
    I = scenario.num_users
    planner = RoutePlanner(scenario)
    board = ClaimBoard.for_scenario(scenario)
    profile = StrategyProfile.stay_home(scenario)
    rng = random.Random(config.seed)
    trace = AdtsTrace()
    phi = potential(profile)
    tau = 0
    for pass_index in range(1, config.tau_max + 1):
        order = list(range(1, I + 1))
        if config.update_order == "random":
            rng.shuffle(order)
        changed = False
        for user in order:
            tau += 1
            board.clock = tau
            route, value = planner.best_response(user, board.others(user))
            current = payoff(profile, user)
            applied = value - current > config.epsilon
            if applied:
                profile = profile.replace(user, route)
                board.claim(user, route)
                phi = potential(profile)
                changed = True
            trace.steps.append(AdtsStep(tau, pass_index, user, current, value if applied else current, phi, applied))
        trace.passes = pass_index
        if not changed:
            trace.converged = True
            break
    trace.profile = profile
    return trace


def audit(trace: AdtsTrace, epsilon: float = DEFAULT_EPSILON) -> list[str]:
    """Post-run checks: strictly rising potential and, if converged, a Nash profile."""
    problems = []
    prev = Fraction(0)
    for s in trace.steps:
        if s.applied and not s.potential > prev:
            problems.append(f"potential did not increase at iteration {s.tau}")
        prev = s.potential
    if trace.converged and not is_nash(trace.profile, epsilon):
        problems.append("converged profile is not a Nash equilibrium")
    return problems
