"""Evaluation quantities: payoffs, Jain's index, coverage, reward per measurement."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Sequence

from .central import Allocation, surplus, worked_matrix
from .game import StrategyProfile, payoffs
from .model import Scenario


class UndefinedMetric(ValueError):
    pass


def jain_index(values: Sequence) -> float:
    """``(sum U)^2 / (n * sum U^2)``; an all-zero vector counts as perfectly fair."""
    vals = [Fraction(v) if not isinstance(v, float) else v for v in values]
    if not vals:
        raise UndefinedMetric("Jain's index of an empty vector")
    sq = sum(v * v for v in vals)
    if sq == 0:
        return 1.0
    return float(sum(vals) ** 2 / (len(vals) * sq))


def _profile(obj: StrategyProfile | Allocation) -> StrategyProfile:
    return obj.profile() if isinstance(obj, Allocation) else obj


def coverage(scenario: Scenario, obj: StrategyProfile | Allocation) -> Fraction:
    """Fraction of tasks worked by at least one user."""
    if scenario.num_tasks == 0:
        return Fraction(0)
    covered = set().union(*worked_matrix(_profile(obj)))
    return Fraction(len(covered), scenario.num_tasks)


def measurements(obj: StrategyProfile | Allocation) -> int:
    return sum(len(ts) for ts in worked_matrix(_profile(obj)))


def reward_per_measurement(scenario: Scenario, obj: StrategyProfile | Allocation) -> Fraction:
    """Total reward paid out divided by the number of (user, task) measurements."""
    profile = _profile(obj)
    n = measurements(profile)
    if n == 0:
        raise UndefinedMetric("no measurements collected")
    return surplus(scenario, profile).reward / n


@dataclass
class RunReport:
    scheme: str
    seed: int | None
    payoffs: list[float]
    avg_payoff: float
    jain: float
    coverage: float
    reward_per_measurement: float | None
    surplus: float
    iterations: int | None = None
    routes: list[str] | None = None

    def as_dict(self) -> dict:
        return asdict(self)


def evaluate(
    scenario: Scenario,
    obj: StrategyProfile | Allocation,
    scheme: str,
    seed: int | None = None,
    iterations: int | None = None,
) -> RunReport:
    profile = _profile(obj)
    pay = payoffs(profile)
    try:
        rpm = float(reward_per_measurement(scenario, profile))
    except UndefinedMetric:
        rpm = None
    return RunReport(
        scheme=scheme,
        seed=seed,
        payoffs=[float(p) for p in pay],
        avg_payoff=float(sum(pay) / len(pay)) if pay else 0.0,
        jain=jain_index(pay) if pay else 1.0,
        coverage=float(coverage(scenario, profile)),
        reward_per_measurement=rpm,
        surplus=float(surplus(scenario, profile).surplus),
        iterations=iterations,
        routes=[" -> ".join(map(str, r.worked_tasks(scenario))) or "-" for r in profile.routes],
    )
