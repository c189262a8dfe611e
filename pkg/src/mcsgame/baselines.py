"""Greedy distributed (GD) scheme: every user chases tasks on her own."""

from __future__ import annotations

from .central import chain_route
from .game import StrategyProfile
from .model import Scenario


def greedy_tasks(scenario: Scenario, user: int) -> list[int]:
    """Myopic task sequence of one user, ignoring everyone else.

    From her current location and next free slot she repeatedly takes the
    earliest task she is eligible for, can reach in time, and whose full
    reward covers the move; equal times go to the higher reward, then the
    lower id.
    """
    eligible = scenario.eligible(user)
    free, at = 1, scenario.virtual_task_id(user)
    picked: list[int] = []
    while True:
        best = None
        for task in scenario.tasks:
            k = task.id
            if k not in eligible or task.execution_time <= free:
                continue
            if task.execution_time - free < scenario.move_time(user, at, k):
                continue
            if scenario.reward_ticks[k] < scenario.move_cost_ticks(user, at, k):
                continue
            key = (task.execution_time, -scenario.reward_ticks[k], k)
            if best is None or key < best:
                best = key
        if best is None:
            return picked
        k = best[2]
        picked.append(k)
        free, at = scenario.tasks[k - 1].execution_time, k


def greedy_distributed(scenario: Scenario) -> StrategyProfile:
    routes = tuple(
        chain_route(scenario, i, greedy_tasks(scenario, i)) for i in range(1, scenario.num_users + 1)
    )
    return StrategyProfile(scenario, routes)
