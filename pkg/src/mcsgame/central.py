"""Centralized benchmark: social surplus, greedy allocation and exact search."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal, NamedTuple, Sequence

from .game import StrategyProfile
from .model import Scenario, ScenarioError, TaskTimePoint, ticks_to_money
from .routing import Route, route_cost_ticks

EXACT_NODE_LIMIT = 10**7

Mode = Literal["pruned", "unrestricted"]


class InstanceTooLarge(RuntimeError):
    """The exact search space exceeds its guard."""


class Surplus(NamedTuple):
    reward: Fraction
    cost: Fraction
    surplus: Fraction


def chain_route(scenario: Scenario, user: int, tasks: Sequence[int]) -> Route:
    """Route that serves ``tasks`` in execution-time order.

    The user moves straight to the next task location and waits there.
    Raises :class:`ValueError` when a task cannot be reached on time.
    """
    ordered = sorted(tasks, key=lambda k: (scenario.tasks[k - 1].execution_time, k))
    prev = scenario.virtual_task_id(user)
    points = [TaskTimePoint(prev, 1)]
    for k in ordered:
        t_k = scenario.tasks[k - 1].execution_time
        arrive = points[-1].time + scenario.move_time(user, prev, k)
        if arrive > t_k:
            raise ValueError(f"user {user} cannot reach task {k} by time {t_k}")
        points.extend(TaskTimePoint(k, t) for t in range(arrive, t_k + 1))
        prev = k
    return Route(user, tuple(points))


@dataclass(frozen=True)
class Allocation:
    """Task-to-user assignment ``y[i][k]`` with the routes it induces."""

    scenario: Scenario = field(repr=False)
    assigned: tuple[tuple[int, ...], ...]

    @classmethod
    def from_user_tasks(cls, scenario: Scenario, user_tasks: Sequence[Sequence[int]]) -> Allocation:
        return cls(scenario, tuple(tuple(sorted(ts)) for ts in user_tasks))

    def y(self, user: int, task: int) -> int:
        return int(task in self.assigned[user - 1])

    def users_of(self, task: int) -> list[int]:
        return [i for i, ts in enumerate(self.assigned, 1) if task in ts]

    def routes(self) -> tuple[Route, ...]:
        return tuple(chain_route(self.scenario, i, ts) for i, ts in enumerate(self.assigned, 1))

    def profile(self) -> StrategyProfile:
        return StrategyProfile(self.scenario, self.routes())

    def to_rows(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["task", "user"])
        for k in range(1, self.scenario.num_tasks + 1):
            users = self.users_of(k)
            w.writerow([k, ";".join(map(str, users)) if users else "none"])
        return out.getvalue()


def worked_matrix(profile: StrategyProfile) -> list[set[int]]:
    """Tasks each user works on: points ``(k, t[k])`` on her route."""
    return [set(r.worked_tasks(profile.scenario)) for r in profile.routes]


def surplus(scenario: Scenario, profile: StrategyProfile | Allocation) -> Surplus:
    """Reward of covered tasks, total movement cost, and their difference."""
    if isinstance(profile, Allocation):
        profile = profile.profile()
    covered = set().union(*worked_matrix(profile)) if profile.routes else set()
    reward = ticks_to_money(sum(scenario.reward_ticks[k] for k in covered))
    cost = ticks_to_money(sum(route_cost_ticks(scenario, r) for r in profile.routes))
    return Surplus(reward, cost, reward - cost)


def greedy_centralized(scenario: Scenario) -> Allocation:
    """Greedy allocation in execution-time order.

    Each task goes to the first user, by ascending movement cost from her
    current location, who is eligible, can arrive in time and is not paid
    less than that cost.  Ties break on task id and user id.
    """
    I = scenario.num_users
    next_free = [1] * (I + 1)
    at_task = [0] + [scenario.virtual_task_id(i) for i in range(1, I + 1)]
    assigned: list[list[int]] = [[] for _ in range(I)]
    users = range(1, I + 1)
    for task in sorted(scenario.tasks, key=lambda t: (t.execution_time, t.id)):
        k = task.id
        reward = scenario.reward_ticks[k]
        costs = {i: scenario.move_cost_ticks(i, at_task[i], k) for i in users}
        for i in sorted(users, key=lambda i: (costs[i], i)):
            if (
                k in scenario.eligible(i)
                and task.execution_time - next_free[i] >= scenario.move_time(i, at_task[i], k)
                and reward >= costs[i]
            ):
                next_free[i] = task.execution_time
                at_task[i] = k
                assigned[i - 1].append(k)
                break
    return Allocation.from_user_tasks(scenario, assigned)


def _search_space(scenario: Scenario, mode: Mode) -> int:
    per_task = scenario.num_users + 1 if mode == "pruned" else 2**scenario.num_users
    return per_task**scenario.num_tasks


def exact_cta(scenario: Scenario, mode: Mode = "pruned") -> tuple[Allocation, Fraction]:
    """Surplus-maximizing allocation by depth-first branch and bound.

    Tasks are decided in execution-time order; each goes to nobody, to one
    user (``pruned``) or to any subset of users (``unrestricted``).  A user's
    assigned tasks must chain feasibly from her start.  The bound is the
    current surplus plus all undecided rewards.
    """
    if mode not in ("pruned", "unrestricted"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "pruned" and not scenario.satisfies_triangle:
        raise ScenarioError("pruned exact search needs movement costs satisfying the triangle inequality")
    if _search_space(scenario, mode) > EXACT_NODE_LIMIT:
        raise InstanceTooLarge(
            f"instance too large for exact solve: {_search_space(scenario, mode)} > {EXACT_NODE_LIMIT} assignments"
        )
    I = scenario.num_users
    tasks = sorted(scenario.tasks, key=lambda t: (t.execution_time, t.id))
    rewards = [scenario.reward_ticks[t.id] for t in tasks]
    remaining = [sum(rewards[j:]) for j in range(len(tasks) + 1)]
    if mode == "pruned":
        options_per_task = [[(i,) for i in range(1, I + 1)] + [()] for _ in tasks]
    else:
        subsets = [tuple(i for i in range(1, I + 1) if mask >> (i - 1) & 1) for mask in range(1, 2**I)]
        subsets.sort(key=lambda s: (len(s), s))
        options_per_task = [subsets + [()] for _ in tasks]

    # Per-user state: (free time, current task id).
    state = [None] + [(1, scenario.virtual_task_id(i)) for i in range(1, I + 1)]
    chosen: list[tuple[int, ...]] = []
    best_value = 0
    best_choice: list[tuple[int, ...]] = [()] * len(tasks)

    def step_cost(i: int, task) -> int | None:
        free, at = state[i]
        if task.id not in scenario.eligible(i):
            return None
        if task.execution_time - free < scenario.move_time(i, at, task.id):
            return None
        return scenario.move_cost_ticks(i, at, task.id)

    def dfs(j: int, value: int) -> None:
        nonlocal best_value, best_choice
        if value > best_value:
            best_value, best_choice = value, chosen + [()] * (len(tasks) - j)
        if j == len(tasks) or value + remaining[j] <= best_value:
            return
        task = tasks[j]
        for users in options_per_task[j]:
            total = 0
            for i in users:
                c = step_cost(i, task)
                if c is None:
                    break
                total += c
            else:
                gain = (rewards[j] if users else 0) - total
                saved = [state[i] for i in users]
                for i in users:
                    state[i] = (task.execution_time, task.id)
                chosen.append(users)
                dfs(j + 1, value + gain)
                chosen.pop()
                for i, s in zip(users, saved):
                    state[i] = s

    dfs(0, 0)
    user_tasks: list[list[int]] = [[] for _ in range(I)]
    for task, users in zip(tasks, best_choice):
        for i in users:
            user_tasks[i - 1].append(task.id)
    return Allocation.from_user_tasks(scenario, user_tasks), ticks_to_money(best_value)
