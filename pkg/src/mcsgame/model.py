"""Domain entities shared by every solver: locations, tasks, users, scenarios.

Money is held as :class:`~decimal.Decimal` with four fractional digits at the
API surface and as integer *ticks* (units of 1e-4) inside the solvers, so
reward splitting and potential bookkeeping stay exact.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from decimal import ROUND_CEILING, ROUND_HALF_EVEN, Decimal
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple, Protocol, Sequence

MONEY_PLACES = 4
TICKS_PER_UNIT = 10**MONEY_PLACES
_QUANTUM = Decimal(1).scaleb(-MONEY_PLACES)


class ScenarioError(ValueError):
    """Raised for malformed scenarios and invalid lookups."""


class TriangleWarning(UserWarning):
    """Movement costs violate c(l,l') + c(l',l'') >= c(l,l'')."""


def to_money(value, *, round_up: bool = False) -> Decimal:
    """Quantize ``value`` to four decimal places.

    ``round_up`` rounds toward +inf, which keeps subadditive inputs
    subadditive after quantization.
    """
    if isinstance(value, float):
        value = Decimal(repr(value)) if not round_up else Decimal(value)
    elif isinstance(value, Fraction):
        value = Decimal(value.numerator) / Decimal(value.denominator)
    else:
        value = Decimal(value)
    return value.quantize(_QUANTUM, rounding=ROUND_CEILING if round_up else ROUND_HALF_EVEN)


def money_to_ticks(value: Decimal) -> int:
    return int(to_money(value).scaleb(MONEY_PLACES))


def ticks_to_money(ticks) -> Fraction:
    return Fraction(ticks) / TICKS_PER_UNIT


class TaskTimePoint(NamedTuple):
    task: int
    time: int


@dataclass(frozen=True)
class Location:
    id: int
    position: tuple[float, float] | None = None


@dataclass(frozen=True)
class Task:
    id: int
    location: int
    execution_time: int
    reward: Decimal
    reputation_threshold: int = 0

    def __post_init__(self):
        object.__setattr__(self, "reward", to_money(self.reward))
        if self.reward < 0:
            raise ScenarioError(f"task {self.id}: negative reward {self.reward}")


@dataclass(frozen=True)
class User:
    """A mobile user.

    ``speed`` (km/min) and ``cost_coefficient`` (money/km) only matter for
    geometric scenarios; ``mode`` selects a movement table for ingested ones.
    """

    id: int
    initial_location: int
    speed: float | None = None
    cost_coefficient: Decimal | None = None
    reputation: int = 0
    mode: str | None = None


@dataclass(frozen=True)
class VirtualTask:
    id: int
    owner: int
    location: int
    reward: Decimal = Decimal(0)


class MovementModel(Protocol):
    """Per-user movement times (slots) and costs (ticks) between locations."""

    geometric: bool

    def time(self, user: int, src: int, dst: int) -> int: ...

    def cost_ticks(self, user: int, src: int, dst: int) -> int: ...


@dataclass(frozen=True, eq=False)
class Scenario:
    """Immutable world description.

    Task ids are ``1..K``; the virtual task of user ``i`` has id ``K + i``.
    """

    locations: tuple[Location, ...]
    tasks: tuple[Task, ...]
    users: tuple[User, ...]
    horizon: int
    slot_length: float
    movement: MovementModel
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for name in ("locations", "tasks", "users"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        for expected, obj in enumerate(self.locations, 1):
            if obj.id != expected:
                raise ScenarioError(f"location ids must be 1..L in order, got {obj.id} at {expected}")
        for expected, obj in enumerate(self.tasks, 1):
            if obj.id != expected:
                raise ScenarioError(f"task ids must be 1..K in order, got {obj.id} at {expected}")
        for expected, obj in enumerate(self.users, 1):
            if obj.id != expected:
                raise ScenarioError(f"user ids must be 1..I in order, got {obj.id} at {expected}")
        if self.horizon < 1:
            raise ScenarioError("horizon must be >= 1")
        if self.slot_length <= 0:
            raise ScenarioError("slot_length must be positive")
        L = len(self.locations)
        for task in self.tasks:
            if not 1 <= task.location <= L:
                raise ScenarioError(f"task {task.id}: unknown location {task.location}")
            if not 1 <= task.execution_time <= self.horizon:
                raise ScenarioError(
                    f"task {task.id}: execution time {task.execution_time} outside 1..{self.horizon}"
                )
        for user in self.users:
            if not 1 <= user.initial_location <= L:
                raise ScenarioError(f"user {user.id}: unknown location {user.initial_location}")

    @property
    def num_tasks(self) -> int:
        return len(self.tasks)

    @property
    def num_users(self) -> int:
        return len(self.users)

    @property
    def num_locations(self) -> int:
        return len(self.locations)

    def virtual_task_id(self, user: int) -> int:
        return self.num_tasks + user

    def is_virtual(self, task_id: int) -> bool:
        return task_id > self.num_tasks

    def virtual_task(self, user: int) -> VirtualTask:
        return VirtualTask(self.virtual_task_id(user), user, self.users[user - 1].initial_location)

    def user(self, user_id: int) -> User:
        if not 1 <= user_id <= self.num_users:
            raise ScenarioError(f"unknown user {user_id}")
        return self.users[user_id - 1]

    def task(self, task_id: int) -> Task:
        if not 1 <= task_id <= self.num_tasks:
            raise ScenarioError(f"unknown task {task_id}")
        return self.tasks[task_id - 1]

    @cached_property
    def task_locations(self) -> tuple[int, ...]:
        """Location of every task id, index 0 unused; virtual ids included."""
        return (0,) + tuple(t.location for t in self.tasks) + tuple(
            u.initial_location for u in self.users
        )

    @cached_property
    def reward_ticks(self) -> tuple[int, ...]:
        return (0,) + tuple(money_to_ticks(t.reward) for t in self.tasks)

    def location_of(self, task_id: int) -> int:
        if not 1 <= task_id <= self.num_tasks + self.num_users:
            raise ScenarioError(f"unknown task {task_id}")
        return self.task_locations[task_id]

    @cached_property
    def rewarded_points(self) -> tuple[TaskTimePoint, ...]:
        """The points with positive time-dependent reward."""
        return tuple(
            TaskTimePoint(t.id, t.execution_time) for t in self.tasks if t.reward > 0
        )

    @cached_property
    def _eligible(self) -> dict[int, frozenset[int]]:
        return {}

    def eligible(self, user_id: int) -> frozenset[int]:
        cache = self._eligible
        if user_id not in cache:
            user = self.user(user_id)
            ids = {t.id for t in self.tasks if user.reputation >= t.reputation_threshold}
            ids.add(self.virtual_task_id(user_id))
            cache[user_id] = frozenset(ids)
        return cache[user_id]

    def move_time(self, user: int, src_task: int, dst_task: int) -> int:
        """Movement time between the locations of two (possibly virtual) tasks."""
        return self.movement.time(user, self.task_locations[src_task], self.task_locations[dst_task])

    def move_cost_ticks(self, user: int, src_task: int, dst_task: int) -> int:
        return self.movement.cost_ticks(
            user, self.task_locations[src_task], self.task_locations[dst_task]
        )

    def relevant_locations(self, user_id: int) -> list[int]:
        """Locations a route of ``user_id`` can ever occupy."""
        locs = {self.task_locations[k] for k in self.eligible(user_id)}
        return sorted(locs)

    def validate(self, *, strict: bool = False) -> list[str]:
        """Check movement tables; return triangle-inequality violations.

        Movement-time violations always raise.  Cost triangle violations are
        warned about, or raised under ``strict``.
        """
        violations: list[str] = []
        for user in self.users:
            locs = self.relevant_locations(user.id)
            mv = self.movement
            for l in locs:
                if mv.time(user.id, l, l) != 1:
                    raise ScenarioError(f"user {user.id}: staying time at {l} must be 1")
                for m in locs:
                    if mv.time(user.id, l, m) < 1:
                        raise ScenarioError(f"user {user.id}: movement time {l}->{m} below 1")
                    if mv.cost_ticks(user.id, l, m) < 0:
                        raise ScenarioError(f"user {user.id}: negative cost {l}->{m}")
            cost = {(l, m): mv.cost_ticks(user.id, l, m) for l in locs for m in locs}
            for l in locs:
                for m in locs:
                    for n in locs:
                        if cost[l, m] + cost[m, n] < cost[l, n]:
                            violations.append(f"user {user.id}: c({l},{m})+c({m},{n}) < c({l},{n})")
        if violations:
            msg = f"{len(violations)} movement-cost triangle violations, first: {violations[0]}"
            if strict:
                raise ScenarioError(msg)
            warnings.warn(msg, TriangleWarning, stacklevel=2)
        return violations

    @cached_property
    def satisfies_triangle(self) -> bool:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TriangleWarning)
            return not self.validate()


def rho_star(scenario: Scenario, point: TaskTimePoint | tuple[int, int]) -> Decimal:
    """Reward of a task-time point: the task reward at its execution time, else 0."""
    task_id, time = point
    if scenario.is_virtual(task_id):
        scenario.location_of(task_id)
        return Decimal(0)
    task = scenario.task(task_id)
    return task.reward if time == task.execution_time else to_money(0)


def rho_star_ticks(scenario: Scenario, task_id: int, time: int) -> int:
    if task_id <= scenario.num_tasks and scenario.tasks[task_id - 1].execution_time == time:
        return scenario.reward_ticks[task_id]
    return 0


def eligible_set(scenario: Scenario, user: int | User) -> frozenset[int]:
    """Tasks whose reputation threshold the user meets, plus her virtual task."""
    user_id = user.id if isinstance(user, User) else user
    return scenario.eligible(user_id)


def is_valid_point(scenario: Scenario, point: Sequence[int]) -> bool:
    task_id, time = point
    return 1 <= task_id <= scenario.num_tasks + scenario.num_users and 1 <= time <= scenario.horizon
