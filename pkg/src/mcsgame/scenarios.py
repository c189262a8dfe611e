"""Random scenario generation and the bundled real-world fixture."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from decimal import Decimal
from importlib import resources
from pathlib import Path

import numpy as np

from .io import scenario_from_dict
from .mobility import GeometricMovement
from .model import Location, Scenario, Task, User, to_money


@dataclass(frozen=True)
class GenConfig:
    """Parameters of a random scenario; defaults follow the standard setup."""

    I: int = 10
    K: int = 10
    T: int = 15
    region: float = 1.0
    reward_levels: tuple = (10, 15, 20)
    reputation_levels: int = 3
    c_move: float = 0.1
    speed: float = 0.1
    slot_minutes: float = 1.0
    seed: int = 0
    min_execution_time: int = 2
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for name in ("I", "K", "T", "reputation_levels"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.region <= 0 or self.speed <= 0 or self.slot_minutes <= 0 or self.c_move < 0:
            raise ValueError("region, speed and slot length must be positive; c_move nonnegative")
        if not self.reward_levels:
            raise ValueError("reward_levels must not be empty")
        if self.min_execution_time > self.T:
            raise ValueError("min_execution_time exceeds the horizon")

    def with_(self, **changes) -> GenConfig:
        return replace(self, **changes)


def generate(config: GenConfig) -> Scenario:
    """Uniform random placement of users and tasks in a square region.

    Every user starts at her own location and every task has its own
    location, so ``L = I + K``.  Task times are uniform on
    ``min_execution_time..T``; rewards, reputations and thresholds are
    uniform over their levels.
    """
    rng = np.random.default_rng(config.seed)
    I, K = config.I, config.K
    user_xy = rng.uniform(0.0, config.region, size=(I, 2))
    task_xy = rng.uniform(0.0, config.region, size=(K, 2))
    times = rng.integers(config.min_execution_time, config.T + 1, size=K)
    reward_idx = rng.integers(0, len(config.reward_levels), size=K)
    thresholds = rng.integers(1, config.reputation_levels + 1, size=K)
    reputations = rng.integers(1, config.reputation_levels + 1, size=I)

    positions = [tuple(map(float, p)) for p in np.vstack([user_xy, task_xy])]
    locations = tuple(Location(i + 1, positions[i]) for i in range(I + K))
    coefficient = to_money(config.c_move)
    users = tuple(
        User(i + 1, i + 1, config.speed, coefficient, int(reputations[i])) for i in range(I)
    )
    tasks = tuple(
        Task(
            k + 1,
            I + k + 1,
            int(times[k]),
            Decimal(str(config.reward_levels[reward_idx[k]])),
            int(thresholds[k]),
        )
        for k in range(K)
    )
    movement = GeometricMovement(positions, [config.speed] * I, [coefficient] * I, config.slot_minutes)
    return Scenario(locations, tasks, users, config.T, config.slot_minutes, movement, {"seed": config.seed})


def fixture_path() -> Path:
    return Path(str(resources.files("mcsgame") / "data" / "real_world.json"))


def real_world_fixture() -> Scenario:
    """Three users (one driver, two walkers) and three tasks on three locations."""
    path = fixture_path()
    return scenario_from_dict(json.loads(path.read_text()), path.parent)
