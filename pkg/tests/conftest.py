from __future__ import annotations

import random

import pytest

from mcsgame.io import scenario_from_dict
from mcsgame.scenarios import GenConfig, generate


def table_scenario(times, costs, tasks, users, horizon, classes=None):
    """Scenario over explicit L x L movement matrices.

    ``tasks`` holds ``(location, execution_time, reward[, threshold])`` tuples,
    ``users`` holds ``(initial_location[, reputation])``.  Every user shares
    the one movement class unless ``classes`` maps class name to
    ``(times, costs)`` and users carry a third element naming it.
    """
    n = len(times)
    classes = classes or {"m": (times, costs)}
    doc = {
        "schema": "mcsgame.scenario/1",
        "horizon": horizon,
        "slot_length": 1.0,
        "locations": [{"id": j} for j in range(1, n + 1)],
        "tasks": [
            {
                "id": k,
                "location": spec[0],
                "execution_time": spec[1],
                "reward": str(spec[2]),
                "reputation_threshold": spec[3] if len(spec) > 3 else 0,
            }
            for k, spec in enumerate(tasks, 1)
        ],
        "users": [
            {
                "id": i,
                "initial_location": spec[0],
                "reputation": spec[1] if len(spec) > 1 else 0,
                "mode": spec[2] if len(spec) > 2 else "m",
            }
            for i, spec in enumerate(users, 1)
        ],
        "movement_time": {"by_class": {c: tc[0] for c, tc in classes.items()}},
        "movement_cost": {"by_class": {c: [[str(x) for x in row] for row in tc[1]] for c, tc in classes.items()}},
    }
    return scenario_from_dict(doc)


def uniform_tables(n, delta=1, cost=0):
    times = [[1 if a == b else delta for b in range(n)] for a in range(n)]
    costs = [[0 if a == b else cost for b in range(n)] for a in range(n)]
    return times, costs


def random_table_scenario(rng: random.Random, max_users=3, max_tasks=4, max_horizon=8, max_locations=5):
    """Arbitrary (possibly non-metric) movement tables."""
    L = rng.randint(1, max_locations)
    I = rng.randint(1, max_users)
    K = rng.randint(1, max_tasks)
    T = rng.randint(1, max_horizon)
    times = [[1 if a == b else rng.randint(1, 4) for b in range(L)] for a in range(L)]
    costs = [[0 if a == b else rng.choice([0, 1, 2.5, 4, 7]) for b in range(L)] for a in range(L)]
    tasks = [
        (rng.randint(1, L), rng.randint(1, T), rng.choice([0, 5, 10, 15, 20]), rng.randint(0, 2))
        for _ in range(K)
    ]
    users = [(rng.randint(1, L), rng.randint(0, 2)) for _ in range(I)]
    return table_scenario(times, costs, tasks, users, T)


def small_generated(seed: int, I: int = 3, K: int = 4, T: int = 8, **kw):
    return generate(GenConfig(I=I, K=K, T=T, seed=seed, **kw))


@pytest.fixture
def fixture_scenario():
    from mcsgame.scenarios import real_world_fixture

    return real_world_fixture()


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
