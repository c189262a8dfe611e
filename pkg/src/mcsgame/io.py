"""Scenario files: a versioned JSON document.

Top-level keys: ``schema``, ``locations``, ``tasks``, ``users``, ``horizon``,
``slot_length``, ``movement_time``, ``movement_cost``.  Movement is either the
string ``"geometric"`` (computed from positions, speeds and cost
coefficients) or ``{"by_class": {class: LxL matrix}}`` where a user's class
is her ``mode`` field, or ``"user<id>"`` when she has none.  A scenario may
instead carry ``"movement_document": <csv path>`` with rows
``mode,from_location,to_location,minutes,cost``.
"""

from __future__ import annotations

import json
from decimal import Decimal
from pathlib import Path

from .mobility import GeometricMovement, MovementTables, TableMovement, ingest_movement_table
from .model import Location, Scenario, ScenarioError, Task, User, to_money

SCHEMA = "mcsgame.scenario/1"


def user_class(user: User) -> str:
    return user.mode or f"user{user.id}"


def _strip(matrix) -> list[list]:
    return [list(row[1:]) for row in matrix[1:]]


def _pad(matrix, convert) -> tuple[tuple, ...]:
    n = len(matrix)
    rows = [(convert(0),) * (n + 1)]
    for row in matrix:
        if len(row) != n:
            raise ScenarioError("movement matrices must be square")
        rows.append((convert(0),) + tuple(convert(v) for v in row))
    return tuple(rows)


def scenario_to_dict(scenario: Scenario) -> dict:
    doc: dict = {
        "schema": SCHEMA,
        "horizon": scenario.horizon,
        "slot_length": scenario.slot_length,
        "locations": [
            {"id": l.id, **({"position": list(l.position)} if l.position is not None else {})}
            for l in scenario.locations
        ],
        "tasks": [
            {
                "id": t.id,
                "location": t.location,
                "execution_time": t.execution_time,
                "reward": str(t.reward),
                "reputation_threshold": t.reputation_threshold,
            }
            for t in scenario.tasks
        ],
        "users": [],
    }
    for u in scenario.users:
        entry: dict = {"id": u.id, "initial_location": u.initial_location, "reputation": u.reputation}
        if u.speed is not None:
            entry["speed"] = u.speed
        if u.cost_coefficient is not None:
            entry["cost_coefficient"] = str(u.cost_coefficient)
        if u.mode is not None:
            entry["mode"] = u.mode
        doc["users"].append(entry)
    mv = scenario.movement
    if isinstance(mv, GeometricMovement):
        doc["movement_time"] = doc["movement_cost"] = "geometric"
    elif isinstance(mv, TableMovement):
        doc["movement_time"] = {"by_class": {m: _strip(v) for m, v in mv.tables.time.items()}}
        doc["movement_cost"] = {
            "by_class": {m: [[str(c) for c in row] for row in _strip(v)] for m, v in mv.tables.cost.items()}
        }
    else:
        raise ScenarioError(f"cannot serialise movement model {type(mv).__name__}")
    if scenario.metadata:
        doc["metadata"] = scenario.metadata
    return doc


def scenario_from_dict(doc: dict, base_dir: Path | None = None) -> Scenario:
    schema = doc.get("schema", SCHEMA)
    if schema != SCHEMA:
        raise ScenarioError(f"unsupported scenario schema {schema!r}")
    try:
        locations = tuple(
            Location(int(l["id"]), tuple(l["position"]) if l.get("position") is not None else None)
            for l in doc["locations"]
        )
        tasks = tuple(
            Task(
                int(t["id"]),
                int(t["location"]),
                int(t["execution_time"]),
                Decimal(str(t["reward"])),
                int(t.get("reputation_threshold", 0)),
            )
            for t in doc["tasks"]
        )
        users = tuple(
            User(
                int(u["id"]),
                int(u["initial_location"]),
                float(u["speed"]) if u.get("speed") is not None else None,
                to_money(str(u["cost_coefficient"])) if u.get("cost_coefficient") is not None else None,
                int(u.get("reputation", 0)),
                u.get("mode"),
            )
            for u in doc["users"]
        )
        horizon = int(doc["horizon"])
        slot = float(doc["slot_length"])
    except KeyError as exc:
        raise ScenarioError(f"scenario document missing field {exc}") from None

    if "movement_document" in doc:
        path = Path(doc["movement_document"])
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        tables = ingest_movement_table(path.read_text(), slot, len(locations))
        movement = TableMovement(tables, [user_class(u) for u in users])
    elif doc.get("movement_time") == "geometric":
        if any(l.position is None for l in locations):
            raise ScenarioError("geometric movement needs every location position")
        if any(u.speed is None or u.cost_coefficient is None for u in users):
            raise ScenarioError("geometric movement needs speed and cost_coefficient per user")
        movement = GeometricMovement(
            [l.position for l in locations],
            [u.speed for u in users],
            [u.cost_coefficient for u in users],
            slot,
        )
    else:
        try:
            times = doc["movement_time"]["by_class"]
            costs = doc["movement_cost"]["by_class"]
        except (KeyError, TypeError):
            raise ScenarioError("movement_time/movement_cost must be 'geometric' or {'by_class': ...}") from None
        tables = MovementTables(
            time={m: _pad(v, int) for m, v in times.items()},
            cost={m: _pad(v, lambda c: to_money(str(c))) for m, v in costs.items()},
        )
        movement = TableMovement(tables, [user_class(u) for u in users])
    return Scenario(locations, tasks, users, horizon, slot, movement, dict(doc.get("metadata", {})))


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    return scenario_from_dict(json.loads(path.read_text()), path.parent)


def save_scenario(scenario: Scenario, path: str | Path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(scenario), indent=2) + "\n")
