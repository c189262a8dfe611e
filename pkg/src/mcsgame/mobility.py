"""Movement times and costs: geometric (computed) and tabulated (ingested)."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from decimal import Decimal
from typing import Callable, Iterable, Mapping, Sequence

from .model import ScenarioError, money_to_ticks, to_money

Point = tuple[float, float]


def euclidean(a: Point, b: Point) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def geometric_movement_time(dist_km: float, speed_km_per_min: float, slot_minutes: float) -> int:
    """Slots needed to cover ``dist_km``: ``max(1, ceil(dist / (speed * slot)))``."""
    if speed_km_per_min <= 0:
        raise ValueError(f"speed must be positive, got {speed_km_per_min}")
    if slot_minutes <= 0:
        raise ValueError(f"slot length must be positive, got {slot_minutes}")
    if dist_km < 0:
        raise ValueError(f"distance must be nonnegative, got {dist_km}")
    # Round before ceiling so 0.2 / (0.1 * 1) lands on 2, not 3.
    ratio = round(dist_km / (speed_km_per_min * slot_minutes), 9)
    return max(1, math.ceil(ratio))


def geometric_movement_cost(dist_km: float, cost_coefficient) -> Decimal:
    """Linear distance cost, rounded up to the money quantum.

    Rounding up keeps the triangle inequality intact for metric distances.
    """
    if dist_km < 0 or Decimal(str(cost_coefficient)) < 0:
        raise ValueError("distance and cost coefficient must be nonnegative")
    # Multiply in decimal so 0.5 * 0.1 stays 0.05 before rounding up.
    return to_money(Decimal(str(cost_coefficient)) * Decimal(repr(float(dist_km))), round_up=True)


class GeometricMovement:
    """Movement over planar coordinates, evaluated lazily.

    Nothing is tabulated, so scenarios with tens of thousands of locations
    stay cheap; pair values are memoised on first use.
    """

    geometric = True

    def __init__(
        self,
        positions: Sequence[Point],
        speeds: Sequence[float],
        cost_coefficients: Sequence,
        slot_minutes: float,
        distance: Callable[[Point, Point], float] = euclidean,
    ):
        self.positions = [None] + [tuple(p) for p in positions]
        self.speeds = [None] + list(speeds)
        self.coefficients = [None] + [to_money(c) for c in cost_coefficients]
        self.slot_minutes = slot_minutes
        self.distance = distance
        self._time: dict[tuple[int, int, int], int] = {}
        self._cost: dict[tuple[int, int, int], int] = {}

    def dist(self, src: int, dst: int) -> float:
        return self.distance(self.positions[src], self.positions[dst])

    def time(self, user: int, src: int, dst: int) -> int:
        if src == dst:
            return 1
        key = (user, src, dst)
        val = self._time.get(key)
        if val is None:
            val = geometric_movement_time(self.dist(src, dst), self.speeds[user], self.slot_minutes)
            self._time[key] = val
        return val

    def cost_ticks(self, user: int, src: int, dst: int) -> int:
        if src == dst:
            return 0
        key = (user, src, dst)
        val = self._cost.get(key)
        if val is None:
            val = money_to_ticks(geometric_movement_cost(self.dist(src, dst), self.coefficients[user]))
            self._cost[key] = val
        return val


@dataclass(frozen=True)
class MovementTables:
    """Per-class square matrices, locations 1-based (row/col 0 unused).

    ``time`` holds slots, ``cost`` holds money. Keys are mode names such as
    ``"drive"`` or per-user labels.
    """

    time: Mapping[str, tuple[tuple[int, ...], ...]]
    cost: Mapping[str, tuple[tuple[Decimal, ...], ...]]

    @property
    def modes(self) -> list[str]:
        return sorted(self.time)

    def size(self, mode: str) -> int:
        return len(self.time[mode]) - 1


class TableMovement:
    """Movement looked up from :class:`MovementTables` by each user's class."""

    geometric = False

    def __init__(self, tables: MovementTables, user_class: Sequence[str]):
        self.tables = tables
        self.user_class = [None] + list(user_class)
        for mode in set(user_class):
            if mode not in tables.time:
                raise ScenarioError(f"no movement table for class {mode!r}")
        self._cost_ticks = {
            mode: [[money_to_ticks(c) if j else 0 for j, c in enumerate(row)] for row in rows]
            for mode, rows in tables.cost.items()
        }

    def time(self, user: int, src: int, dst: int) -> int:
        return self.tables.time[self.user_class[user]][src][dst]

    def cost_ticks(self, user: int, src: int, dst: int) -> int:
        return self._cost_ticks[self.user_class[user]][src][dst]


def _slots(minutes: float, slot_minutes: float) -> int:
    return math.ceil(round(minutes / slot_minutes, 9))


def ingest_movement_table(
    document: str | Iterable[Mapping[str, str]],
    slot_minutes: float,
    num_locations: int | None = None,
) -> MovementTables:
    """Build tables from rows ``(mode, from_location, to_location, minutes, cost)``.

    ``document`` is CSV text with that header, or an iterable of row mappings.
    Minutes become slots by ceiling division; diagonal entries are forced to
    one slot and zero cost, off-diagonal entries are clamped to at least one
    slot.
    """
    if slot_minutes <= 0:
        raise ValueError("slot length must be positive")
    rows = csv.DictReader(io.StringIO(document)) if isinstance(document, str) else document
    entries: dict[str, dict[tuple[int, int], tuple[float, Decimal]]] = {}
    for row in rows:
        mode = row["mode"].strip()
        src, dst = int(row["from_location"]), int(row["to_location"])
        entries.setdefault(mode, {})[src, dst] = (float(row["minutes"]), to_money(row["cost"]))
    if not entries:
        raise ScenarioError("movement table is empty")
    time: dict[str, tuple] = {}
    cost: dict[str, tuple] = {}
    for mode, pairs in entries.items():
        n = num_locations or max(max(p) for p in pairs)
        t_rows: list[tuple[int, ...]] = [(0,) * (n + 1)]
        c_rows: list[tuple[Decimal, ...]] = [(to_money(0),) * (n + 1)]
        for l in range(1, n + 1):
            t_row, c_row = [0], [to_money(0)]
            for m in range(1, n + 1):
                if l == m:
                    t_row.append(1)
                    c_row.append(to_money(0))
                    continue
                if (l, m) not in pairs:
                    raise ScenarioError(f"movement table missing entry for ({mode}, {l}, {m})")
                minutes, c = pairs[l, m]
                t_row.append(max(1, _slots(minutes, slot_minutes)))
                c_row.append(c)
            t_rows.append(tuple(t_row))
            c_rows.append(tuple(c_row))
        time[mode] = tuple(t_rows)
        cost[mode] = tuple(c_rows)
    return MovementTables(time=time, cost=cost)


def emit_movement_table(tables: MovementTables, slot_minutes: float) -> str:
    """Inverse of :func:`ingest_movement_table` at slot resolution."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["mode", "from_location", "to_location", "minutes", "cost"])
    for mode in tables.modes:
        n = tables.size(mode)
        for l in range(1, n + 1):
            for m in range(1, n + 1):
                minutes = 0 if l == m else tables.time[mode][l][m] * slot_minutes
                writer.writerow([mode, l, m, f"{minutes:g}", tables.cost[mode][l][m]])
    return out.getvalue()
