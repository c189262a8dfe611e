"""Task-time routes and exact best responses.

A user's feasible routes are the paths from ``(k_init, 1)`` in a DAG whose
vertices are task-time points and whose edges are single moves.  Splitting
each vertex ``(k, t)`` into ``(k, t, 0) -> (k, t, 1)`` moves the shared reward
onto an edge, so the best response is a plain longest path.

Weights inside the graphs are integers: money ticks multiplied by
``lcm(1..I)``, which makes every shared reward ``rho / (q + 1)`` integral and
all comparisons exact.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Iterator, Mapping, NamedTuple

from .model import TICKS_PER_UNIT, Scenario, TaskTimePoint, rho_star_ticks

ROUTE_ORACLE_LIMIT = 10**6


class OracleTooLarge(RuntimeError):
    """The route enumeration would exceed its size guard."""


class RouteViolation(NamedTuple):
    condition: int
    message: str


@dataclass(frozen=True)
class Route:
    owner: int
    points: tuple[TaskTimePoint, ...]

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(TaskTimePoint(*p) for p in self.points))

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[TaskTimePoint]:
        return iter(self.points)

    @property
    def pairs(self) -> list[tuple[TaskTimePoint, TaskTimePoint]]:
        return list(zip(self.points, self.points[1:]))

    def worked_tasks(self, scenario: Scenario) -> list[int]:
        """Real tasks visited at their execution time, in route order."""
        return [
            k for k, t in self.points
            if k <= scenario.num_tasks and scenario.tasks[k - 1].execution_time == t
        ]

    def __str__(self) -> str:
        return " -> ".join(f"({k},{t})" for k, t in self.points)


def stay_home(scenario: Scenario, user: int) -> Route:
    return Route(user, ((scenario.virtual_task_id(user), 1),))


def validate_route(scenario: Scenario, route: Route) -> list[RouteViolation]:
    """Return every violated route condition; empty means feasible."""
    out: list[RouteViolation] = []
    pts = route.points
    if not pts:
        return [RouteViolation(1, "route is empty")]
    times = [t for _, t in pts]
    if times[0] != 1:
        out.append(RouteViolation(1, f"route starts at time {times[0]}, not 1"))
    if any(b <= a for a, b in zip(times, times[1:])):
        out.append(RouteViolation(1, "times do not strictly increase"))
    if times[-1] > scenario.horizon or times[0] < 1:
        out.append(RouteViolation(1, f"times leave 1..{scenario.horizon}"))
    n_ids = scenario.num_tasks + scenario.num_users
    eligible = scenario.eligible(route.owner)
    bad = [k for k, _ in pts if k not in eligible]
    if bad:
        out.append(RouteViolation(2, f"ineligible tasks {sorted(set(bad))}"))
    if pts[0].task != scenario.virtual_task_id(route.owner):
        out.append(RouteViolation(3, "route does not start at the owner's virtual task"))
    for a, b in zip(pts, pts[1:]):
        if not (1 <= a.task <= n_ids and 1 <= b.task <= n_ids):
            continue
        need = scenario.move_time(route.owner, a.task, b.task)
        if b.time - a.time != need:
            out.append(
                RouteViolation(4, f"{tuple(a)}->{tuple(b)} takes {b.time - a.time} slots, movement needs {need}")
            )
    return out


def is_feasible(scenario: Scenario, route: Route) -> bool:
    return not validate_route(scenario, route)


def route_cost_ticks(scenario: Scenario, route: Route) -> int:
    return sum(scenario.move_cost_ticks(route.owner, a.task, b.task) for a, b in route.pairs)


def share_scale(num_users: int) -> int:
    """Common denominator of every possible even split ``1/m``, ``m <= I``."""
    return reduce(math.lcm, range(1, max(num_users, 1) + 1), 1)


@dataclass
class RouteGraph:
    """Feasible task-time points of one user and the moves between them.

    ``vertices`` are sorted by (time, task id), which is a topological order.
    ``succ[v]`` lists ``(target, cost_ticks)``; ``theta[v]`` is the share the
    user would earn at ``v`` given the opponents' share counts, in units of
    ``1 / (TICKS_PER_UNIT * scale)``.
    """

    user: int
    vertices: list[TaskTimePoint]
    index: dict[TaskTimePoint, int]
    succ: list[list[tuple[int, int]]]
    rewards: list[int]
    scale: int
    theta: list[int] = field(default_factory=list)

    @property
    def source(self) -> int:
        return 0

    def edge_weight(self, cost_ticks: int) -> int:
        return -cost_ticks * self.scale

    def theta_value(self, v: int) -> Fraction:
        return Fraction(self.theta[v], TICKS_PER_UNIT * self.scale)

    def with_shares(self, opponents_share: Mapping[tuple[int, int], int]) -> RouteGraph:
        scale = self.scale
        splits = [opponents_share.get(p, 0) + 1 if r else 1 for p, r in zip(self.vertices, self.rewards)]
        for m in splits:
            if scale % m:
                scale = math.lcm(scale, m)
        theta = [(r * scale) // m for r, m in zip(self.rewards, splits)]
        return RouteGraph(self.user, self.vertices, self.index, self.succ, self.rewards, scale, theta)

    def topological_order(self) -> list[int]:
        """Kahn's algorithm; raises if a cycle exists."""
        indeg = [0] * len(self.vertices)
        for outs in self.succ:
            for w, _ in outs:
                indeg[w] += 1
        queue = deque(v for v, d in enumerate(indeg) if d == 0)
        order: list[int] = []
        while queue:
            v = queue.popleft()
            order.append(v)
            for w, _ in self.succ[v]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    queue.append(w)
        if len(order) != len(self.vertices):
            raise RuntimeError("route graph has a cycle")
        return order


def route_graph_skeleton(scenario: Scenario, user: int) -> RouteGraph:
    """Reachable points and moves for ``user``; no share information yet."""
    T = scenario.horizon
    eligible = sorted(scenario.eligible(user))
    start = TaskTimePoint(scenario.virtual_task_id(user), 1)
    seen = {start}
    frontier = [start]
    edges: dict[TaskTimePoint, list[tuple[TaskTimePoint, int]]] = {}
    # Precompute per-task moves once; they do not depend on time.
    moves = {
        k: [
            (k2, scenario.move_time(user, k, k2), scenario.move_cost_ticks(user, k, k2))
            for k2 in eligible
        ]
        for k in eligible
    }
    while frontier:
        nxt = []
        for p in frontier:
            outs = []
            for k2, dt, c in moves[p.task]:
                t2 = p.time + dt
                if t2 > T:
                    continue
                q = TaskTimePoint(k2, t2)
                outs.append((q, c))
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
            edges[p] = outs
        frontier = nxt
    vertices = sorted(seen, key=lambda p: (p.time, p.task))
    index = {p: i for i, p in enumerate(vertices)}
    succ = [sorted((index[q], c) for q, c in edges[p]) for p in vertices]
    rewards = [rho_star_ticks(scenario, k, t) for k, t in vertices]
    return RouteGraph(user, vertices, index, succ, rewards, share_scale(scenario.num_users))


def build_route_graph(
    scenario: Scenario, user: int, opponents_share: Mapping[tuple[int, int], int]
) -> RouteGraph:
    return route_graph_skeleton(scenario, user).with_shares(opponents_share)


@dataclass
class SplitGraph:
    """Vertex-split version of a :class:`RouteGraph`.

    Split vertex ``2v`` is ``(k, t, 0)`` and ``2v + 1`` is ``(k, t, 1)`` for
    route-graph vertex ``v``.  ``movement_edges`` go ``(., 1) -> (., 0)`` and
    carry ``-cost``; ``internal_edges`` go ``(k, t, 0) -> (k, t, 1)`` and carry
    ``theta``.
    """

    vertices: list[tuple[int, int, int]]
    out: list[list[tuple[int, int]]]
    movement_edges: list[tuple[int, int, int]]
    internal_edges: list[tuple[int, int, int]]
    scale: int

    @classmethod
    def from_route_graph(cls, g: RouteGraph) -> SplitGraph:
        vertices: list[tuple[int, int, int]] = []
        for k, t in g.vertices:
            vertices.append((k, t, 0))
            vertices.append((k, t, 1))
        out: list[list[tuple[int, int]]] = [[] for _ in vertices]
        internal, movement = [], []
        for v, outs in enumerate(g.succ):
            out[2 * v].append((2 * v + 1, g.theta[v]))
            internal.append((2 * v, 2 * v + 1, g.theta[v]))
            for w, c in outs:
                weight = g.edge_weight(c)
                out[2 * v + 1].append((2 * w, weight))
                movement.append((2 * v + 1, 2 * w, weight))
        return cls(vertices, out, movement, internal, g.scale)

    def topological_order(self) -> list[int]:
        # Movement edges strictly increase time, internal edges go 0 -> 1.
        order = sorted(range(len(self.vertices)), key=lambda i: (self.vertices[i][1], self.vertices[i][2], self.vertices[i][0]))
        pos = {v: i for i, v in enumerate(order)}
        for u, v, _ in self.movement_edges + self.internal_edges:
            if pos[u] >= pos[v]:
                raise RuntimeError("split graph is not acyclic")
        return order

    def longest_path(self, source: int = 0) -> tuple[int, list[int]]:
        """Longest path from ``source`` ending at any ``(., ., 1)`` vertex.

        Ties go to the lexicographically smallest sequence of (time, task)
        points, so stopping beats an equal-valued continuation.
        """
        n = len(self.vertices)
        best = [0] * n
        nxt = [-1] * n
        verts = self.vertices
        for v in reversed(self.topological_order()):
            if verts[v][2] == 0:
                w, weight = self.out[v][0]
                best[v] = weight + best[w]
                nxt[v] = w
                continue
            b, choice = 0, -1
            # Successors sorted by (time, task) so the first maximum wins ties.
            for w, weight in self.out[v]:
                val = weight + best[w]
                if val > b:
                    b, choice = val, w
            best[v], nxt[v] = b, choice
        path = [source]
        while nxt[path[-1]] != -1:
            path.append(nxt[path[-1]])
        return best[source], path

    def to_dot(self) -> str:
        lines = ["digraph split {"]
        for i, (k, t, g) in enumerate(self.vertices):
            lines.append(f'  n{i} [label="({k},{t},{g})"];')
        for u, v, w in self.internal_edges + self.movement_edges:
            lines.append(f'  n{u} -> n{v} [label="{Fraction(w, TICKS_PER_UNIT * self.scale)}"];')
        lines.append("}")
        return "\n".join(lines)


def best_response_on(graph: RouteGraph) -> tuple[Route, Fraction]:
    """Decode the longest split-graph path of a share-weighted route graph."""
    split = SplitGraph.from_route_graph(graph)
    value, path = split.longest_path(0)
    points = tuple(graph.vertices[s // 2] for s in path if s % 2 == 0)
    return Route(graph.user, points), Fraction(value, TICKS_PER_UNIT * graph.scale)


def best_response(
    scenario: Scenario, user: int, opponents_share: Mapping[tuple[int, int], int]
) -> tuple[Route, Fraction]:
    """A payoff-maximizing route against the opponents' share counts.

    ``opponents_share`` maps rewarded points to the number of *other* users
    whose routes pass through them; missing points count as zero.
    """
    return best_response_on(build_route_graph(scenario, user, opponents_share))


class RoutePlanner:
    """Caches per-user route-graph skeletons for repeated best responses."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self._skeletons: dict[int, RouteGraph] = {}

    def skeleton(self, user: int) -> RouteGraph:
        g = self._skeletons.get(user)
        if g is None:
            g = self._skeletons[user] = route_graph_skeleton(self.scenario, user)
        return g

    def best_response(self, user: int, opponents_share: Mapping[tuple[int, int], int]) -> tuple[Route, Fraction]:
        return best_response_on(self.skeleton(user).with_shares(opponents_share))


def enumerate_routes(scenario: Scenario, user: int, limit: int = ROUTE_ORACLE_LIMIT) -> list[Route]:
    """Every feasible route of ``user``, by depth-first expansion of moves.

    Independent of the route graph: it walks the movement tables directly.
    """
    T = scenario.horizon
    eligible = sorted(scenario.eligible(user))
    start = (scenario.virtual_task_id(user), 1)
    routes: list[Route] = []
    stack: list[tuple[tuple[int, int], ...]] = [(start,)]
    while stack:
        seq = stack.pop()
        routes.append(Route(user, seq))
        if len(routes) > limit:
            raise OracleTooLarge(f"more than {limit} routes for user {user}")
        k, t = seq[-1]
        for k2 in eligible:
            t2 = t + scenario.move_time(user, k, k2)
            if t2 <= T:
                stack.append(seq + ((k2, t2),))
    return routes
