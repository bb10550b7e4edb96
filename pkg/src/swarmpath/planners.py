"""Sampling-based planner baselines: RRT, RRT*, PD path following, guidance.

Planning happens in configuration space: landmark radii are inflated by the
agent radius and the agent is planned as a point. Other agents are ignored —
these are single-agent baselines executed independently per agent. Planners
are pure functions of their inputs and rng key: identical inputs reproduce the
identical tree, bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidEndpoint, NoPathFound
from .geometry import Rect, Vec2
from .maps import MapSpec
from .rng import RngKey


@dataclass(frozen=True)
class PlannerParams:
    iterations: int = 3000
    step_size: float = 0.4
    goal_bias: float = 0.05
    goal_tolerance: float = 0.2
    rewire_gamma: float | None = None  # None: 1.5 × bounds diagonal

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not 0.0 <= self.goal_bias <= 1.0:
            raise ValueError("goal_bias must be in [0, 1]")


RRT_ITERATIONS = 50_000
RRT_STAR_ITERATIONS = 3_000


def default_planner_params(
    map_spec: MapSpec, agent_radius: float, goal_tolerance: float, star: bool
) -> PlannerParams:
    return PlannerParams(
        iterations=RRT_STAR_ITERATIONS if star else RRT_ITERATIONS,
        step_size=2.0 * agent_radius,
        goal_bias=0.05,
        goal_tolerance=goal_tolerance,
        rewire_gamma=1.5 * map_spec.bounds.diagonal(),
    )


@dataclass(frozen=True)
class Path:
    waypoints: tuple[Vec2, ...]
    cost: float

    def __post_init__(self):
        if not self.waypoints:
            raise ValueError("a path needs at least one waypoint")


@dataclass(frozen=True)
class PdParams:
    kp: float = 300.0
    kd: float = 3.0
    waypoint_tolerance: float = 0.2

    def __post_init__(self):
        if self.kp <= 0 or self.kd < 0:
            raise ValueError("need kp > 0 and kd >= 0")


@dataclass(frozen=True)
class GuidanceFeatures:
    waypoints: tuple[Vec2, ...]  # ego-relative, exactly k slots, zero-padded
    cost_to_go: float            # path cost / map diagonal, clamped to [0, 1]


class _Workspace:
    """Inflated obstacle set with vectorized validity queries."""

    def __init__(self, map_spec: MapSpec, agent_radius: float):
        pos, rad = map_spec.landmark_arrays()
        self.centers = pos
        self.radii = rad + agent_radius
        self.bounds = map_spec.bounds

    def point_clearance(self, p: Vec2) -> float:
        if len(self.radii) == 0:
            return math.inf
        dx = self.centers[:, 0] - p.x
        dy = self.centers[:, 1] - p.y
        return float(np.min(np.sqrt(dx * dx + dy * dy) - self.radii))

    def segments_clear(self, p0: np.ndarray, p1: np.ndarray) -> np.ndarray:
        """(S,) bool: each segment keeps strictly positive clearance."""
        if len(self.radii) == 0:
            return np.ones(len(p0), dtype=bool)
        e = p1 - p0                                    # (S, 2)
        r = self.centers[None, :, :] - p0[:, None, :]  # (S, M, 2)
        ee = (e * e).sum(axis=1)                       # (S,)
        t = np.where(
            ee[:, None] > 0.0,
            (r[:, :, 0] * e[:, None, 0] + r[:, :, 1] * e[:, None, 1])
            / np.where(ee[:, None] > 0.0, ee[:, None], 1.0),
            0.0,
        )
        t = np.clip(t, 0.0, 1.0)
        qx = r[:, :, 0] - t * e[:, None, 0]
        qy = r[:, :, 1] - t * e[:, None, 1]
        clearance = np.sqrt(qx * qx + qy * qy) - self.radii[None, :]
        return clearance.min(axis=1) > 0.0

    def segment_clear(self, a: Vec2, b: Vec2) -> bool:
        return bool(
            self.segments_clear(
                np.array([[a.x, a.y]], dtype=np.float64),
                np.array([[b.x, b.y]], dtype=np.float64),
            )[0]
        )


def _path_cost(points: list[Vec2]) -> float:
    cost = 0.0
    for a, b in zip(points, points[1:]):
        dx = b.x - a.x
        dy = b.y - a.y
        cost += math.sqrt(dx * dx + dy * dy)
    return cost


class _Tree:
    def __init__(self, start: Vec2, capacity: int):
        self.pos = np.zeros((capacity, 2), dtype=np.float64)
        self.pos[0] = (start.x, start.y)
        self.parent = np.full(capacity, -1, dtype=np.int64)
        self.cost = np.zeros(capacity, dtype=np.float64)
        self.n = 1

    def nearest(self, p: tuple[float, float]) -> int:
        dx = self.pos[: self.n, 0] - p[0]
        dy = self.pos[: self.n, 1] - p[1]
        return int(np.argmin(dx * dx + dy * dy))

    def add(self, p: tuple[float, float], parent: int, cost: float) -> int:
        i = self.n
        self.pos[i] = p
        self.parent[i] = parent
        self.cost[i] = cost
        self.n += 1
        return i

    def backtrack(self, i: int) -> list[Vec2]:
        out = []
        while i >= 0:
            out.append(Vec2(float(self.pos[i, 0]), float(self.pos[i, 1])))
            i = int(self.parent[i])
        out.reverse()
        return out


def _check_endpoints(ws: _Workspace, start: Vec2, goal: Vec2) -> None:
    if ws.point_clearance(start) <= 0.0:
        raise InvalidEndpoint("start position collides with an inflated obstacle")
    if ws.point_clearance(goal) <= 0.0:
        raise InvalidEndpoint("goal position collides with an inflated obstacle")


def _dist(a: Vec2, b) -> float:
    dx = b[0] - a.x
    dy = b[1] - a.y
    return math.sqrt(dx * dx + dy * dy)


def _sample(gen: np.random.Generator, bounds: Rect, goal: Vec2, goal_bias: float):
    if float(gen.random()) < goal_bias:
        return (goal.x, goal.y)
    x = float(gen.uniform(bounds.lo.x, bounds.hi.x))
    y = float(gen.uniform(bounds.lo.y, bounds.hi.y))
    return (x, y)


def _steer(near: np.ndarray, target, step: float):
    dx = target[0] - near[0]
    dy = target[1] - near[1]
    d = math.sqrt(dx * dx + dy * dy)
    if d <= step or d == 0.0:
        return (float(target[0]), float(target[1])), d
    s = step / d
    return (float(near[0] + dx * s), float(near[1] + dy * s)), step


def rrt_plan(
    map_spec: MapSpec,
    start: Vec2,
    goal: Vec2,
    agent_radius: float,
    p: PlannerParams,
    key: RngKey,
) -> Path:
    """Vanilla RRT: returns the first path to reach the goal tolerance."""
    ws = _Workspace(map_spec, agent_radius)
    _check_endpoints(ws, start, goal)
    if _dist(start, (goal.x, goal.y)) <= p.goal_tolerance:
        return Path(waypoints=(start,), cost=0.0)
    gen = key.generator()
    tree = _Tree(start, p.iterations + 1)
    for _ in range(p.iterations):
        sample = _sample(gen, ws.bounds, goal, p.goal_bias)
        ni = tree.nearest(sample)
        new, seg = _steer(tree.pos[ni], sample, p.step_size)
        if seg == 0.0:
            continue
        a = tree.pos[ni : ni + 1]
        b = np.array([new], dtype=np.float64)
        if not ws.segments_clear(a, b)[0]:
            continue
        idx = tree.add(new, ni, tree.cost[ni] + _dist(Vec2(*new), tree.pos[ni]))
        if _dist(goal, new) <= p.goal_tolerance:
            points = tree.backtrack(idx)
            if new != (goal.x, goal.y) and ws.segment_clear(Vec2(*new), goal):
                points.append(goal)
            return Path(waypoints=tuple(points), cost=_path_cost(points))
    raise NoPathFound(f"no path within {p.iterations} iterations")


def rrt_star_plan(
    map_spec: MapSpec,
    start: Vec2,
    goal: Vec2,
    agent_radius: float,
    p: PlannerParams,
    key: RngKey,
) -> Path:
    """RRT*: choose-parent and rewire within a shrinking radius; runs the full
    budget and returns the cheapest goal-reaching path."""
    ws = _Workspace(map_spec, agent_radius)
    _check_endpoints(ws, start, goal)
    if _dist(start, (goal.x, goal.y)) <= p.goal_tolerance:
        return Path(waypoints=(start,), cost=0.0)
    gamma = p.rewire_gamma if p.rewire_gamma is not None else 1.5 * ws.bounds.diagonal()
    gen = key.generator()
    tree = _Tree(start, p.iterations + 1)
    children: dict[int, list[int]] = {}
    goal_nodes: list[int] = []

    for _ in range(p.iterations):
        sample = _sample(gen, ws.bounds, goal, p.goal_bias)
        ni = tree.nearest(sample)
        new, seg = _steer(tree.pos[ni], sample, p.step_size)
        if seg == 0.0:
            continue
        new_arr = np.array(new, dtype=np.float64)

        n = tree.n
        radius = min(p.step_size * 4.0, gamma * math.sqrt(math.log(n + 1) / (n + 1)))
        dx = tree.pos[:n, 0] - new[0]
        dy = tree.pos[:n, 1] - new[1]
        dists = np.sqrt(dx * dx + dy * dy)
        near_idx = np.nonzero(dists <= radius)[0]
        if ni not in near_idx:
            near_idx = np.append(near_idx, ni)

        p0 = tree.pos[near_idx]
        p1 = np.broadcast_to(new_arr, p0.shape).copy()
        clear = ws.segments_clear(p0, p1)
        if not clear.any():
            continue

        cand = near_idx[clear]
        cand_cost = tree.cost[cand] + dists[cand]
        best = int(np.argmin(cand_cost))
        parent = int(cand[best])
        idx = tree.add(new, parent, float(cand_cost[best]))
        children.setdefault(parent, []).append(idx)

        # rewire: reroute any cleared neighbor that gets cheaper through idx
        for j in cand.tolist():
            if j == parent:
                continue
            alt = tree.cost[idx] + dists[j]
            if alt < tree.cost[j]:
                old_parent = int(tree.parent[j])
                if old_parent >= 0 and j in children.get(old_parent, []):
                    children[old_parent].remove(j)
                tree.parent[j] = idx
                children.setdefault(idx, []).append(j)
                delta = alt - tree.cost[j]
                stack = [j]
                while stack:
                    u = stack.pop()
                    tree.cost[u] += delta
                    stack.extend(children.get(u, []))

        if _dist(goal, new) <= p.goal_tolerance:
            goal_nodes.append(idx)

    if not goal_nodes:
        raise NoPathFound(f"no path within {p.iterations} iterations")

    def total(i: int) -> float:
        return tree.cost[i] + _dist(goal, tree.pos[i])

    best_node = min(goal_nodes, key=lambda i: (total(i), i))
    points = tree.backtrack(best_node)
    tip = points[-1]
    if (tip.x, tip.y) != (goal.x, goal.y) and ws.segment_clear(tip, goal):
        points.append(goal)
    return Path(waypoints=tuple(points), cost=_path_cost(points))


def pd_follow(
    position: Vec2,
    velocity: Vec2,
    path: Path,
    cursor: int,
    p: PdParams,
) -> tuple[Vec2, int]:
    """PD force toward the current waypoint; cursor advances monotonically
    past every waypoint already inside the tolerance."""
    last = len(path.waypoints) - 1
    while cursor < last and _dist(position, path.waypoints[cursor]) <= p.waypoint_tolerance:
        cursor += 1
    target = path.waypoints[cursor]
    if cursor == last and _dist(position, target) <= p.waypoint_tolerance:
        return Vec2(-p.kd * velocity.x, -p.kd * velocity.y), cursor
    fx = p.kp * (target.x - position.x) - p.kd * velocity.x
    fy = p.kp * (target.y - position.y) - p.kd * velocity.y
    return Vec2(fx, fy), cursor


def resample_by_arc_length(path: Path, k: int) -> list[Vec2]:
    """k points at even arc-length fractions of the polyline; the last point
    is always the path's endpoint."""
    pts = path.waypoints
    if len(pts) == 1 or path.cost == 0.0:
        return [pts[-1]] * k
    seg_len = []
    for a, b in zip(pts, pts[1:]):
        seg_len.append(_dist(a, b))
    total = sum(seg_len)
    targets = [total * (i + 1) / k for i in range(k)]
    out: list[Vec2] = []
    seg = 0
    walked = 0.0
    for t in targets:
        while seg < len(seg_len) - 1 and walked + seg_len[seg] < t:
            walked += seg_len[seg]
            seg += 1
        a, b = pts[seg], pts[seg + 1]
        span = seg_len[seg]
        frac = 0.0 if span == 0.0 else min(1.0, max(0.0, (t - walked) / span))
        out.append(Vec2(a.x + (b.x - a.x) * frac, a.y + (b.y - a.y) * frac))
    return out


def rrt_star_guidance(
    map_spec: MapSpec,
    start: Vec2,
    goal: Vec2,
    agent_radius: float,
    k: int,
    p: PlannerParams,
    key: RngKey,
) -> GuidanceFeatures:
    """Plan once, then expose k ego-relative waypoints and a normalized
    cost-to-go. Planning failure is encoded as zero waypoints and cost 1."""
    diag = map_spec.bounds.diagonal()
    try:
        path = rrt_star_plan(map_spec, start, goal, agent_radius, p, key)
    except (NoPathFound, InvalidEndpoint):
        return GuidanceFeatures(waypoints=tuple(Vec2(0.0, 0.0) for _ in range(k)), cost_to_go=1.0)
    samples = resample_by_arc_length(path, k)
    rel = tuple(Vec2(s.x - start.x, s.y - start.y) for s in samples)
    cost = 0.0 if diag == 0.0 else min(1.0, max(0.0, path.cost / diag))
    return GuidanceFeatures(waypoints=rel, cost_to_go=cost)


def serialize_path(path: Path) -> str:
    lines = [f"cost {path.cost!r}"]
    lines.extend(f"{w.x!r} {w.y!r}" for w in path.waypoints)
    return "\n".join(lines) + "\n"


def parse_path(text: str) -> Path:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("cost "):
        raise ValueError("path text must start with a 'cost <value>' line")
    cost = float(lines[0].split()[1])
    waypoints = []
    for ln in lines[1:]:
        xs, ys = ln.split()
        waypoints.append(Vec2(float(xs), float(ys)))
    return Path(waypoints=tuple(waypoints), cost=cost)
