"""Per-step rewards and end-of-episode metrics.

Reward is the sum of four terms per agent: a collective all-on-goal bonus, an
individual on-goal bonus, a collision penalty, and distance-progress shaping.
Episode metrics are the four standard pathfinding aggregates: success rate at
the final step, flowtime (mean first-reach time), makespan (max first-reach
time), and coordination (one minus the collision fraction).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyTrace
from .geometry import Vec2

if False:  # pragma: no cover - typing only
    from .environment import WorldState


@dataclass(frozen=True)
class RewardParams:
    goal_radius: float | None = None  # None: each agent's own radius
    shaping: float = 0.1

    def __post_init__(self):
        if self.goal_radius is not None and self.goal_radius <= 0:
            raise ValueError("goal_radius must be > 0")
        if self.shaping < 0:
            raise ValueError("shaping must be >= 0")


def resolve_goal_radii(p: RewardParams, agent_radii) -> np.ndarray:
    radii = np.asarray(agent_radii, dtype=np.float64)
    if p.goal_radius is None:
        return radii.copy()
    return np.full_like(radii, p.goal_radius)


def _distance(a: Vec2, b: Vec2) -> float:
    dx = a[0] - b[0]
    dy = a[1] - b[1]
    return math.sqrt(dx * dx + dy * dy)


def step_rewards(
    prev: "WorldState",
    curr: "WorldState",
    goals,
    p: RewardParams,
) -> list[float]:
    """Rewards earned by the transition prev -> curr.

    On-goal and collision conditions are evaluated on the new state. The
    collision test covers every other body (agents and landmarks) at strict
    overlap (separation below the radius sum).
    """
    n = len(curr.agents)
    goal_radii = resolve_goal_radii(p, [a.radius for a in curr.agents])
    dist_prev = [_distance(prev.agents[i].position, goals[i]) for i in range(n)]
    dist_curr = [_distance(curr.agents[i].position, goals[i]) for i in range(n)]
    on_goal = [dist_curr[i] <= goal_radii[i] for i in range(n)]
    all_on = all(on_goal)

    bodies = [(a.position, a.radius) for a in curr.agents]
    bodies.extend((lm.center, lm.radius) for lm in curr.landmarks)
    collided = []
    for i in range(n):
        pos_i, r_i = bodies[i]
        hit = False
        for j, (pos_j, r_j) in enumerate(bodies):
            if j == i:
                continue
            if _distance(pos_i, pos_j) < r_i + r_j:
                hit = True
                break
        collided.append(hit)

    out = []
    for i in range(n):
        r = 0.5 if all_on else 0.0
        r = r + (0.5 if on_goal[i] else 0.0)
        r = r + (-1.0 if collided[i] else 0.0)
        r = r + p.shaping * (dist_prev[i] - dist_curr[i])
        out.append(r)
    return out


@dataclass
class EpisodeTrace:
    """Accumulated per-step episode record.

    Row t (1-based) describes the state after environment step t. Initial
    distances (step 0) seed the shaping telescope and the trace always knows
    the episode budget so unreached agents saturate at T.
    """

    num_agents: int
    budget: int
    initial_positions: list[Vec2]
    initial_distances: list[float]
    positions: list[list[Vec2]] = field(default_factory=list)
    distances: list[list[float]] = field(default_factory=list)
    on_goal: list[list[bool]] = field(default_factory=list)
    collided: list[list[bool]] = field(default_factory=list)

    def append(self, positions, distances, on_goal, collided) -> None:
        if len(self.positions) >= self.budget:
            raise ValueError("trace already holds a full episode")
        self.positions.append([Vec2(float(p[0]), float(p[1])) for p in positions])
        self.distances.append([float(d) for d in distances])
        self.on_goal.append([bool(v) for v in on_goal])
        self.collided.append([bool(v) for v in collided])

    @property
    def length(self) -> int:
        return len(self.positions)


@dataclass(frozen=True)
class EpisodeMetrics:
    success_rate: float
    flowtime: float
    makespan: float
    coordination: float
    reach_times: tuple[int, ...]
    collision_count: int

    def as_dict(self) -> dict:
        return {
            "sr": self.success_rate,
            "ft": self.flowtime,
            "ms": self.makespan,
            "co": self.coordination,
            "reach_times": list(self.reach_times),
            "collisions": self.collision_count,
        }


def finalize_metrics(trace: EpisodeTrace, p: RewardParams | None = None) -> EpisodeMetrics:
    """Fold a trace into SR/FT/MS/CO.

    SR looks only at the final step; reach times record the first on-goal
    step (T when an agent never reaches), so an agent that touches its goal
    and leaves counts for flowtime but not for success.
    """
    steps = trace.length
    if steps == 0:
        raise EmptyTrace("cannot compute metrics for an empty trace")
    n = trace.num_agents
    horizon = trace.budget

    reach: list[int] = []
    for i in range(n):
        t_i = horizon
        for t in range(steps):
            if trace.on_goal[t][i]:
                t_i = t + 1
                break
        reach.append(t_i)

    final_on = trace.on_goal[steps - 1]
    sr = sum(1 for v in final_on if v) / n
    ft = sum(reach) / n
    ms = max(reach)
    collisions = sum(1 for row in trace.collided for v in row if v)
    co = 1.0 - collisions / (n * horizon)
    return EpisodeMetrics(
        success_rate=sr,
        flowtime=ft,
        makespan=float(ms),
        coordination=co,
        reach_times=tuple(reach),
        collision_count=collisions,
    )
