"""Ego-centric agent observations.

Each agent senses nearby bodies as penetration vectors — displacement scaled
by how deeply the body intrudes into the sensing window — plus a clipped,
normalized direction to its goal. Only the closest max_obs bodies are kept;
unused slots stay exactly zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ZeroDisplacement
from .geometry import Circle, SpatialHash, Vec2, query_neighbors

if False:  # pragma: no cover - typing only
    from .environment import WorldState


@dataclass(frozen=True)
class ObsParams:
    window: float = 0.5  # sensing range, world units
    max_obs: int = 8

    def __post_init__(self):
        if self.window <= 0:
            raise ValueError("window must be > 0")
        if self.max_obs < 1:
            raise ValueError("max_obs must be >= 1")


@dataclass(frozen=True)
class ObservationVector:
    """Fixed-width per-agent observation: max_obs 2-vectors plus goal slot."""

    object_slots: tuple[Vec2, ...]
    goal_dir: Vec2

    def flat(self) -> np.ndarray:
        out = np.empty(2 * len(self.object_slots) + 2, dtype=np.float64)
        for i, v in enumerate(self.object_slots):
            out[2 * i] = v.x
            out[2 * i + 1] = v.y
        out[-2] = self.goal_dir.x
        out[-1] = self.goal_dir.y
        return out


def penetration_vector(agent_pos: Vec2, agent_radius: float, obj: Circle, p: ObsParams) -> Vec2:
    """Penetration encoding of one body, or (0,0) when out of sensing range.

    Implemented literally: the activation test subtracts the agent radius but
    the scale factor does not, so in the thin shell
    window + R_j <= |Δo| < window + R + R_j the factor is positive and the
    vector points toward the object. Inside the window the vector points back
    toward the agent with magnitude equal to the normalized intrusion depth.
    """
    dx = obj.center.x - agent_pos.x
    dy = obj.center.y - agent_pos.y
    dist = math.sqrt(dx * dx + dy * dy)
    if not dist - agent_radius - obj.radius < p.window:
        return Vec2(0.0, 0.0)
    if dist == 0.0:
        raise ZeroDisplacement("object center coincides with the agent")
    factor = (1.0 - (p.window + obj.radius) / dist) / p.window
    return Vec2(dx * factor, dy * factor)


def _fallback_penetration(obj_radius: float, p: ObsParams) -> Vec2:
    # Coincident centers: treat the displacement as lying along +x, which
    # puts the encoded vector at (-(window+R_j)/window, 0).
    return Vec2(-(p.window + obj_radius) / p.window, 0.0)


def goal_direction(agent_pos: Vec2, goal_pos: Vec2, p: ObsParams) -> Vec2:
    """Goal offset clipped to the window, then normalized by it.

    The result norm is forced <= 1 exactly: clipping can overshoot by an ulp
    (e.g. 3·(1/5) rounds above 0.6), so the final vector is renormalized until
    the computed norm actually satisfies the bound.
    """
    gx = goal_pos.x - agent_pos.x
    gy = goal_pos.y - agent_pos.y
    dist = math.sqrt(gx * gx + gy * gy)
    if dist > p.window:
        scale = p.window / dist
        gx *= scale
        gy *= scale
    gx /= p.window
    gy /= p.window
    norm = math.sqrt(gx * gx + gy * gy)
    while norm > 1.0:
        gx /= norm
        gy /= norm
        norm = math.sqrt(gx * gx + gy * gy)
    return Vec2(gx, gy)


def _sense_key(agent: Circle, obj: Circle) -> float:
    dx = obj.center.x - agent.center.x
    dy = obj.center.y - agent.center.y
    return math.sqrt(dx * dx + dy * dy) - agent.radius - obj.radius


def observe(
    agent_index: int,
    world: "WorldState",
    hash: SpatialHash | None,
    p: ObsParams,
) -> ObservationVector:
    """Observation for one agent against the full body set.

    Keeps the max_obs nearest in-range bodies ordered by surface distance
    (ties broken by ascending global body index), zero-pads the rest, and
    appends the goal direction. `hash` is a broad-phase accelerator only —
    results are identical to a full scan.
    """
    agents = world.agents
    me = agents[agent_index]
    my = Circle(me.position, me.radius)
    bodies: list[Circle] = [Circle(a.position, a.radius) for a in agents]
    bodies.extend(world.landmarks)
    if hash is None:
        candidates = range(len(bodies))
    else:
        candidates = query_neighbors(hash, my, p.window)

    kept: list[tuple[float, int, Vec2]] = []
    for j in candidates:
        if j == agent_index:
            continue
        obj = bodies[j]
        key = _sense_key(my, obj)
        if not key < p.window:
            continue
        try:
            vec = penetration_vector(me.position, me.radius, obj, p)
        except ZeroDisplacement:
            vec = _fallback_penetration(obj.radius, p)
        kept.append((key, j, vec))

    kept.sort(key=lambda item: (item[0], item[1]))
    slots = [item[2] for item in kept[: p.max_obs]]
    while len(slots) < p.max_obs:
        slots.append(Vec2(0.0, 0.0))
    goal = goal_direction(me.position, world.goals[agent_index], p)
    return ObservationVector(object_slots=tuple(slots), goal_dir=goal)
