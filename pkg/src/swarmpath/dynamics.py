"""Collision forces and per-agent state integration.

Two control models share one contact system: holonomic agents are driven by a
2D force and integrated semi-implicitly; differential-drive agents command
linear and angular speed about their heading. Contact forces follow a softplus
ramp that activates only when discs overlap, so motion stays smooth.

The scalar functions here are the reference semantics; the batched engine
evaluates the same expressions (same operand order, same numpy ufuncs) over
arrays, so both paths agree bit-for-bit. All transcendentals go through numpy
even on scalars — libm's exp/log differ from numpy's in the last bit.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .errors import NonFiniteInput, ZeroDisplacement
from .geometry import Circle, SpatialHash, Vec2, query_neighbors

if TYPE_CHECKING:
    from .environment import WorldState

TWO_PI = 2.0 * math.pi


class DynamicsModel(enum.Enum):
    HOLONOMIC = "holonomic"
    DIFFDRIVE = "diffdrive"


@dataclass(frozen=True)
class ContactParams:
    f0: float = 100.0  # force scale
    k: float = 0.001   # penetration softness

    def __post_init__(self):
        if self.f0 < 0:
            raise ValueError("f0 must be >= 0")
        if self.k <= 0:
            raise ValueError("k must be > 0")


@dataclass(frozen=True)
class HolonomicParams:
    mass: float = 1.0
    damping: float = 0.25
    max_speed: float | None = 1.0  # None = unbounded
    dt: float = 0.005

    def __post_init__(self):
        if self.mass <= 0:
            raise ValueError("mass must be > 0")
        if not 0.0 <= self.damping < 1.0:
            raise ValueError("damping must be in [0, 1)")


@dataclass(frozen=True)
class DiffDriveParams:
    max_u: float = 1.0       # linear speed bound
    max_w: float = 2.0       # angular speed bound, rad/s
    dt: float = 0.005

    def __post_init__(self):
        if self.max_u <= 0 or self.max_w <= 0:
            raise ValueError("speed bounds must be > 0")


@dataclass(frozen=True)
class SimParams:
    contact: ContactParams = ContactParams()
    dt: float = 0.005
    frameskip: int = 20

    def __post_init__(self):
        if self.frameskip < 1:
            raise ValueError("frameskip must be >= 1")


@dataclass(frozen=True)
class AgentKinematics:
    position: Vec2
    velocity: Vec2
    radius: float
    model: DynamicsModel = DynamicsModel.HOLONOMIC
    heading: float = 0.0  # radians in (-pi, pi]; meaningful for diff-drive only


def wrap_angle(theta):
    """Wrap an angle (scalar or array) into (-pi, pi]."""
    r = theta - TWO_PI * np.round(theta / TWO_PI)
    r = np.where(r > math.pi, r - TWO_PI, r)
    r = np.where(r <= -math.pi, r + TWO_PI, r)
    return r if isinstance(theta, np.ndarray) else float(r)


def overlap_force_magnitude(overlap, contact: ContactParams):
    """Softplus contact ramp f0·k·ln(1 + e^(overlap/k)), overflow-safe.

    Evaluated through the identity k·ln(1+e^(z/k)) = z + k·ln(1+e^(-z/k)) for
    z > 0, which never overflows. Works elementwise on scalars and arrays;
    callers gate on overlap > 0 (the piecewise force is exactly zero outside
    contact, which leaves a jump of f0·k·ln 2 at the activation distance —
    negligible at the default k but deliberately not smoothed).
    """
    z = np.asarray(overlap, dtype=np.float64)
    mag = contact.f0 * (z + contact.k * np.log1p(np.exp(-z / contact.k)))
    return mag if isinstance(overlap, np.ndarray) else float(mag)


def collision_force(delta: Vec2, d_min: float, p: ContactParams) -> Vec2:
    """Repulsive force on the body displaced by `delta` from its neighbor.

    Zero when the separation is at least d_min. Raises ZeroDisplacement for
    coincident centers; callers substitute the +x fallback direction.
    """
    dx, dy = float(delta[0]), float(delta[1])
    dist = math.sqrt(dx * dx + dy * dy)
    if dist >= d_min:
        return Vec2(0.0, 0.0)
    if dist == 0.0:
        raise ZeroDisplacement("coincident centers inside contact range")
    mag = overlap_force_magnitude(d_min - dist, p)
    scale = mag / dist
    return Vec2(dx * scale, dy * scale)


def _fallback_force(d_min: float, p: ContactParams) -> Vec2:
    # Deterministic resolution for coincident centers: push along +x.
    return Vec2(overlap_force_magnitude(d_min, p), 0.0)


def accumulate_forces(
    agents: Sequence[AgentKinematics],
    landmarks: Sequence[Circle],
    hash: SpatialHash | None,
    p: ContactParams,
) -> list[Vec2]:
    """Total contact force per agent.

    Pairwise terms are accumulated in ascending global body index order
    (agents 0..N-1, then landmarks), which pins the floating-point result.
    `hash` must index agents then landmarks in that order; pass None to scan
    all bodies directly.
    """
    n = len(agents)
    bodies: list[Circle] = [Circle(a.position, a.radius) for a in agents]
    bodies.extend(landmarks)
    out: list[Vec2] = []
    for i, agent in enumerate(agents):
        me = bodies[i]
        if hash is None:
            candidates: Sequence[int] = range(len(bodies))
        else:
            candidates = query_neighbors(hash, me, 0.0)
        fx = 0.0
        fy = 0.0
        for j in candidates:
            if j == i:
                continue
            other = bodies[j]
            d_min = me.radius + other.radius
            try:
                f = collision_force(me.center - other.center, d_min, p)
            except ZeroDisplacement:
                f = _fallback_force(d_min, p)
            fx += f.x
            fy += f.y
        out.append(Vec2(fx, fy))
    return out


def _require_finite(values, what: str) -> None:
    for v in values:
        if not math.isfinite(v):
            raise NonFiniteInput(f"{what} contains a non-finite value")


def step_holonomic(
    state: AgentKinematics,
    action_force: Vec2,
    collision: Vec2,
    p: HolonomicParams,
) -> AgentKinematics:
    """One semi-implicit Euler step: damp, accelerate, clamp speed, advance."""
    if state.model is not DynamicsModel.HOLONOMIC:
        raise ValueError("step_holonomic requires a holonomic agent")
    _require_finite(action_force, "action force")
    ax = (action_force[0] + collision[0]) / p.mass
    ay = (action_force[1] + collision[1]) / p.mass
    vx = (1.0 - p.damping) * state.velocity.x + ax * p.dt
    vy = (1.0 - p.damping) * state.velocity.y + ay * p.dt
    if p.max_speed is not None:
        speed = math.sqrt(vx * vx + vy * vy)
        if speed > p.max_speed:
            scale = p.max_speed / speed
            vx *= scale
            vy *= scale
    return replace(
        state,
        velocity=Vec2(vx, vy),
        position=Vec2(state.position.x + vx * p.dt, state.position.y + vy * p.dt),
    )


def step_diffdrive(
    state: AgentKinematics,
    action: tuple[float, float],
    collision: Vec2,
    p: DiffDriveParams,
) -> AgentKinematics:
    """One differential-drive step: clip speeds, roll forward, turn.

    The control equations ignore contact forces, so the collision force is
    injected as a positional correction (unit mass, dt²) — without it a
    commanded agent would tunnel straight through obstacles.
    """
    if state.model is not DynamicsModel.DIFFDRIVE:
        raise ValueError("step_diffdrive requires a diff-drive agent")
    _require_finite(action, "action")
    u = min(max(float(action[0]), -p.max_u), p.max_u)
    w = min(max(float(action[1]), -p.max_w), p.max_w)
    vx = u * math.cos(state.heading)
    vy = u * math.sin(state.heading)
    dt2 = p.dt * p.dt
    px = state.position.x + vx * p.dt + collision[0] * dt2
    py = state.position.y + vy * p.dt + collision[1] * dt2
    return replace(
        state,
        position=Vec2(px, py),
        velocity=Vec2(vx, vy),
        heading=wrap_angle(state.heading + w * p.dt),
    )


def substep(world: "WorldState", actions, sim: SimParams | None = None) -> "WorldState":
    """Advance a world by `frameskip` integration sub-steps with held actions.

    Collision forces are recomputed every sub-step; the effective step
    duration is dt × frameskip. Delegates to the batched engine, so chaining
    frameskip=1 calls reproduces a single frameskip=f call bit-exactly.
    """
    from .environment import substep_world

    return substep_world(world, actions, sim)
