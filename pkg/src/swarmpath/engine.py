"""Vectorized batched simulation core.

All state lives in (B, ...) float64 arrays and every operation is either
elementwise or a per-slot reduction, so each slot's results are bit-identical
no matter the batch size, padding, or how the batch is chunked across threads.
Two rules make that hold:

* Reductions over the bodies axis use sequential (cumulative) summation in
  ascending global body index order — agents 0..N-1, then landmarks. A
  sequential sum is invariant to interleaved or trailing exact zeros, so
  masked padding never perturbs results.
* Transcendentals are evaluated with numpy ufuncs, which produce the same bits
  for a value regardless of where it sits in an array (probed at build time);
  the scalar reference ops route through the same ufuncs.

Static landmarks are prefiltered once per environment step: only candidates
within sensing/contact reach (plus twice the worst-case travel) feed the
per-substep force and observation kernels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import (
    ContactParams,
    DiffDriveParams,
    HolonomicParams,
    wrap_angle,
)
from .errors import NonFiniteAction
from .observation import ObsParams


@dataclass(frozen=True)
class EngineParams:
    contact: ContactParams
    holonomic: HolonomicParams
    diffdrive: DiffDriveParams
    obs: ObsParams
    dt: float
    frameskip: int

    def max_travel_per_step(self) -> float:
        v = max(
            self.holonomic.max_speed if self.holonomic.max_speed is not None else 10.0,
            self.diffdrive.max_u,
        )
        return v * self.dt * self.frameskip


@dataclass
class Scene:
    """Batched dynamic state. All arrays are C-contiguous float64/bool."""

    pos: np.ndarray        # (B, N, 2)
    vel: np.ndarray        # (B, N, 2)
    heading: np.ndarray    # (B, N)
    radius: np.ndarray     # (B, N)
    holo_mask: np.ndarray  # (N,) bool, True = holonomic agent
    goals: np.ndarray      # (B, N, 2)
    goal_radius: np.ndarray  # (B, N)
    land_pos: np.ndarray   # (B, M, 2)
    land_rad: np.ndarray   # (B, M)
    land_valid: np.ndarray  # (B, M) bool

    @property
    def batch(self) -> int:
        return int(self.pos.shape[0])

    @property
    def num_agents(self) -> int:
        return int(self.pos.shape[1])

    def copy(self) -> "Scene":
        return Scene(
            pos=self.pos.copy(),
            vel=self.vel.copy(),
            heading=self.heading.copy(),
            radius=self.radius,
            holo_mask=self.holo_mask,
            goals=self.goals,
            goal_radius=self.goal_radius,
            land_pos=self.land_pos,
            land_rad=self.land_rad,
            land_valid=self.land_valid,
        )

    def slice(self, lo: int, hi: int) -> "Scene":
        return Scene(
            pos=self.pos[lo:hi],
            vel=self.vel[lo:hi],
            heading=self.heading[lo:hi],
            radius=self.radius[lo:hi],
            holo_mask=self.holo_mask,
            goals=self.goals[lo:hi],
            goal_radius=self.goal_radius[lo:hi],
            land_pos=self.land_pos[lo:hi],
            land_rad=self.land_rad[lo:hi],
            land_valid=self.land_valid[lo:hi],
        )


def validate_actions(actions: np.ndarray, batch: int, num_agents: int) -> np.ndarray:
    actions = np.asarray(actions, dtype=np.float64)
    if actions.shape != (batch, num_agents, 2):
        raise ValueError(
            f"action array must have shape {(batch, num_agents, 2)}, got {actions.shape}"
        )
    finite = np.isfinite(actions).all(axis=2)
    if not finite.all():
        slot, agent = np.argwhere(~finite)[0]
        raise NonFiniteAction(int(agent), slot=int(slot))
    return actions


def _seqsum(terms: np.ndarray, axis: int) -> np.ndarray:
    """Sequential (left-to-right) sum along `axis`; padding-invariant."""
    if terms.shape[axis] == 0:
        shape = list(terms.shape)
        del shape[axis]
        return np.zeros(shape, dtype=terms.dtype)
    return np.cumsum(terms, axis=axis).take(-1, axis=axis)


def prefilter_landmarks(scene: Scene, params: EngineParams) -> tuple[np.ndarray, np.ndarray]:
    """Per-agent candidate landmark indices (ascending) and validity mask.

    The reach radius covers both the contact range and the sensing window for
    every pair, plus double the worst-case travel over one environment step,
    so the candidate set stays a superset for the whole frameskip burst.
    """
    B, N = scene.pos.shape[:2]
    M = scene.land_pos.shape[1]
    if M == 0:
        return (
            np.zeros((B, N, 0), dtype=np.int64),
            np.zeros((B, N, 0), dtype=bool),
        )
    dx = scene.pos[:, :, 0][:, :, None] - scene.land_pos[:, :, 0][:, None, :]
    dy = scene.pos[:, :, 1][:, :, None] - scene.land_pos[:, :, 1][:, None, :]
    dist2 = dx * dx + dy * dy
    reach = (
        scene.radius[:, :, None]
        + scene.land_rad[:, None, :]
        + params.obs.window
        + 2.0 * params.max_travel_per_step()
    )
    in_range = (dist2 < reach * reach) & scene.land_valid[:, None, :]
    counts = in_range.sum(axis=2)
    k = int(counts.max()) if counts.size else 0
    if k == 0:
        return (
            np.zeros((B, N, 0), dtype=np.int64),
            np.zeros((B, N, 0), dtype=bool),
        )
    # Stable argsort of (not in_range) keeps in-range indices first, ascending.
    order = np.argsort(~in_range, axis=2, kind="stable")[:, :, :k]
    valid = np.take_along_axis(in_range, order, axis=2)
    return order, valid


def _gather_landmarks(
    scene: Scene, cand_idx: np.ndarray, cand_valid: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """(B, N, K, 2) candidate positions and (B, N, K) radii."""
    B = scene.batch
    b_idx = np.arange(B)[:, None, None]
    lp = scene.land_pos[b_idx, cand_idx]
    lr = scene.land_rad[b_idx, cand_idx]
    return lp, lr


def _pair_forces(
    dx: np.ndarray,
    dy: np.ndarray,
    dist: np.ndarray,
    d_min: np.ndarray,
    active: np.ndarray,
    contact: ContactParams,
) -> tuple[np.ndarray, np.ndarray]:
    """Force components for one block of candidate pairs.

    Computes the softplus ramp only on contact pairs (scatter/gather keeps
    per-value bits identical to a dense evaluation) and resolves coincident
    centers by pushing along +x.
    """
    hit = active & (dist < d_min)
    fx = np.zeros_like(dist)
    fy = np.zeros_like(dist)
    if not hit.any():
        return fx, fy
    idx = np.nonzero(hit)
    z = d_min[idx] - dist[idx]
    k = contact.k
    mag = contact.f0 * (z + k * np.log1p(np.exp(-z / k)))
    d = dist[idx]
    coincident = d == 0.0
    safe = np.where(coincident, 1.0, d)
    scale = mag / safe
    fx[idx] = np.where(coincident, mag, dx[idx] * scale)
    fy[idx] = np.where(coincident, 0.0, dy[idx] * scale)
    return fx, fy


def _total_forces(
    pos: np.ndarray,
    radius: np.ndarray,
    land_pos_g: np.ndarray,
    land_rad_g: np.ndarray,
    land_valid_g: np.ndarray,
    contact: ContactParams,
) -> np.ndarray:
    """(B, N, 2) contact force totals, accumulated in global body index order."""
    B, N = pos.shape[:2]
    dxa = pos[:, :, 0][:, :, None] - pos[:, :, 0][:, None, :]
    dya = pos[:, :, 1][:, :, None] - pos[:, :, 1][:, None, :]
    dista = np.sqrt(dxa * dxa + dya * dya)
    dmina = radius[:, :, None] + radius[:, None, :]
    not_self = ~np.eye(N, dtype=bool)[None, :, :]
    fax, fay = _pair_forces(dxa, dya, dista, dmina, not_self, contact)

    if land_pos_g.shape[2]:
        dxl = pos[:, :, 0][:, :, None] - land_pos_g[:, :, :, 0]
        dyl = pos[:, :, 1][:, :, None] - land_pos_g[:, :, :, 1]
        distl = np.sqrt(dxl * dxl + dyl * dyl)
        dminl = radius[:, :, None] + land_rad_g
        flx, fly = _pair_forces(dxl, dyl, distl, dminl, land_valid_g, contact)
        fx = np.concatenate([fax, flx], axis=2)
        fy = np.concatenate([fay, fly], axis=2)
    else:
        fx, fy = fax, fay
    return np.stack([_seqsum(fx, axis=2), _seqsum(fy, axis=2)], axis=-1)


def substeps(
    scene: Scene,
    actions: np.ndarray,
    params: EngineParams,
    cand_idx: np.ndarray,
    cand_valid: np.ndarray,
    steps: int,
) -> Scene:
    """Run `steps` integration sub-steps with held actions, recomputing
    contact forces every sub-step. Returns a new Scene."""
    pos = scene.pos.copy()
    vel = scene.vel.copy()
    heading = scene.heading.copy()
    radius = scene.radius
    holo = scene.holo_mask
    all_holo = bool(holo.all())
    hp = params.holonomic
    dp = params.diffdrive
    dt = params.dt
    contact = params.contact

    lp, lr = _gather_landmarks(scene, cand_idx, cand_valid)

    for _ in range(steps):
        force = _total_forces(pos, radius, lp, lr, cand_valid, contact)

        # Holonomic lanes: damp, accelerate, clamp speed, advance.
        acc = (actions + force) / hp.mass
        v_h = (1.0 - hp.damping) * vel + acc * dt
        if hp.max_speed is not None:
            speed = np.sqrt(v_h[..., 0] * v_h[..., 0] + v_h[..., 1] * v_h[..., 1])
            over = speed > hp.max_speed
            if over.any():
                scale = np.where(over, hp.max_speed / np.where(over, speed, 1.0), 1.0)
                v_h = np.where(over[..., None], v_h * scale[..., None], v_h)
        p_h = pos + v_h * dt

        if all_holo:
            pos, vel = p_h, v_h
            continue

        # Diff-drive lanes: clip speeds, roll along heading, positional
        # collision correction, wrap heading.
        u = np.clip(actions[..., 0], -dp.max_u, dp.max_u)
        w = np.clip(actions[..., 1], -dp.max_w, dp.max_w)
        v_d = np.stack([u * np.cos(heading), u * np.sin(heading)], axis=-1)
        p_d = pos + v_d * dt + force * (dt * dt)
        h_d = wrap_angle(heading + w * dt)

        lane = holo[None, :, None]
        pos = np.where(lane, p_h, p_d)
        vel = np.where(lane, v_h, v_d)
        heading = np.where(holo[None, :], heading, h_d)

    out = scene.copy()
    out.pos = pos
    out.vel = vel
    out.heading = heading
    return out


def observe_batch(
    scene: Scene,
    params: EngineParams,
    cand_idx: np.ndarray,
    cand_valid: np.ndarray,
) -> np.ndarray:
    """(B, N, 2·max_obs + 2) observations.

    Candidate order is agents then landmarks (both ascending), so the stable
    in-range sort breaks surface-distance ties by global body index. Slots
    beyond the in-range count stay exactly zero.
    """
    obs_p = params.obs
    window = obs_p.window
    B, N = scene.pos.shape[:2]

    # agent-agent: delta points from observer to body
    dxa = scene.pos[:, :, 0][:, None, :] - scene.pos[:, :, 0][:, :, None]
    dya = scene.pos[:, :, 1][:, None, :] - scene.pos[:, :, 1][:, :, None]
    dista = np.sqrt(dxa * dxa + dya * dya)
    keya = dista - scene.radius[:, :, None] - scene.radius[:, None, :]
    valida = ~np.eye(N, dtype=bool)[None, :, :]
    rada = np.broadcast_to(scene.radius[:, None, :], dista.shape)

    lp, lr = _gather_landmarks(scene, cand_idx, cand_valid)
    if lp.shape[2]:
        dxl = lp[:, :, :, 0] - scene.pos[:, :, 0][:, :, None]
        dyl = lp[:, :, :, 1] - scene.pos[:, :, 1][:, :, None]
        distl = np.sqrt(dxl * dxl + dyl * dyl)
        keyl = distl - scene.radius[:, :, None] - lr
        dx = np.concatenate([dxa, dxl], axis=2)
        dy = np.concatenate([dya, dyl], axis=2)
        dist = np.concatenate([dista, distl], axis=2)
        key = np.concatenate([keya, keyl], axis=2)
        valid = np.concatenate([np.broadcast_to(valida, dista.shape), cand_valid], axis=2)
        rad = np.concatenate([rada, lr], axis=2)
    else:
        dx, dy, dist, key, rad = dxa, dya, dista, keya, rada
        valid = np.broadcast_to(valida, dista.shape)

    in_range = valid & (key < window)
    coincident = in_range & (dist == 0.0)
    safe_dist = np.where(dist == 0.0, 1.0, dist)
    factor = (1.0 - (window + rad) / safe_dist) / window
    vx = np.where(coincident, -(window + rad) / window, dx * factor)
    vy = np.where(coincident, 0.0, dy * factor)

    sort_key = np.where(in_range, key, np.inf)
    order = np.argsort(sort_key, axis=2, kind="stable")[:, :, : obs_p.max_obs]
    got = order.shape[2]
    slot_valid = np.take_along_axis(in_range, order, axis=2)
    slot_x = np.where(slot_valid, np.take_along_axis(vx, order, axis=2), 0.0)
    slot_y = np.where(slot_valid, np.take_along_axis(vy, order, axis=2), 0.0)

    out = np.zeros((B, N, 2 * obs_p.max_obs + 2), dtype=np.float64)
    out[:, :, 0 : 2 * got : 2] = slot_x
    out[:, :, 1 : 2 * got : 2] = slot_y

    gx = scene.goals[:, :, 0] - scene.pos[:, :, 0]
    gy = scene.goals[:, :, 1] - scene.pos[:, :, 1]
    gdist = np.sqrt(gx * gx + gy * gy)
    far = gdist > window
    gscale = np.where(far, window / np.where(far, gdist, 1.0), 1.0)
    gx = np.where(far, gx * gscale, gx)
    gy = np.where(far, gy * gscale, gy)
    gx = gx / window
    gy = gy / window
    # force norm <= 1 exactly (clipping can overshoot by an ulp)
    norm = np.sqrt(gx * gx + gy * gy)
    while (norm > 1.0).any():
        over = norm > 1.0
        gx = np.where(over, gx / np.where(over, norm, 1.0), gx)
        gy = np.where(over, gy / np.where(over, norm, 1.0), gy)
        norm = np.sqrt(gx * gx + gy * gy)
    out[:, :, -2] = gx
    out[:, :, -1] = gy
    return out


def goal_distances(scene: Scene) -> np.ndarray:
    gx = scene.pos[:, :, 0] - scene.goals[:, :, 0]
    gy = scene.pos[:, :, 1] - scene.goals[:, :, 1]
    return np.sqrt(gx * gx + gy * gy)


def collision_flags(
    scene: Scene,
    cand_idx: np.ndarray,
    cand_valid: np.ndarray,
) -> np.ndarray:
    """(B, N) bool: agent overlaps any other body (strict)."""
    pos = scene.pos
    N = scene.num_agents
    dxa = pos[:, :, 0][:, :, None] - pos[:, :, 0][:, None, :]
    dya = pos[:, :, 1][:, :, None] - pos[:, :, 1][:, None, :]
    dista = np.sqrt(dxa * dxa + dya * dya)
    dmina = scene.radius[:, :, None] + scene.radius[:, None, :]
    hits = ((dista < dmina) & ~np.eye(N, dtype=bool)[None, :, :]).any(axis=2)
    lp, lr = _gather_landmarks(scene, cand_idx, cand_valid)
    if lp.shape[2]:
        dxl = pos[:, :, 0][:, :, None] - lp[:, :, :, 0]
        dyl = pos[:, :, 1][:, :, None] - lp[:, :, :, 1]
        distl = np.sqrt(dxl * dxl + dyl * dyl)
        dminl = scene.radius[:, :, None] + lr
        hits = hits | ((distl < dminl) & cand_valid).any(axis=2)
    return hits


def step_rewards_batch(
    dist_prev: np.ndarray,
    dist_curr: np.ndarray,
    on_goal: np.ndarray,
    collided: np.ndarray,
    shaping: float,
) -> np.ndarray:
    """(B, N) rewards; term order matches the scalar reference."""
    all_on = on_goal.all(axis=1)
    r = np.where(all_on[:, None], 0.5, 0.0)
    r = r + np.where(on_goal, 0.5, 0.0)
    r = r + np.where(collided, -1.0, 0.0)
    r = r + shaping * (dist_prev - dist_curr)
    return r
