"""Episode lifecycle: reset, step, termination, batching, seeding.

The environment is functional: step(state, actions) returns a fresh state and
never mutates its input. A batch is stepped in lockstep; slot k of any batch
evolves bit-identically to a standalone environment given the same seed,
regardless of batch size or thread count (see engine module for why).

Actions are always (N, 2) per slot: a 2D force for holonomic agents, (linear
speed, angular speed) for differential-drive agents.

RNG tree per episode: seed -> root key -> generation key (map cells,
placement, radii) and headings key. Nothing in step() consumes randomness.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import engine
from .dynamics import (
    AgentKinematics,
    ContactParams,
    DiffDriveParams,
    DynamicsModel,
    HolonomicParams,
    SimParams,
)
from .engine import EngineParams, Scene
from .errors import EpisodeFinished
from .geometry import Circle, Vec2
from .maps import GeneratorConfig, MapSpec, PlacementSpec, generate
from .observation import ObsParams
from .rewards import RewardParams
from .rng import RngKey


@dataclass(frozen=True)
class EnvConfig:
    generator: GeneratorConfig = GeneratorConfig()
    sim: SimParams = SimParams()
    obs: ObsParams = ObsParams()
    reward: RewardParams = RewardParams()
    holonomic: HolonomicParams = HolonomicParams()
    diffdrive: DiffDriveParams = DiffDriveParams()
    episode_budget: int = 160
    batch_size: int = 1
    seed: int = 5

    def __post_init__(self):
        if self.episode_budget < 1:
            raise ValueError("episode_budget must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")

    def engine_params(self) -> EngineParams:
        return EngineParams(
            contact=self.sim.contact,
            holonomic=replace(self.holonomic, dt=self.sim.dt),
            diffdrive=replace(self.diffdrive, dt=self.sim.dt),
            obs=self.obs,
            dt=self.sim.dt,
            frameskip=self.sim.frameskip,
        )

    @property
    def num_agents(self) -> int:
        return self.generator.num_agents

    @property
    def obs_length(self) -> int:
        return 2 * self.obs.max_obs + 2


@dataclass
class WorldState:
    """Full dynamic state of one environment instance."""

    scene: Scene  # batch dimension of exactly 1
    step_index: int
    rng: RngKey
    done: bool
    config: EnvConfig
    map_spec: MapSpec
    placement: PlacementSpec
    goal_dist: np.ndarray  # (1, N) cache of distances to goals

    @property
    def num_agents(self) -> int:
        return self.scene.num_agents

    @property
    def agents(self) -> list[AgentKinematics]:
        s = self.scene
        out = []
        for i in range(s.num_agents):
            out.append(
                AgentKinematics(
                    position=Vec2(float(s.pos[0, i, 0]), float(s.pos[0, i, 1])),
                    velocity=Vec2(float(s.vel[0, i, 0]), float(s.vel[0, i, 1])),
                    radius=float(s.radius[0, i]),
                    model=DynamicsModel.HOLONOMIC if s.holo_mask[i] else DynamicsModel.DIFFDRIVE,
                    heading=float(s.heading[0, i]),
                )
            )
        return out

    @property
    def landmarks(self) -> list[Circle]:
        s = self.scene
        out = []
        for j in range(s.land_pos.shape[1]):
            if s.land_valid[0, j]:
                out.append(
                    Circle(
                        Vec2(float(s.land_pos[0, j, 0]), float(s.land_pos[0, j, 1])),
                        float(s.land_rad[0, j]),
                    )
                )
        return out

    @property
    def goals(self) -> list[Vec2]:
        s = self.scene
        return [Vec2(float(s.goals[0, i, 0]), float(s.goals[0, i, 1])) for i in range(s.num_agents)]

    @property
    def goal_radii(self) -> list[float]:
        return [float(v) for v in self.scene.goal_radius[0]]


@dataclass
class BatchedWorld:
    """Lockstep batch of environment instances."""

    scene: Scene
    step_index: int
    keys: list[RngKey]
    done: bool
    config: EnvConfig
    map_specs: list[MapSpec]
    placements: list[PlacementSpec]
    goal_dist: np.ndarray  # (B, N)

    @property
    def batch_size(self) -> int:
        return self.scene.batch

    @property
    def num_agents(self) -> int:
        return self.scene.num_agents

    def slot(self, k: int) -> WorldState:
        return WorldState(
            scene=self.scene.slice(k, k + 1).copy(),
            step_index=self.step_index,
            rng=self.keys[k],
            done=self.done,
            config=self.config,
            map_spec=self.map_specs[k],
            placement=self.placements[k],
            goal_dist=self.goal_dist[k : k + 1].copy(),
        )


@dataclass(frozen=True)
class StepResult:
    observations: np.ndarray  # (N, obs_len)
    rewards: np.ndarray       # (N,)
    done: bool
    info: dict


@dataclass(frozen=True)
class BatchStepResult:
    observations: np.ndarray  # (B, N, obs_len)
    rewards: np.ndarray       # (B, N)
    dones: np.ndarray         # (B,) bool
    info: dict


def _uniform_heading(u: np.ndarray) -> np.ndarray:
    # u in [0, 1) maps to (-pi, pi]: u=0 gives pi, u->1 approaches -pi.
    return math.pi - u * (2.0 * math.pi)


def _build_slot(
    cfg: EnvConfig, seed: int, slot: int
) -> tuple[MapSpec, PlacementSpec, RngKey, np.ndarray]:
    root = RngKey.from_seed(seed)
    map_spec, placement = generate(cfg.generator, root.child("generation"), slot=slot)
    n = len(placement.agent_starts)
    if n != cfg.generator.num_agents:
        raise ValueError(
            f"generator produced {n} agents, config says {cfg.generator.num_agents}"
        )
    u = root.child("headings").generator().random(n)
    headings = _uniform_heading(u)
    return map_spec, placement, root, headings


def _assemble_scene(
    cfg: EnvConfig,
    slots: list[tuple[MapSpec, PlacementSpec, RngKey, np.ndarray]],
) -> Scene:
    B = len(slots)
    n = cfg.generator.num_agents
    models = slots[0][1].agent_models
    holo_mask = np.array([m is DynamicsModel.HOLONOMIC for m in models], dtype=bool)
    reward_radius = cfg.reward.goal_radius

    pos = np.zeros((B, n, 2))
    heading = np.zeros((B, n))
    radius = np.zeros((B, n))
    goals = np.zeros((B, n, 2))
    goal_radius = np.zeros((B, n))
    m_max = max(len(spec.landmarks) for spec, _, _, _ in slots)
    land_pos = np.zeros((B, m_max, 2))
    land_rad = np.zeros((B, m_max))
    land_valid = np.zeros((B, m_max), dtype=bool)

    for b, (spec, placement, _, headings) in enumerate(slots):
        if placement.agent_models != models:
            raise ValueError("all batch slots must share the same dynamics models")
        pos[b] = [(p.x, p.y) for p in placement.agent_starts]
        goals[b] = [(g.x, g.y) for g in placement.goals]
        radius[b] = placement.agent_radii
        goal_radius[b] = (
            placement.goal_radii if reward_radius is None else [reward_radius] * n
        )
        heading[b] = np.where(holo_mask, 0.0, headings)
        lp, lr = spec.landmark_arrays()
        m = len(lr)
        land_pos[b, :m] = lp
        land_rad[b, :m] = lr
        land_valid[b, :m] = True

    return Scene(
        pos=pos,
        vel=np.zeros((B, n, 2)),
        heading=heading,
        radius=radius,
        holo_mask=holo_mask,
        goals=goals,
        goal_radius=goal_radius,
        land_pos=land_pos,
        land_rad=land_rad,
        land_valid=land_valid,
    )


def _sense(scene: Scene, params: EngineParams) -> np.ndarray:
    cand_idx, cand_valid = engine.prefilter_landmarks(scene, params)
    return engine.observe_batch(scene, params, cand_idx, cand_valid)


def reset(cfg: EnvConfig, seed: int) -> tuple[WorldState, np.ndarray]:
    """Fresh single environment; returns the state and (N, obs_len) observations."""
    slot = _build_slot(cfg, seed, slot=0)
    scene = _assemble_scene(cfg, [slot])
    params = cfg.engine_params()
    state = WorldState(
        scene=scene,
        step_index=0,
        rng=slot[2],
        done=False,
        config=cfg,
        map_spec=slot[0],
        placement=slot[1],
        goal_dist=engine.goal_distances(scene),
    )
    return state, _sense(scene, params)[0]


def batch_reset(cfg: EnvConfig, seeds: list[int]) -> tuple[BatchedWorld, np.ndarray]:
    """Fresh lockstep batch, one seed per slot."""
    if not seeds:
        raise ValueError("batch_reset needs at least one seed")
    slots = [_build_slot(cfg, seed, slot=i) for i, seed in enumerate(seeds)]
    scene = _assemble_scene(cfg, slots)
    params = cfg.engine_params()
    world = BatchedWorld(
        scene=scene,
        step_index=0,
        keys=[s[2] for s in slots],
        done=False,
        config=cfg,
        map_specs=[s[0] for s in slots],
        placements=[s[1] for s in slots],
        goal_dist=engine.goal_distances(scene),
    )
    return world, _sense(scene, params)


def _step_scene(
    scene: Scene,
    actions: np.ndarray,
    params: EngineParams,
    prev_goal_dist: np.ndarray,
    shaping: float,
) -> tuple[Scene, np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    cand_idx, cand_valid = engine.prefilter_landmarks(scene, params)
    nxt = engine.substeps(scene, actions, params, cand_idx, cand_valid, params.frameskip)
    obs = engine.observe_batch(nxt, params, cand_idx, cand_valid)
    collided = engine.collision_flags(nxt, cand_idx, cand_valid)
    gdist = engine.goal_distances(nxt)
    on_goal = gdist <= nxt.goal_radius
    rewards = engine.step_rewards_batch(prev_goal_dist, gdist, on_goal, collided, shaping)
    return nxt, obs, rewards, on_goal, collided, gdist


def step(state: WorldState, actions: np.ndarray) -> tuple[WorldState, StepResult]:
    """Advance one environment step (frameskip sub-steps with held actions)."""
    if state.done:
        raise EpisodeFinished(f"episode already finished at step {state.step_index}")
    cfg = state.config
    acts = engine.validate_actions(
        np.asarray(actions, dtype=np.float64)[None, ...], 1, state.num_agents
    )
    params = cfg.engine_params()
    nxt_scene, obs, rewards, on_goal, collided, gdist = _step_scene(
        state.scene, acts, params, state.goal_dist, cfg.reward.shaping
    )
    step_index = state.step_index + 1
    done = step_index >= cfg.episode_budget
    nxt = WorldState(
        scene=nxt_scene,
        step_index=step_index,
        rng=state.rng,
        done=done,
        config=cfg,
        map_spec=state.map_spec,
        placement=state.placement,
        goal_dist=gdist,
    )
    result = StepResult(
        observations=obs[0],
        rewards=rewards[0],
        done=done,
        info={"collisions": collided[0], "on_goal": on_goal[0]},
    )
    return nxt, result


def _chunk_ranges(batch: int, threads: int) -> list[tuple[int, int]]:
    workers = max(1, min(threads, batch))
    base = batch // workers
    extra = batch % workers
    out = []
    lo = 0
    for w in range(workers):
        hi = lo + base + (1 if w < extra else 0)
        out.append((lo, hi))
        lo = hi
    return out


def batch_step(
    world: BatchedWorld, actions: np.ndarray, threads: int = 1
) -> tuple[BatchedWorld, BatchStepResult]:
    """Advance every slot one step. Slots never exchange information; with
    threads > 1 the batch is split into contiguous chunks whose per-slot
    results are bit-identical to the single-threaded run."""
    if world.done:
        raise EpisodeFinished(f"batch already finished at step {world.step_index}")
    cfg = world.config
    acts = engine.validate_actions(actions, world.batch_size, world.num_agents)
    params = cfg.engine_params()
    shaping = cfg.reward.shaping

    ranges = _chunk_ranges(world.batch_size, threads)
    if len(ranges) == 1:
        parts = [_step_scene(world.scene, acts, params, world.goal_dist, shaping)]
    else:
        def run(rg):
            lo, hi = rg
            return _step_scene(
                world.scene.slice(lo, hi), acts[lo:hi], params, world.goal_dist[lo:hi], shaping
            )

        with ThreadPoolExecutor(max_workers=len(ranges)) as pool:
            parts = list(pool.map(run, ranges))

    def cat(i):
        return np.concatenate([p[i] for p in parts], axis=0)

    scenes = [p[0] for p in parts]
    nxt_scene = world.scene.copy()
    nxt_scene.pos = np.concatenate([s.pos for s in scenes], axis=0)
    nxt_scene.vel = np.concatenate([s.vel for s in scenes], axis=0)
    nxt_scene.heading = np.concatenate([s.heading for s in scenes], axis=0)
    obs, rewards, on_goal, collided, gdist = cat(1), cat(2), cat(3), cat(4), cat(5)

    step_index = world.step_index + 1
    done = step_index >= cfg.episode_budget
    nxt = BatchedWorld(
        scene=nxt_scene,
        step_index=step_index,
        keys=world.keys,
        done=done,
        config=cfg,
        map_specs=world.map_specs,
        placements=world.placements,
        goal_dist=gdist,
    )
    result = BatchStepResult(
        observations=obs,
        rewards=rewards,
        dones=np.full(world.batch_size, done, dtype=bool),
        info={"collisions": collided, "on_goal": on_goal},
    )
    return nxt, result


def substep_world(state: WorldState, actions, sim: SimParams | None = None) -> WorldState:
    """Physics-only integration burst (no observations, rewards, or step
    bookkeeping); used by the dynamics-level substep operation."""
    cfg = state.config
    sim = sim if sim is not None else cfg.sim
    params = EngineParams(
        contact=sim.contact,
        holonomic=replace(cfg.holonomic, dt=sim.dt),
        diffdrive=replace(cfg.diffdrive, dt=sim.dt),
        obs=cfg.obs,
        dt=sim.dt,
        frameskip=sim.frameskip,
    )
    acts = engine.validate_actions(
        np.asarray(actions, dtype=np.float64)[None, ...], 1, state.num_agents
    )
    cand_idx, cand_valid = engine.prefilter_landmarks(state.scene, params)
    nxt_scene = engine.substeps(
        state.scene, acts, params, cand_idx, cand_valid, params.frameskip
    )
    return WorldState(
        scene=nxt_scene,
        step_index=state.step_index,
        rng=state.rng,
        done=state.done,
        config=cfg,
        map_spec=state.map_spec,
        placement=state.placement,
        goal_dist=engine.goal_distances(nxt_scene),
    )
