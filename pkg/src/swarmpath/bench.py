"""Throughput benchmarking: batched stepping at fixed configuration.

SPS counts environment steps across the whole batch per wall-clock second;
agent-steps multiply that by the agent count. The benchmark replicates one
reset across all slots (layout generation is not what is being measured) and
drives a fixed zero- or random-action policy.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace

import numpy as np

from .environment import BatchedWorld, EnvConfig, batch_step, reset
from .rng import RngKey


@dataclass(frozen=True)
class BenchReport:
    envs: int
    agents: int
    steps: int
    wall_seconds: float
    sps: float
    agent_steps_per_second: float

    def as_dict(self) -> dict:
        return {
            "envs": self.envs,
            "agents": self.agents,
            "steps": self.steps,
            "wall_seconds": self.wall_seconds,
            "sps": self.sps,
            "agent_steps_per_second": self.agent_steps_per_second,
        }


def _replicate(cfg: EnvConfig, seed: int, envs: int) -> BatchedWorld:
    state, _ = reset(cfg, seed)
    scene = state.scene

    def tile(arr: np.ndarray) -> np.ndarray:
        return np.repeat(arr, envs, axis=0)

    batched = replace(cfg) if cfg.batch_size == envs else cfg
    big = BatchedWorld(
        scene=type(scene)(
            pos=tile(scene.pos),
            vel=tile(scene.vel),
            heading=tile(scene.heading),
            radius=tile(scene.radius),
            holo_mask=scene.holo_mask,
            goals=tile(scene.goals),
            goal_radius=tile(scene.goal_radius),
            land_pos=tile(scene.land_pos),
            land_rad=tile(scene.land_rad),
            land_valid=tile(scene.land_valid),
        ),
        step_index=0,
        keys=[state.rng] * envs,
        done=False,
        config=batched,
        map_specs=[state.map_spec] * envs,
        placements=[state.placement] * envs,
        goal_dist=tile(state.goal_dist),
    )
    return big


def run_bench(
    cfg: EnvConfig,
    envs: int,
    steps: int,
    seed: int = 5,
    policy: str = "zero",
    warmup: int = 3,
    threads: int = 1,
) -> BenchReport:
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if envs < 1:
        raise ValueError("envs must be >= 1")
    if policy not in ("zero", "random"):
        raise ValueError("bench policy must be 'zero' or 'random'")

    # budget must outlast warmup + timed steps; bench never terminates early
    cfg = replace(cfg, episode_budget=warmup + steps + 1)
    world = _replicate(cfg, seed, envs)
    n = world.num_agents

    gen = RngKey.from_seed(seed).child("bench-actions").generator()

    def actions() -> np.ndarray:
        if policy == "zero":
            return np.zeros((envs, n, 2))
        return gen.uniform(-1.0, 1.0, size=(envs, n, 2))

    for _ in range(warmup):
        world, _ = batch_step(world, actions(), threads=threads)

    t0 = time.perf_counter()
    for _ in range(steps):
        world, _ = batch_step(world, actions(), threads=threads)
    wall = time.perf_counter() - t0

    sps = envs * steps / wall
    return BenchReport(
        envs=envs,
        agents=n,
        steps=steps,
        wall_seconds=wall,
        sps=sps,
        agent_steps_per_second=sps * n,
    )
