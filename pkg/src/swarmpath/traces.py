"""Episode trace files: JSON records consumed by the renderer, the golden
determinism suite, and external clients replaying trajectories."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .config import config_to_dict
from .environment import EnvConfig, WorldState, reset, step
from .policies import PolicyHook
from .rewards import EpisodeTrace, finalize_metrics
from .rng import RngKey


def _vec_list(arr) -> list[list[float]]:
    return [[float(v[0]), float(v[1])] for v in arr]


def record_episode(
    cfg: EnvConfig,
    policy: PolicyHook,
    seed: int,
    max_steps: int | None = None,
    include_observations: bool = False,
    policy_key: RngKey | None = None,
) -> tuple[dict, "EpisodeTrace"]:
    """Run one episode and capture a full replayable trace."""
    state, obs = reset(cfg, seed)
    policy.begin_episode(state, policy_key or RngKey.from_seed(seed).child("policy"))
    trace_doc = {
        "config": config_to_dict(cfg),
        "seed": seed,
        "bounds": [
            state.map_spec.bounds.lo.x,
            state.map_spec.bounds.lo.y,
            state.map_spec.bounds.hi.x,
            state.map_spec.bounds.hi.y,
        ],
        "cell_size": state.map_spec.cell_size,
        "layout_id": state.map_spec.layout_id,
        "landmarks": [[c.center.x, c.center.y, c.radius] for c in state.landmarks],
        "goals": _vec_list(state.scene.goals[0]),
        "goal_radii": [float(v) for v in state.scene.goal_radius[0]],
        "agent_radii": [float(v) for v in state.scene.radius[0]],
        "models": [
            "holonomic" if state.scene.holo_mask[i] else "diffdrive"
            for i in range(state.num_agents)
        ],
        "initial_positions": _vec_list(state.scene.pos[0]),
        "steps": [],
    }
    if include_observations:
        trace_doc["initial_observations"] = [[float(v) for v in row] for row in obs]

    metrics_trace = EpisodeTrace(
        num_agents=state.num_agents,
        budget=cfg.episode_budget,
        initial_positions=[a.position for a in state.agents],
        initial_distances=[float(d) for d in state.goal_dist[0]],
    )
    budget = cfg.episode_budget if max_steps is None else min(max_steps, cfg.episode_budget)
    for _ in range(budget):
        actions = policy.act(obs, state)
        state, result = step(state, actions)
        obs = result.observations
        entry = {
            "actions": _vec_list(np.asarray(actions)),
            "positions": _vec_list(state.scene.pos[0]),
            "velocities": _vec_list(state.scene.vel[0]),
            "rewards": [float(r) for r in result.rewards],
            "collisions": [bool(v) for v in result.info["collisions"]],
            "on_goal": [bool(v) for v in result.info["on_goal"]],
        }
        if include_observations:
            entry["observations"] = [[float(v) for v in row] for row in obs]
        trace_doc["steps"].append(entry)
        metrics_trace.append(
            [a.position for a in state.agents],
            state.goal_dist[0],
            result.info["on_goal"],
            result.info["collisions"],
        )
        if state.done:
            break
    trace_doc["metrics"] = finalize_metrics(metrics_trace).as_dict()
    return trace_doc, metrics_trace


def save_trace(doc: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(doc, indent=None, separators=(",", ":")) + "\n")


def load_trace(path: str | Path) -> dict:
    return json.loads(Path(path).read_text())
