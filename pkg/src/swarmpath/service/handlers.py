"""Session registry and request handlers.

The FastAPI endpoints and the CLI both dispatch here, so one validation and
orchestration path serves every surface. A session owns a batched environment;
sessions are single-writer (locked) and live until closed.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass

import numpy as np

from .. import __version__
from ..bench import run_bench
from ..config import load_config, parse_config
from ..environment import BatchedWorld, EnvConfig, batch_reset, batch_step
from ..errors import SimError
from ..evaluation import easy_tasks, hard_tasks, medium_tasks, run_protocol
from ..maps import generate, serialize_map
from ..policies import make_policy
from ..rng import RngKey
from ..traces import record_episode
from . import models as m


class ServiceError(Exception):
    """Handler-level failure with an HTTP-ish status code."""

    def __init__(self, status: int, error: str, detail: str):
        self.status = status
        self.error = error
        self.detail = detail
        super().__init__(detail)


class UnknownEnv(ServiceError):
    def __init__(self, env_id: str):
        super().__init__(404, "unknown_env", f"no environment with id {env_id!r}")


@dataclass
class EnvSession:
    env_id: str
    config: EnvConfig
    world: BatchedWorld | None
    lock: threading.Lock


class Registry:
    def __init__(self):
        self._sessions: dict[str, EnvSession] = {}
        self._lock = threading.Lock()
        self._counter = itertools.count(1)

    def add(self, config: EnvConfig) -> EnvSession:
        with self._lock:
            env_id = f"env-{next(self._counter)}"
            session = EnvSession(env_id=env_id, config=config, world=None, lock=threading.Lock())
            self._sessions[env_id] = session
            return session

    def get(self, env_id: str) -> EnvSession:
        with self._lock:
            try:
                return self._sessions[env_id]
            except KeyError:
                raise UnknownEnv(env_id) from None

    def remove(self, env_id: str) -> None:
        with self._lock:
            if env_id not in self._sessions:
                raise UnknownEnv(env_id)
            del self._sessions[env_id]

    def clear(self) -> None:
        with self._lock:
            self._sessions.clear()


REGISTRY = Registry()


def _resolve_config(config: dict | None, config_path: str | None) -> EnvConfig:
    if config is not None and config_path is not None:
        raise ServiceError(400, "bad_request", "pass either config or config_path, not both")
    try:
        if config_path is not None:
            return load_config(config_path)
        return parse_config(config or {})
    except SimError as exc:
        raise ServiceError(422, "invalid_config", str(exc)) from exc
    except FileNotFoundError as exc:
        raise ServiceError(404, "missing_file", str(exc)) from exc


def version() -> m.VersionResponse:
    return m.VersionResponse(name="swarmpath", version=__version__)


def _describe(session: EnvSession) -> m.EnvDescription:
    cfg = session.config
    world = session.world
    models = ["holonomic"] * cfg.num_agents
    if world is not None:
        models = [
            "holonomic" if world.scene.holo_mask[i] else "diffdrive"
            for i in range(world.num_agents)
        ]
    return m.EnvDescription(
        env_id=session.env_id,
        batch_size=cfg.batch_size,
        num_agents=cfg.num_agents,
        obs_length=cfg.obs_length,
        models=models,
        episode_budget=cfg.episode_budget,
        step_index=world.step_index if world is not None else 0,
        done=world.done if world is not None else False,
    )


def create_env(req: m.CreateEnvRequest) -> m.EnvDescription:
    cfg = _resolve_config(req.config, req.config_path)
    session = REGISTRY.add(cfg)
    return _describe(session)


def describe_env(env_id: str) -> m.EnvDescription:
    return _describe(REGISTRY.get(env_id))


def reset_env(env_id: str, req: m.ResetRequest) -> m.ResetResponse:
    session = REGISTRY.get(env_id)
    cfg = session.config
    if len(req.seeds) != cfg.batch_size:
        raise ServiceError(
            422,
            "shape_mismatch",
            f"expected {cfg.batch_size} seeds (batch_size), received {len(req.seeds)}",
        )
    with session.lock:
        try:
            world, obs = batch_reset(cfg, req.seeds)
        except SimError as exc:
            raise ServiceError(422, "reset_failed", str(exc)) from exc
        session.world = world
    return m.ResetResponse(observations=obs.tolist())


def step_env(env_id: str, req: m.StepRequest) -> m.StepResponse:
    session = REGISTRY.get(env_id)
    with session.lock:
        if session.world is None:
            raise ServiceError(409, "not_reset", "environment must be reset before stepping")
        world = session.world
        actions = np.asarray(req.actions, dtype=object)
        try:
            dense = np.asarray(req.actions, dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise ServiceError(
                422, "shape_mismatch", f"ragged action array: {exc}"
            ) from exc
        expected = (world.batch_size, world.num_agents, 2)
        if dense.shape != expected:
            raise ServiceError(
                422,
                "shape_mismatch",
                f"expected actions shape {list(expected)}, received {list(dense.shape)}",
            )
        try:
            world, result = batch_step(world, dense, threads=req.threads)
        except SimError as exc:
            raise ServiceError(422, "step_failed", str(exc)) from exc
        session.world = world
    return m.StepResponse(
        observations=result.observations.tolist(),
        rewards=result.rewards.tolist(),
        dones=result.dones.tolist(),
        collisions=result.info["collisions"].tolist(),
        on_goal=result.info["on_goal"].tolist(),
        step_index=world.step_index,
    )


def close_env(env_id: str) -> m.CloseResponse:
    REGISTRY.remove(env_id)
    return m.CloseResponse(env_id=env_id, closed=True)


def run_episode_handler(req: m.RunEpisodeRequest) -> m.RunEpisodeResponse:
    cfg = _resolve_config(req.config, req.config_path)
    try:
        policy = make_policy(req.policy)
    except ValueError as exc:
        raise ServiceError(422, "unknown_policy", str(exc)) from exc
    try:
        trace_doc, _ = record_episode(
            cfg,
            policy,
            req.seed,
            include_observations=False,
            policy_key=RngKey.from_seed(req.seed).child("policy"),
        )
    except SimError as exc:
        raise ServiceError(422, "episode_failed", str(exc)) from exc
    return m.RunEpisodeResponse(
        metrics=trace_doc["metrics"],
        policy=req.policy,
        seed=req.seed,
        trace=trace_doc if req.include_trace else None,
    )


def gen_map_handler(req: m.GenMapRequest) -> m.GenMapResponse:
    cfg = _resolve_config(req.config, None)
    try:
        spec, _ = generate(cfg.generator, RngKey.from_seed(req.seed).child("generation"))
    except SimError as exc:
        raise ServiceError(422, "generation_failed", str(exc)) from exc
    return m.GenMapResponse(
        text=serialize_map(spec),
        layout_id=spec.layout_id,
        landmark_count=len(spec.landmarks),
    )


def bench_handler(req: m.BenchRequest) -> m.BenchResponse:
    cfg = _resolve_config(req.config, None)
    try:
        report = run_bench(
            cfg,
            envs=req.envs,
            steps=req.steps,
            seed=req.seed,
            policy=req.policy,
            warmup=req.warmup,
            threads=req.threads,
        )
    except (SimError, ValueError) as exc:
        raise ServiceError(422, "bench_failed", str(exc)) from exc
    return m.BenchResponse(**report.as_dict())


def protocol_handler(req: m.ProtocolRequest) -> m.ProtocolResponse:
    builders = {"easy": easy_tasks, "medium": medium_tasks, "hard": hard_tasks}
    if req.tier not in builders:
        raise ServiceError(422, "unknown_tier", f"tier must be one of {sorted(builders)}")
    try:
        make_policy(req.policy)
    except ValueError as exc:
        raise ServiceError(422, "unknown_policy", str(exc)) from exc
    tasks = builders[req.tier](episodes=req.episodes, seed=req.seed, overrides=req.overrides)
    report = run_protocol(
        req.tier, tasks, lambda: make_policy(req.policy), threads=req.threads
    )
    return m.ProtocolResponse(
        tier=req.tier,
        policy=req.policy,
        records=report.task_rows(),
        agent_sweep=report.agent_count_table() if req.tier == "hard" else [],
    )
