"""Request/response models for the HTTP service (and the in-process CLI)."""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid")


class VersionResponse(_Model):
    name: str
    version: str


class CreateEnvRequest(_Model):
    config: dict | None = None
    config_path: str | None = None


class EnvDescription(_Model):
    env_id: str
    batch_size: int
    num_agents: int
    obs_length: int
    action_length: int = 2
    models: list[str]
    episode_budget: int
    step_index: int
    done: bool


class ResetRequest(_Model):
    seeds: list[int] = Field(min_length=1)


class ResetResponse(_Model):
    observations: list[list[list[float]]]  # [B][N][obs_len]


class StepRequest(_Model):
    actions: list[list[list[float]]]  # [B][N][2]
    threads: int = Field(1, ge=1)


class StepResponse(_Model):
    observations: list[list[list[float]]]
    rewards: list[list[float]]
    dones: list[bool]
    collisions: list[list[bool]]
    on_goal: list[list[bool]]
    step_index: int


class CloseResponse(_Model):
    env_id: str
    closed: bool


class RunEpisodeRequest(_Model):
    config: dict | None = None
    config_path: str | None = None
    policy: str = "zero"
    seed: int = 5
    include_trace: bool = False


class RunEpisodeResponse(_Model):
    metrics: dict
    policy: str
    seed: int
    trace: dict | None = None


class GenMapRequest(_Model):
    config: dict | None = None
    seed: int = 5


class GenMapResponse(_Model):
    text: str
    layout_id: str
    landmark_count: int


class BenchRequest(_Model):
    config: dict | None = None
    envs: int = Field(8, ge=1)
    steps: int = Field(50, ge=1)
    seed: int = 5
    policy: str = "zero"
    warmup: int = Field(3, ge=0)
    threads: int = Field(1, ge=1)


class BenchResponse(_Model):
    envs: int
    agents: int
    steps: int
    wall_seconds: float
    sps: float
    agent_steps_per_second: float


class ProtocolRequest(_Model):
    tier: str = "medium"
    policy: str = "zero"
    episodes: int = Field(5, ge=1)
    seed: int = 5
    threads: int = Field(1, ge=1)
    overrides: dict | None = None


class ProtocolResponse(_Model):
    tier: str
    policy: str
    records: list[dict]
    agent_sweep: list[dict]


class ErrorBody(_Model):
    error: str
    detail: str
