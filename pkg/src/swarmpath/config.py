"""Environment configuration: schema, validation, file loading.

Configs are nested mappings (YAML on disk, plain dicts inline) validated by
pydantic; every error names the offending dotted key path, e.g.
`generator.kind`. The canonical key names are the field names below.
"""

from __future__ import annotations

from pathlib import Path
from typing import Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .dynamics import ContactParams, DiffDriveParams, HolonomicParams, SimParams
from .environment import EnvConfig
from .errors import ConfigError
from .maps import GeneratorConfig
from .observation import ObsParams
from .rewards import RewardParams


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ContactSchema(_Model):
    f0: float = Field(100.0, ge=0)
    k: float = Field(0.001, gt=0)


class SimSchema(_Model):
    dt: float = Field(0.005, gt=0)
    frameskip: int = Field(20, ge=1)
    contact: ContactSchema = ContactSchema()


class ObsSchema(_Model):
    window: float = Field(0.5, gt=0)
    max_obs: int = Field(8, ge=1)


class RewardSchema(_Model):
    shaping: float = Field(0.1, ge=0)
    goal_radius: float | None = Field(None, gt=0)


class HolonomicSchema(_Model):
    mass: float = Field(1.0, gt=0)
    damping: float = Field(0.25, ge=0, lt=1)
    max_speed: float | None = Field(1.0, gt=0)


class DiffDriveSchema(_Model):
    max_u: float = Field(1.0, gt=0)
    max_w: float = Field(2.0, gt=0)


class GeneratorSchema(_Model):
    kind: Literal[
        "random_grid",
        "maze_grid",
        "caves_cont",
        "string_grid",
        "batched_string_grid",
        "movingai",
        "hetero_give_way",
    ] = "random_grid"
    height: int = Field(20, ge=1)
    width: int = Field(20, ge=1)
    cell_size: float = Field(1.0, gt=0)
    granularity: int = Field(1, ge=1)
    obstacle_density: float = Field(0.15, ge=0, le=1)
    extra_connection_probability: float = Field(1.0, ge=0, le=1)
    room_min: int = Field(3, ge=2)
    room_max: int = Field(7, ge=2)
    noise_threshold: float = Field(0.0, ge=-1, le=1)
    noise_scale: float = Field(8.0, gt=0)
    num_agents: int = Field(8, ge=1)
    agent_radius: float | tuple[float, float] = (0.2, 0.2)
    goal_radius: float | tuple[float, float] | None = None
    models: str | tuple[str, ...] | dict[str, int] = "holonomic"
    text: str | None = None
    texts: tuple[str, ...] | None = None
    map_text: str | None = None
    map_name: str | None = None


class EnvSchema(_Model):
    generator: GeneratorSchema = GeneratorSchema()
    sim: SimSchema = SimSchema()
    obs: ObsSchema = ObsSchema()
    reward: RewardSchema = RewardSchema()
    holonomic: HolonomicSchema = HolonomicSchema()
    diffdrive: DiffDriveSchema = DiffDriveSchema()
    episode_budget: int = Field(160, ge=1)
    batch_size: int = Field(1, ge=1)
    seed: int = 5


def _as_range(value) -> tuple[float, float] | None:
    if value is None:
        return None
    if isinstance(value, (int, float)):
        return (float(value), float(value))
    lo, hi = value
    return (float(lo), float(hi))


def _dotted(loc: tuple) -> str:
    parts = [str(p) for p in loc]
    return ".".join(parts) if parts else "<root>"


def parse_config(raw: dict) -> EnvConfig:
    """Validate a config mapping and build the immutable EnvConfig."""
    try:
        schema = EnvSchema.model_validate(raw or {})
    except ValidationError as exc:
        first = exc.errors()[0]
        raise ConfigError(_dotted(tuple(first["loc"])), first["msg"]) from exc

    g = schema.generator
    try:
        generator = GeneratorConfig(
            kind=g.kind,
            height=g.height,
            width=g.width,
            cell_size=g.cell_size,
            granularity=g.granularity,
            obstacle_density=g.obstacle_density,
            extra_connection_probability=g.extra_connection_probability,
            room_min=g.room_min,
            room_max=g.room_max,
            noise_threshold=g.noise_threshold,
            noise_scale=g.noise_scale,
            num_agents=g.num_agents,
            agent_radius=_as_range(g.agent_radius) or (0.2, 0.2),
            goal_radius=_as_range(g.goal_radius),
            models=g.models,
            text=g.text,
            texts=g.texts,
            map_text=g.map_text,
            map_name=g.map_name,
        )
        return EnvConfig(
            generator=generator,
            sim=SimParams(
                contact=ContactParams(f0=schema.sim.contact.f0, k=schema.sim.contact.k),
                dt=schema.sim.dt,
                frameskip=schema.sim.frameskip,
            ),
            obs=ObsParams(window=schema.obs.window, max_obs=schema.obs.max_obs),
            reward=RewardParams(
                goal_radius=schema.reward.goal_radius, shaping=schema.reward.shaping
            ),
            holonomic=HolonomicParams(
                mass=schema.holonomic.mass,
                damping=schema.holonomic.damping,
                max_speed=schema.holonomic.max_speed,
                dt=schema.sim.dt,
            ),
            diffdrive=DiffDriveParams(
                max_u=schema.diffdrive.max_u,
                max_w=schema.diffdrive.max_w,
                dt=schema.sim.dt,
            ),
            episode_budget=schema.episode_budget,
            batch_size=schema.batch_size,
            seed=schema.seed,
        )
    except ValueError as exc:
        raise ConfigError("<config>", str(exc)) from exc


def load_config(path: str | Path) -> EnvConfig:
    """Read a YAML (or JSON) config file."""
    text = Path(path).read_text()
    raw = yaml.safe_load(text)
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "config file must contain a mapping")
    return parse_config(raw)


def config_to_dict(cfg: EnvConfig) -> dict:
    """Canonical mapping form (round-trips through parse_config)."""
    g = cfg.generator
    out = {
        "generator": {
            "kind": g.kind,
            "height": g.height,
            "width": g.width,
            "cell_size": g.cell_size,
            "granularity": g.granularity,
            "obstacle_density": g.obstacle_density,
            "extra_connection_probability": g.extra_connection_probability,
            "room_min": g.room_min,
            "room_max": g.room_max,
            "noise_threshold": g.noise_threshold,
            "noise_scale": g.noise_scale,
            "num_agents": g.num_agents,
            "agent_radius": list(g.agent_radius),
            "goal_radius": list(g.goal_radius) if g.goal_radius else None,
            "models": g.models if not isinstance(g.models, tuple) else list(g.models),
            "text": g.text,
            "texts": list(g.texts) if g.texts else None,
            "map_text": g.map_text,
            "map_name": g.map_name,
        },
        "sim": {
            "dt": cfg.sim.dt,
            "frameskip": cfg.sim.frameskip,
            "contact": {"f0": cfg.sim.contact.f0, "k": cfg.sim.contact.k},
        },
        "obs": {"window": cfg.obs.window, "max_obs": cfg.obs.max_obs},
        "reward": {"shaping": cfg.reward.shaping, "goal_radius": cfg.reward.goal_radius},
        "holonomic": {
            "mass": cfg.holonomic.mass,
            "damping": cfg.holonomic.damping,
            "max_speed": cfg.holonomic.max_speed,
        },
        "diffdrive": {"max_u": cfg.diffdrive.max_u, "max_w": cfg.diffdrive.max_w},
        "episode_budget": cfg.episode_budget,
        "batch_size": cfg.batch_size,
        "seed": cfg.seed,
    }
    return out
