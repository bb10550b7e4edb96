"""Map and placement data types shared by generators and the environment."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from ..dynamics import DynamicsModel
from ..geometry import BoolGrid, Circle, Rect, Vec2

GeneratorKind = Literal[
    "random_grid",
    "maze_grid",
    "caves_cont",
    "string_grid",
    "batched_string_grid",
    "movingai",
    "hetero_give_way",
]


@dataclass
class MapSpec:
    """Static obstacle set plus the free-space bookkeeping placement needs."""

    landmarks: list[Circle]
    bounds: Rect
    cell_size: float
    layout_id: str
    free_cells: BoolGrid | None = None          # True = free (grid maps only)
    start_cells: np.ndarray | None = None       # (K, 2) row/col pairs, else all free
    goal_cells: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def landmark_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        if not self.landmarks:
            return np.zeros((0, 2), dtype=np.float64), np.zeros(0, dtype=np.float64)
        pos = np.array([(c.center.x, c.center.y) for c in self.landmarks], dtype=np.float64)
        rad = np.array([c.radius for c in self.landmarks], dtype=np.float64)
        return pos, rad


@dataclass
class PlacementSpec:
    agent_starts: list[Vec2]
    goals: list[Vec2]
    agent_radii: list[float]
    agent_models: list[DynamicsModel]
    goal_radii: list[float]

    def __post_init__(self):
        n = len(self.agent_starts)
        for name in ("goals", "agent_radii", "agent_models", "goal_radii"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"{name} length must match agent count {n}")


@dataclass(frozen=True)
class GeneratorConfig:
    kind: GeneratorKind = "random_grid"
    height: int = 20
    width: int = 20
    cell_size: float = 1.0
    granularity: int = 1
    obstacle_density: float = 0.15
    extra_connection_probability: float = 1.0
    room_min: int = 3
    room_max: int = 7
    noise_threshold: float = 0.0
    noise_scale: float = 8.0
    num_agents: int = 8
    agent_radius: tuple[float, float] = (0.2, 0.2)
    goal_radius: tuple[float, float] | None = None  # None: mirror agent radii
    models: str | tuple[str, ...] | dict[str, int] = "holonomic"
    text: str | None = None                # string_grid layout
    texts: tuple[str, ...] | None = None   # batched_string_grid layouts
    map_text: str | None = None            # movingai file content
    map_name: str | None = None            # bundled movingai asset name

    def __post_init__(self):
        if not 0.0 <= self.obstacle_density <= 1.0:
            raise ValueError("obstacle_density must be in [0, 1]")
        if not 0.0 <= self.extra_connection_probability <= 1.0:
            raise ValueError("extra_connection_probability must be in [0, 1]")
        if self.num_agents < 1:
            raise ValueError("num_agents must be >= 1")
        if self.granularity < 1:
            raise ValueError("granularity must be >= 1")
        lo, hi = self.agent_radius
        if lo <= 0 or hi < lo:
            raise ValueError("agent_radius range must satisfy 0 < lo <= hi")


def resolve_models(cfg: GeneratorConfig) -> list[DynamicsModel]:
    """Expand the model spec (name, per-agent list, or counts) to one per agent."""
    n = cfg.num_agents
    spec = cfg.models
    if isinstance(spec, str):
        return [DynamicsModel(spec)] * n
    if isinstance(spec, dict):
        out: list[DynamicsModel] = []
        for name in ("holonomic", "diffdrive"):
            out.extend([DynamicsModel(name)] * int(spec.get(name, 0)))
        if len(out) != n:
            raise ValueError(f"model counts sum to {len(out)}, expected {n}")
        return out
    models = [DynamicsModel(m) for m in spec]
    if len(models) != n:
        raise ValueError(f"models list has {len(models)} entries, expected {n}")
    return models
