"""Shared test fixtures and scene builders."""

from __future__ import annotations

import numpy as np
import pytest

from swarmpath.dynamics import AgentKinematics, DynamicsModel
from swarmpath.geometry import Circle, SpatialHash, Vec2


def random_agents(gen: np.random.Generator, n: int, span: float = 10.0,
                  r_lo: float = 0.1, r_hi: float = 0.4) -> list[AgentKinematics]:
    out = []
    for _ in range(n):
        out.append(
            AgentKinematics(
                position=Vec2(float(gen.uniform(0, span)), float(gen.uniform(0, span))),
                velocity=Vec2(float(gen.uniform(-1, 1)), float(gen.uniform(-1, 1))),
                radius=float(gen.uniform(r_lo, r_hi)),
                model=DynamicsModel.HOLONOMIC,
            )
        )
    return out


def random_landmarks(gen: np.random.Generator, m: int, span: float = 10.0,
                     r_lo: float = 0.2, r_hi: float = 0.6) -> list[Circle]:
    return [
        Circle(
            Vec2(float(gen.uniform(0, span)), float(gen.uniform(0, span))),
            float(gen.uniform(r_lo, r_hi)),
        )
        for _ in range(m)
    ]


def build_hash(agents, landmarks, cell_size: float = 0.5) -> SpatialHash:
    bodies = [Circle(a.position, a.radius) for a in agents]
    bodies.extend(landmarks)
    return SpatialHash.build(bodies, cell_size=cell_size)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
