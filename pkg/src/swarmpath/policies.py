"""Built-in policies for baselines and the evaluation harness.

A policy sees the per-agent observations plus the world state (planner-based
controllers need true kinematics, exactly like the classical baselines they
reproduce). Policies are deterministic given the key handed to begin_episode.
"""

from __future__ import annotations

from typing import Protocol

import numpy as np

from .dynamics import DynamicsModel
from .environment import WorldState
from .errors import InvalidEndpoint, NoPathFound
from .geometry import Vec2
from .planners import (
    GuidanceFeatures,
    Path,
    PdParams,
    PlannerParams,
    default_planner_params,
    pd_follow,
    rrt_plan,
    rrt_star_guidance,
    rrt_star_plan,
)
from .rng import RngKey


class PolicyHook(Protocol):
    """Callable contract the evaluation harness drives."""

    name: str

    def begin_episode(self, world: WorldState, key: RngKey) -> None: ...

    def act(self, observations: np.ndarray, world: WorldState) -> np.ndarray: ...


class ZeroPolicy:
    name = "zero"

    def begin_episode(self, world: WorldState, key: RngKey) -> None:
        pass

    def act(self, observations: np.ndarray, world: WorldState) -> np.ndarray:
        return np.zeros((world.num_agents, 2), dtype=np.float64)


class RandomPolicy:
    """Uniform actions in [-1, 1]^2 from a per-episode stream."""

    name = "random"

    def __init__(self):
        self._gen = None

    def begin_episode(self, world: WorldState, key: RngKey) -> None:
        self._gen = key.child("actions").generator()

    def act(self, observations: np.ndarray, world: WorldState) -> np.ndarray:
        if self._gen is None:
            raise RuntimeError("begin_episode was not called")
        return self._gen.uniform(-1.0, 1.0, size=(world.num_agents, 2))


def _require_holonomic(world: WorldState, name: str) -> None:
    if not all(m is DynamicsModel.HOLONOMIC for m in world.placement.agent_models):
        raise ValueError(f"policy {name!r} drives holonomic agents only")


class PlannerPdPolicy:
    """Plan per agent at episode start, then track the path with PD control.

    Planners ignore other agents; collisions en route are the price of
    independent planning. Agents whose plan fails hold position (pure damping).
    """

    def __init__(self, star: bool, pd: PdParams | None = None,
                 planner: PlannerParams | None = None):
        self.star = star
        self.name = "rrtstar_pd" if star else "rrt_pd"
        self._pd_base = pd
        self._planner_base = planner
        self._paths: list[Path | None] = []
        self._cursors: list[int] = []
        self._pd: list[PdParams] = []

    def begin_episode(self, world: WorldState, key: RngKey) -> None:
        _require_holonomic(world, self.name)
        plan = rrt_star_plan if self.star else rrt_plan
        self._paths = []
        self._cursors = []
        self._pd = []
        keys = key.child("plans").split(world.num_agents)
        placement = world.placement
        for i in range(world.num_agents):
            radius = placement.agent_radii[i]
            params = self._planner_base or default_planner_params(
                world.map_spec, radius, world.goal_radii[i], star=self.star
            )
            pd = self._pd_base or PdParams(waypoint_tolerance=radius)
            try:
                path = plan(
                    world.map_spec,
                    placement.agent_starts[i],
                    placement.goals[i],
                    radius,
                    params,
                    keys[i],
                )
            except (NoPathFound, InvalidEndpoint):
                path = None
            self._paths.append(path)
            self._cursors.append(0)
            self._pd.append(pd)

    def act(self, observations: np.ndarray, world: WorldState) -> np.ndarray:
        actions = np.zeros((world.num_agents, 2), dtype=np.float64)
        agents = world.agents
        for i, agent in enumerate(agents):
            path = self._paths[i]
            if path is None:
                actions[i] = (-self._pd[i].kd * agent.velocity.x,
                              -self._pd[i].kd * agent.velocity.y)
                continue
            force, cursor = pd_follow(
                agent.position, agent.velocity, path, self._cursors[i], self._pd[i]
            )
            self._cursors[i] = cursor
            actions[i] = (force.x, force.y)
        return actions


class GuidedPdPolicy:
    """PD control over the downsampled guidance waypoints instead of the full
    plan — the consumer view of planner features folded into observations."""

    name = "rrtstar_guided_pd"

    def __init__(self, k: int = 4, pd: PdParams | None = None,
                 planner: PlannerParams | None = None):
        self.k = k
        self._pd_base = pd
        self._planner_base = planner
        self._targets: list[Path | None] = []
        self._features: list[GuidanceFeatures] = []
        self._cursors: list[int] = []
        self._pd: list[PdParams] = []

    def begin_episode(self, world: WorldState, key: RngKey) -> None:
        _require_holonomic(world, self.name)
        self._targets = []
        self._features = []
        self._cursors = []
        self._pd = []
        keys = key.child("plans").split(world.num_agents)
        placement = world.placement
        for i in range(world.num_agents):
            radius = placement.agent_radii[i]
            start = placement.agent_starts[i]
            params = self._planner_base or default_planner_params(
                world.map_spec, radius, world.goal_radii[i], star=True
            )
            features = rrt_star_guidance(
                world.map_spec, start, placement.goals[i], radius, self.k, params, keys[i]
            )
            self._features.append(features)
            if all(w.x == 0.0 and w.y == 0.0 for w in features.waypoints) and features.cost_to_go == 1.0:
                self._targets.append(None)
            else:
                absolute = tuple(Vec2(start.x + w.x, start.y + w.y) for w in features.waypoints)
                cost = sum(
                    ((b.x - a.x) ** 2 + (b.y - a.y) ** 2) ** 0.5
                    for a, b in zip((start,) + absolute, absolute)
                )
                self._targets.append(Path(waypoints=absolute, cost=cost))
            self._cursors.append(0)
            self._pd.append(self._pd_base or PdParams(waypoint_tolerance=radius))

    def guidance(self, agent_index: int) -> GuidanceFeatures:
        return self._features[agent_index]

    def act(self, observations: np.ndarray, world: WorldState) -> np.ndarray:
        actions = np.zeros((world.num_agents, 2), dtype=np.float64)
        for i, agent in enumerate(world.agents):
            target = self._targets[i]
            if target is None:
                actions[i] = (-self._pd[i].kd * agent.velocity.x,
                              -self._pd[i].kd * agent.velocity.y)
                continue
            force, cursor = pd_follow(
                agent.position, agent.velocity, target, self._cursors[i], self._pd[i]
            )
            self._cursors[i] = cursor
            actions[i] = (force.x, force.y)
        return actions


def make_policy(name: str) -> PolicyHook:
    if name == "zero":
        return ZeroPolicy()
    if name == "random":
        return RandomPolicy()
    if name == "rrt_pd":
        return PlannerPdPolicy(star=False)
    if name == "rrtstar_pd":
        return PlannerPdPolicy(star=True)
    if name == "rrtstar_guided_pd":
        return GuidedPdPolicy()
    raise ValueError(f"unknown policy {name!r}")


POLICY_NAMES = ("zero", "random", "rrt_pd", "rrtstar_pd", "rrtstar_guided_pd")
