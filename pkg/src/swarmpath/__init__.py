"""swarmpath: batched continuous-space multi-agent pathfinding simulator.

Circle-world physics with softplus contact forces, holonomic and
differential-drive agents, penetration-vector observations, procedural map
generators, RRT/RRT* planner baselines with PD tracking, and a three-tier
evaluation harness with robust statistics. Everything is deterministic given
a seed — across runs, batch sizes, and thread counts.
"""

__version__ = "0.1.0"

from .dynamics import (
    AgentKinematics,
    ContactParams,
    DiffDriveParams,
    DynamicsModel,
    HolonomicParams,
    SimParams,
    accumulate_forces,
    collision_force,
    step_diffdrive,
    step_holonomic,
    substep,
)
from .environment import (
    BatchedWorld,
    EnvConfig,
    StepResult,
    WorldState,
    batch_reset,
    batch_step,
    reset,
    step,
)
from .geometry import (
    BoolGrid,
    Circle,
    Rect,
    SpatialHash,
    Vec2,
    grid_to_circles,
    query_neighbors,
    segment_circle_clearance,
    surface_distance,
)
from .observation import ObservationVector, ObsParams, goal_direction, observe, penetration_vector
from .rewards import EpisodeMetrics, EpisodeTrace, RewardParams, finalize_metrics, step_rewards
from .rng import RngKey, split

__all__ = [
    "AgentKinematics",
    "BatchedWorld",
    "BoolGrid",
    "Circle",
    "ContactParams",
    "DiffDriveParams",
    "DynamicsModel",
    "EnvConfig",
    "EpisodeMetrics",
    "EpisodeTrace",
    "HolonomicParams",
    "ObsParams",
    "ObservationVector",
    "Rect",
    "RewardParams",
    "RngKey",
    "SimParams",
    "SpatialHash",
    "StepResult",
    "Vec2",
    "WorldState",
    "accumulate_forces",
    "batch_reset",
    "batch_step",
    "collision_force",
    "finalize_metrics",
    "goal_direction",
    "grid_to_circles",
    "observe",
    "penetration_vector",
    "query_neighbors",
    "reset",
    "segment_circle_clearance",
    "split",
    "step",
    "step_diffdrive",
    "step_holonomic",
    "step_rewards",
    "substep",
    "surface_distance",
]
