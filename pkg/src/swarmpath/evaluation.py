"""Three-tier evaluation harness and robust statistics.

Tasks run episodes through a policy hook; per-task metrics are aggregated by
the interquartile mean with percentile-bootstrap confidence intervals, and a
protocol report adds normalized-score matrices, performance profiles, the
optimality gap, and probability-of-improvement comparisons between reports.

Tier shapes: Easy evaluates on the training variants themselves, Medium spans
all 12 benchmark variants (six random-grid densities x agent counts and six
maze connection probabilities x agent counts), Hard sweeps agent counts on
held-out street maps and reports each metric against the agent count.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Literal, Sequence

import numpy as np

from .config import parse_config
from .environment import EnvConfig, reset, step
from .errors import EmptyInput
from .maps import GeneratorConfig, bundled_map_names
from .policies import PolicyHook
from .rewards import EpisodeMetrics, EpisodeTrace, finalize_metrics
from .rng import RngKey

Tier = Literal["easy", "medium", "hard"]

METRICS = ("sr", "ft", "ms", "co")


# --- robust statistics -------------------------------------------------------

def iqm(values: Sequence[float]) -> float:
    """Interquartile mean: mean of the middle 50% (trim count floors per
    side); plain mean below four samples."""
    vals = sorted(float(v) for v in values)
    if not vals:
        raise EmptyInput("iqm of an empty sample")
    n = len(vals)
    if n < 4:
        return sum(vals) / n
    trim = n // 4
    kept = vals[trim : n - trim]
    return sum(kept) / len(kept)


def bootstrap_ci(
    values: Sequence[float],
    resamples: int = 1000,
    level: float = 0.95,
    statistic: Callable[[Sequence[float]], float] = iqm,
    key: RngKey | None = None,
) -> tuple[float, float]:
    """Percentile bootstrap interval for `statistic` (default IQM)."""
    vals = np.asarray(list(values), dtype=np.float64)
    if vals.size == 0:
        raise EmptyInput("bootstrap over an empty sample")
    gen = (key or RngKey.from_seed(0)).generator()
    idx = gen.integers(0, vals.size, size=(resamples, vals.size))
    stats = np.array([statistic(vals[row]) for row in idx])
    alpha = (1.0 - level) / 2.0
    lo = float(np.percentile(stats, 100.0 * alpha))
    hi = float(np.percentile(stats, 100.0 * (1.0 - alpha)))
    return lo, hi


def performance_profile(scores: Sequence[float], taus: Sequence[float]) -> list[float]:
    """Fraction of scores strictly above each threshold (non-increasing)."""
    arr = np.asarray(list(scores), dtype=np.float64)
    if arr.size == 0:
        return [0.0 for _ in taus]
    return [float(np.mean(arr > tau)) for tau in taus]


def optimality_gap(normalized_scores: Sequence[float]) -> float:
    """Mean shortfall from the perfect normalized score of 1."""
    arr = np.asarray(list(normalized_scores), dtype=np.float64)
    if arr.size == 0:
        return 0.0
    return float(np.mean(np.maximum(0.0, 1.0 - arr)))


def prob_improvement(x: Sequence[float], y: Sequence[float]) -> float:
    """Mann-Whitney probability that a draw from x beats one from y (ties
    split evenly)."""
    xs = np.asarray(list(x), dtype=np.float64)
    ys = np.asarray(list(y), dtype=np.float64)
    if xs.size == 0 or ys.size == 0:
        raise EmptyInput("prob_improvement needs non-empty samples")
    wins = (xs[:, None] > ys[None, :]).sum()
    ties = (xs[:, None] == ys[None, :]).sum()
    return float((wins + 0.5 * ties) / (xs.size * ys.size))


def normalized_score(metric: str, value: float, budget: int) -> float:
    """Map a metric to higher-is-better [0, 1]: SR and CO are already rates;
    FT and MS are step counts rescaled against the episode budget."""
    if metric in ("sr", "co"):
        return float(value)
    return 1.0 - float(value) / budget


# --- tasks and episodes ------------------------------------------------------

@dataclass(frozen=True)
class TaskSpec:
    name: str
    config: EnvConfig
    tier: Tier = "easy"
    episodes: int = 10
    seed: int = 5

    def __post_init__(self):
        if self.episodes < 1:
            raise ValueError("episodes must be >= 1")


def run_episode(task: TaskSpec, policy: PolicyHook, episode_index: int) -> EpisodeMetrics:
    """One full episode: reset with the split per-episode seed, drive the
    policy for T steps, fold the trace into metrics."""
    task_key = RngKey.from_seed(task.seed)
    ep_key = task_key.at(episode_index)
    env_seed = ep_key.state % (2**63)
    state, obs = reset(task.config, env_seed)
    policy.begin_episode(state, ep_key.child("policy"))

    trace = EpisodeTrace(
        num_agents=state.num_agents,
        budget=task.config.episode_budget,
        initial_positions=[a.position for a in state.agents],
        initial_distances=[float(d) for d in state.goal_dist[0]],
    )
    while not state.done:
        actions = policy.act(obs, state)
        state, result = step(state, actions)
        obs = result.observations
        trace.append(
            [a.position for a in state.agents],
            state.goal_dist[0],
            result.info["on_goal"],
            result.info["collisions"],
        )
    return finalize_metrics(trace)


@dataclass
class TaskResult:
    task: TaskSpec
    metrics: list[EpisodeMetrics]
    error: str | None = None

    def metric_values(self, metric: str) -> list[float]:
        return [float(m.as_dict()[metric]) for m in self.metrics]


@dataclass
class ProtocolReport:
    tier: Tier
    results: list[TaskResult]
    policy_name: str
    ci_resamples: int = 1000

    def task_rows(self) -> list[dict]:
        """One record per task-metric: iqm plus bootstrap CI bounds."""
        rows = []
        for res in self.results:
            if res.error is not None:
                rows.append(
                    {
                        "task": res.task.name,
                        "tier": self.tier,
                        "policy": self.policy_name,
                        "error": res.error,
                    }
                )
                continue
            for metric in METRICS:
                values = res.metric_values(metric)
                point = iqm(values)
                lo, hi = bootstrap_ci(
                    values,
                    resamples=self.ci_resamples,
                    key=RngKey.from_seed(res.task.seed).child(f"ci/{metric}"),
                )
                rows.append(
                    {
                        "task": res.task.name,
                        "tier": self.tier,
                        "policy": self.policy_name,
                        "metric": metric,
                        "iqm": point,
                        "ci_lo": min(lo, point),
                        "ci_hi": max(hi, point),
                        "episodes": len(res.metrics),
                        "seed": res.task.seed,
                    }
                )
        return rows

    def normalized_matrix(self, metric: str) -> np.ndarray:
        """(tasks, episodes) normalized scores for one metric."""
        rows = []
        for res in self.results:
            if res.error is not None:
                continue
            budget = res.task.config.episode_budget
            rows.append(
                [normalized_score(metric, v, budget) for v in res.metric_values(metric)]
            )
        if not rows:
            return np.zeros((0, 0))
        width = min(len(r) for r in rows)
        return np.asarray([r[:width] for r in rows], dtype=np.float64)

    def profile(self, metric: str, taus: Sequence[float]) -> list[float]:
        return performance_profile(self.normalized_matrix(metric).ravel(), taus)

    def gap(self, metric: str) -> float:
        return optimality_gap(self.normalized_matrix(metric).ravel())

    def agent_count_table(self) -> list[dict]:
        """Hard-tier sweep: metric aggregates per (map, agent count)."""
        rows = []
        for res in self.results:
            if res.error is not None:
                continue
            row = {
                "task": res.task.name,
                "map": res.task.config.generator.map_name or res.task.config.generator.kind,
                "num_agents": res.task.config.generator.num_agents,
            }
            for metric in METRICS:
                row[metric] = iqm(res.metric_values(metric))
            rows.append(row)
        return rows

    def sweep_csv(self) -> str:
        rows = self.agent_count_table()
        buf = io.StringIO()
        writer = csv.DictWriter(
            buf, fieldnames=["task", "map", "num_agents", *METRICS], lineterminator="\n"
        )
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue()


def run_task(
    task: TaskSpec, policy_factory: Callable[[], PolicyHook], threads: int = 1
) -> TaskResult:
    """All episodes of one task; episodes may run on a thread pool but results
    are folded in episode order."""
    def one(i: int) -> EpisodeMetrics:
        return run_episode(task, policy_factory(), i)

    try:
        if threads <= 1:
            metrics = [one(i) for i in range(task.episodes)]
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                metrics = list(pool.map(one, range(task.episodes)))
        return TaskResult(task=task, metrics=metrics)
    except Exception as exc:  # recorded, run continues with other tasks
        return TaskResult(task=task, metrics=[], error=f"{type(exc).__name__}: {exc}")


def run_protocol(
    tier: Tier,
    tasks: Sequence[TaskSpec],
    policy_factory: Callable[[], PolicyHook],
    threads: int = 1,
) -> ProtocolReport:
    results = [run_task(task, policy_factory, threads=threads) for task in tasks]
    name = policy_factory().name
    return ProtocolReport(tier=tier, results=results, policy_name=name)


def compare_reports(a: ProtocolReport, b: ProtocolReport) -> dict[str, float]:
    """Probability of improvement of report a over report b per metric."""
    out = {}
    for metric in METRICS:
        xa = a.normalized_matrix(metric).ravel()
        xb = b.normalized_matrix(metric).ravel()
        if xa.size and xb.size:
            out[metric] = prob_improvement(xa, xb)
    return out


# --- tier task builders ------------------------------------------------------

RANDOM_GRID_DENSITIES = (0.0, 0.05, 0.15)
MAZE_CONNECTION_PROBABILITIES = (0.4, 0.65, 1.0)
BENCHMARK_AGENT_COUNTS = (8, 32)
HARD_AGENT_COUNTS = (4, 8, 16)


def _base_config(overrides: dict | None = None) -> dict:
    return dict(overrides or {})


def medium_tasks(episodes: int = 10, seed: int = 5, overrides: dict | None = None) -> list[TaskSpec]:
    """The 12 benchmark variants: 3 densities x {8,32} agents on random grids
    plus 3 connection probabilities x {8,32} agents on mazes."""
    tasks = []
    for agents in BENCHMARK_AGENT_COUNTS:
        for density in RANDOM_GRID_DENSITIES:
            raw = _base_config(overrides)
            raw["generator"] = {
                "kind": "random_grid",
                "num_agents": agents,
                "obstacle_density": density,
                **raw.get("generator", {}),
            }
            tasks.append(
                TaskSpec(
                    name=f"rg-d{density:g}-a{agents}",
                    config=parse_config(raw),
                    tier="medium",
                    episodes=episodes,
                    seed=seed,
                )
            )
        for prob in MAZE_CONNECTION_PROBABILITIES:
            raw = _base_config(overrides)
            raw["generator"] = {
                "kind": "maze_grid",
                "num_agents": agents,
                "extra_connection_probability": prob,
                **raw.get("generator", {}),
            }
            tasks.append(
                TaskSpec(
                    name=f"maze-p{prob:g}-a{agents}",
                    config=parse_config(raw),
                    tier="medium",
                    episodes=episodes,
                    seed=seed,
                )
            )
    return tasks


def easy_tasks(episodes: int = 10, seed: int = 5, overrides: dict | None = None) -> list[TaskSpec]:
    """Easy tier reuses the benchmark variants verbatim: train and eval share
    every map parameter, only start/goal seeds move."""
    return [replace(t, tier="easy") for t in medium_tasks(episodes, seed, overrides)]


def hard_tasks(
    episodes: int = 10,
    seed: int = 5,
    agent_counts: Sequence[int] = HARD_AGENT_COUNTS,
    overrides: dict | None = None,
) -> list[TaskSpec]:
    """Held-out street maps crossed with an agent-count sweep."""
    tasks = []
    for map_name in bundled_map_names():
        for agents in agent_counts:
            raw = _base_config(overrides)
            raw["generator"] = {
                "kind": "movingai",
                "map_name": map_name,
                "num_agents": agents,
                **raw.get("generator", {}),
            }
            tasks.append(
                TaskSpec(
                    name=f"{map_name.removesuffix('.map')}-a{agents}",
                    config=parse_config(raw),
                    tier="hard",
                    episodes=episodes,
                    seed=seed,
                )
            )
    return tasks


def ingest_sample_efficiency(series: Sequence[tuple[float, float]]) -> list[dict]:
    """Accept externally produced (training step, metric) pairs — training
    itself is out of scope here — in the shape the chart renderer consumes."""
    return [{"step": float(s), "value": float(v)} for s, v in series]
