"""Procedural map generators and start/goal placement.

Every generator is a pure function of (config, key): identical inputs give
bit-identical maps and placements. Placement uses uniform rejection sampling
over free cells with a fixed attempt budget; candidates must keep a clearance
of at least their own radius from landmarks and from previously placed
entities of the same kind.
"""

from __future__ import annotations

import math
from collections import deque

import numpy as np

from ..dynamics import DynamicsModel
from ..errors import DegenerateMap, PlacementExhausted
from ..geometry import Circle, Rect, SpatialHash, Vec2, query_neighbors, surface_distance
from ..rng import RngKey
from .parsers import load_bundled_map, parse_movingai, parse_string_grid, _spec_from_grid
from .perlin import perlin_grid
from .types import GeneratorConfig, MapSpec, PlacementSpec, resolve_models

PLACEMENT_ATTEMPTS = 10_000


def _draw_radii(cfg: GeneratorConfig, key: RngKey) -> tuple[list[float], list[float]]:
    gen = key.generator()
    lo, hi = cfg.agent_radius
    if lo == hi:
        agent = [lo] * cfg.num_agents
    else:
        agent = [float(v) for v in gen.uniform(lo, hi, cfg.num_agents)]
    if cfg.goal_radius is None:
        goal = list(agent)
    else:
        glo, ghi = cfg.goal_radius
        if glo == ghi:
            goal = [glo] * cfg.num_agents
        else:
            goal = [float(v) for v in gen.uniform(glo, ghi, cfg.num_agents)]
    return agent, goal


def _free_cell_list(spec: MapSpec, cells: np.ndarray | None) -> np.ndarray:
    if cells is not None and len(cells):
        return cells
    if spec.free_cells is None:
        raise DegenerateMap(f"{spec.layout_id}: no free-space description for placement")
    rows, cols = np.nonzero(spec.free_cells.cells)
    if len(rows) == 0:
        raise DegenerateMap(f"{spec.layout_id}: map has no free cells")
    return np.stack([rows, cols], axis=1)


def _sample_entities(
    spec: MapSpec,
    cells: np.ndarray,
    radii: list[float],
    landmark_hash: SpatialHash,
    key: RngKey,
    entity: str,
) -> list[Vec2]:
    """Place circles one by one: uniform cell, uniform offset inside it, then
    clearance >= own radius against landmarks and earlier placements."""
    gen = key.generator()
    placed: list[Vec2] = []
    cs = spec.cell_size
    for i, radius in enumerate(radii):
        inset = min(radius, 0.5 * cs)
        for _ in range(PLACEMENT_ATTEMPTS):
            row, col = cells[int(gen.integers(0, len(cells)))]
            if cs - 2.0 * inset <= 0:
                x = (col + 0.5) * cs
                y = (row + 0.5) * cs
            else:
                x = col * cs + inset + float(gen.uniform(0.0, cs - 2.0 * inset))
                y = row * cs + inset + float(gen.uniform(0.0, cs - 2.0 * inset))
            candidate = Circle(Vec2(x, y), radius)
            ok = True
            for j in query_neighbors(landmark_hash, candidate, radius):
                if surface_distance(candidate, landmark_hash.body(j)) < radius:
                    ok = False
                    break
            if ok:
                for prior_pos, prior_r in zip(placed, radii):
                    if surface_distance(candidate, Circle(prior_pos, prior_r)) < radius:
                        ok = False
                        break
            if ok:
                placed.append(candidate.center)
                break
        else:
            raise PlacementExhausted(f"{entity} {i}", PLACEMENT_ATTEMPTS)
    return placed


def sample_placement(spec: MapSpec, cfg: GeneratorConfig, key: RngKey) -> PlacementSpec:
    agent_radii, goal_radii = _draw_radii(cfg, key.child("radii"))
    hash_cell = max(spec.cell_size, 2.0 * max(agent_radii))
    landmark_hash = SpatialHash.build(spec.landmarks, cell_size=hash_cell)
    starts = _sample_entities(
        spec,
        _free_cell_list(spec, spec.start_cells),
        agent_radii,
        landmark_hash,
        key.child("starts"),
        "agent start",
    )
    goals = _sample_entities(
        spec,
        _free_cell_list(spec, spec.goal_cells),
        goal_radii,
        landmark_hash,
        key.child("goals"),
        "goal",
    )
    return PlacementSpec(
        agent_starts=starts,
        goals=goals,
        agent_radii=agent_radii,
        agent_models=resolve_models(cfg),
        goal_radii=goal_radii,
    )


def gen_random_grid(cfg: GeneratorConfig, key: RngKey) -> tuple[MapSpec, PlacementSpec]:
    """⌊density·H·W⌋ obstacle cells chosen uniformly without replacement."""
    h, w = cfg.height, cfg.width
    count = math.floor(cfg.obstacle_density * h * w)
    obstacles = np.zeros(h * w, dtype=bool)
    if count:
        picks = key.child("cells").generator().permutation(h * w)[:count]
        obstacles[picks] = True
    obstacles = obstacles.reshape(h, w)
    spec = _spec_from_grid(
        obstacles,
        cfg,
        layout_id=f"random_grid:{h}x{w}:d{cfg.obstacle_density:g}:{key.state & 0xFFFFFF:06x}",
    )
    return spec, sample_placement(spec, cfg, key.child("placement"))


def _carve_corridor(free: np.ndarray, a: tuple[int, int], b: tuple[int, int]) -> None:
    # L-shaped: horizontal leg first, then vertical.
    r0, c0 = a
    r1, c1 = b
    for c in range(min(c0, c1), max(c0, c1) + 1):
        free[r0, c] = True
    for r in range(min(r0, r1), max(r0, r1) + 1):
        free[r, c1] = True


def gen_maze_grid(cfg: GeneratorConfig, key: RngKey) -> tuple[MapSpec, PlacementSpec]:
    """Rooms joined into a spanning structure, plus probabilistic extras.

    Non-overlapping rectangular rooms are carved out of a solid grid and
    connected with L-shaped corridors: first a nearest-neighbor spanning tree
    (free space is therefore connected at any setting), then each remaining
    room pair is added independently with extra_connection_probability.
    """
    h, w = cfg.height, cfg.width
    if h < 7 or w < 7:
        raise ValueError("maze_grid needs at least a 7x7 grid")
    gen = key.child("rooms").generator()
    free = np.zeros((h, w), dtype=bool)

    target_rooms = max(2, (h * w) // 50)
    rooms: list[tuple[int, int, int, int]] = []  # r, c, rh, rw
    max_side = max(cfg.room_min, min(cfg.room_max, h - 4, w - 4))
    for _ in range(target_rooms * 20):
        if len(rooms) >= target_rooms:
            break
        rh = int(gen.integers(cfg.room_min, max_side + 1))
        rw = int(gen.integers(cfg.room_min, max_side + 1))
        r = int(gen.integers(1, h - rh))
        c = int(gen.integers(1, w - rw))
        if any(
            r < r2 + h2 + 1 and r2 < r + rh + 1 and c < c2 + w2 + 1 and c2 < c + rw + 1
            for r2, c2, h2, w2 in rooms
        ):
            continue
        rooms.append((r, c, rh, rw))
        free[r : r + rh, c : c + rw] = True
    if not rooms:
        r, c = (h - 3) // 2, (w - 3) // 2
        rooms.append((r, c, 3, 3))
        free[r : r + 3, c : c + 3] = True

    centers = [(r + rh // 2, c + rw // 2) for r, c, rh, rw in rooms]
    connected = {0}
    tree_edges: set[tuple[int, int]] = set()
    while len(connected) < len(rooms):
        best = None
        for i in sorted(connected):
            ri, ci = centers[i]
            for j in range(len(rooms)):
                if j in connected:
                    continue
                d = abs(centers[j][0] - ri) + abs(centers[j][1] - ci)
                if best is None or (d, i, j) < best:
                    best = (d, i, j)
        _, i, j = best  # type: ignore[misc]
        _carve_corridor(free, centers[i], centers[j])
        tree_edges.add((min(i, j), max(i, j)))
        connected.add(j)

    extra_gen = key.child("extra").generator()
    for i in range(len(rooms)):
        for j in range(i + 1, len(rooms)):
            u = float(extra_gen.random())
            if (i, j) in tree_edges:
                continue
            if u < cfg.extra_connection_probability:
                _carve_corridor(free, centers[i], centers[j])

    spec = _spec_from_grid(
        ~free,
        cfg,
        layout_id=f"maze_grid:{h}x{w}:p{cfg.extra_connection_probability:g}:{key.state & 0xFFFFFF:06x}",
    )
    return spec, sample_placement(spec, cfg, key.child("placement"))


def largest_free_component(free: np.ndarray) -> np.ndarray:
    """Mask of the largest 4-connected free component (BFS flood fill)."""
    h, w = free.shape
    seen = np.zeros_like(free)
    best_mask = np.zeros_like(free)
    best_size = 0
    for sr, sc in zip(*np.nonzero(free & ~seen)):
        if seen[sr, sc]:
            continue
        mask = np.zeros_like(free)
        queue = deque([(int(sr), int(sc))])
        seen[sr, sc] = True
        mask[sr, sc] = True
        size = 0
        while queue:
            r, c = queue.popleft()
            size += 1
            for dr, dc in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                nr, nc = r + dr, c + dc
                if 0 <= nr < h and 0 <= nc < w and free[nr, nc] and not seen[nr, nc]:
                    seen[nr, nc] = True
                    mask[nr, nc] = True
                    queue.append((nr, nc))
        if size > best_size:
            best_size = size
            best_mask = mask
    return best_mask


def gen_caves(cfg: GeneratorConfig, key: RngKey) -> tuple[MapSpec, PlacementSpec]:
    """Gradient-noise caves: cells above the threshold become obstacles and
    only the largest connected free pocket is used for placement."""
    if not -1.0 <= cfg.noise_threshold <= 1.0:
        raise ValueError("noise_threshold must be in [-1, 1]")
    noise = perlin_grid(key.child("noise"), cfg.height, cfg.width, cfg.noise_scale)
    obstacles = noise > cfg.noise_threshold
    free = ~obstacles
    component = largest_free_component(free)
    if int(component.sum()) < cfg.num_agents * 4:
        raise DegenerateMap(
            f"caves map keeps {int(component.sum())} free cells; "
            f"need at least {cfg.num_agents * 4}"
        )
    spec = _spec_from_grid(
        obstacles,
        cfg,
        layout_id=f"caves:{cfg.height}x{cfg.width}:t{cfg.noise_threshold:g}:{key.state & 0xFFFFFF:06x}",
        free_override=component,
    )
    return spec, sample_placement(spec, cfg, key.child("placement"))


# --- hetero give-way scenario ------------------------------------------------

GIVE_WAY_SMALL_RADIUS = 0.12
GIVE_WAY_LARGE_RADIUS = 0.25
GIVE_WAY_CHAMBER_HALF_WIDTH = 0.18
_WALL_R = 0.1
_WALL_PITCH = 0.15
_CORRIDOR_LEN = 6.0
_CORRIDOR_LO_Y = 0.3   # lower wall centerline
_CORRIDOR_HI_Y = 1.1   # upper wall centerline
_CHAMBER_X = 3.0
_CHAMBER_TOP_Y = 1.9


def _wall_run(x0: float, x1: float, y: float) -> list[Circle]:
    n = max(2, int(round((x1 - x0) / _WALL_PITCH)) + 1)
    xs = np.linspace(x0, x1, n)
    return [Circle(Vec2(float(x), y), _WALL_R) for x in xs]


def _wall_column(y0: float, y1: float, x: float) -> list[Circle]:
    n = max(2, int(round((y1 - y0) / _WALL_PITCH)) + 1)
    ys = np.linspace(y0, y1, n)
    return [Circle(Vec2(x, float(y)), _WALL_R) for y in ys]


def gen_hetero_give_way(cfg: GeneratorConfig) -> tuple[MapSpec, PlacementSpec]:
    """Fixed two-agent corridor with a side chamber only the small agent fits.

    The corridor is wide enough for either agent alone but not two abreast;
    the chamber entrance half-width sits strictly between the two radii, so
    the small agent must pull aside to let the large one pass.
    """
    h = GIVE_WAY_CHAMBER_HALF_WIDTH
    gap_lo = _CHAMBER_X - h - _WALL_R
    gap_hi = _CHAMBER_X + h + _WALL_R
    landmarks: list[Circle] = []
    landmarks.extend(_wall_run(0.0, _CORRIDOR_LEN, _CORRIDOR_LO_Y))
    landmarks.extend(_wall_run(0.0, gap_lo, _CORRIDOR_HI_Y))
    landmarks.extend(_wall_run(gap_hi, _CORRIDOR_LEN, _CORRIDOR_HI_Y))
    # chamber box above the entrance gap
    landmarks.extend(_wall_column(_CORRIDOR_HI_Y, _CHAMBER_TOP_Y, gap_lo))
    landmarks.extend(_wall_column(_CORRIDOR_HI_Y, _CHAMBER_TOP_Y, gap_hi))
    landmarks.extend(_wall_run(gap_lo, gap_hi, _CHAMBER_TOP_Y))

    mid_y = 0.5 * (_CORRIDOR_LO_Y + _CORRIDOR_HI_Y)
    spec = MapSpec(
        landmarks=landmarks,
        bounds=Rect(Vec2(0.0, 0.0), Vec2(_CORRIDOR_LEN, _CHAMBER_TOP_Y + 0.3)),
        cell_size=cfg.cell_size,
        layout_id="hetero_give_way",
        meta={"chamber_center": (_CHAMBER_X, 0.5 * (_CORRIDOR_HI_Y + _CHAMBER_TOP_Y))},
    )
    start_a = Vec2(0.5, mid_y)
    start_b = Vec2(_CORRIDOR_LEN - 0.5, mid_y)
    model = DynamicsModel(cfg.models) if isinstance(cfg.models, str) else DynamicsModel.HOLONOMIC
    placement = PlacementSpec(
        agent_starts=[start_a, start_b],
        goals=[start_b, start_a],
        agent_radii=[GIVE_WAY_SMALL_RADIUS, GIVE_WAY_LARGE_RADIUS],
        agent_models=[model, model],
        goal_radii=[GIVE_WAY_SMALL_RADIUS, GIVE_WAY_LARGE_RADIUS],
    )
    return spec, placement


def gen_batched(
    layouts: list[MapSpec],
    cfg: GeneratorConfig,
    key: RngKey,
    batch_size: int,
) -> list[tuple[MapSpec, PlacementSpec]]:
    """Cycle layouts across slots; placement streams split per slot index so a
    slot's sample never depends on the batch size."""
    if not layouts:
        raise ValueError("gen_batched needs at least one layout")
    out = []
    children = key.split(batch_size)
    for i in range(batch_size):
        spec = layouts[i % len(layouts)]
        out.append((spec, sample_placement(spec, cfg, children[i].child("placement"))))
    return out


def generate(cfg: GeneratorConfig, key: RngKey, slot: int = 0) -> tuple[MapSpec, PlacementSpec]:
    """Dispatch one (map, placement) draw for a batch slot."""
    kind = cfg.kind
    if kind == "random_grid":
        return gen_random_grid(cfg, key)
    if kind == "maze_grid":
        return gen_maze_grid(cfg, key)
    if kind == "caves_cont":
        return gen_caves(cfg, key)
    if kind == "hetero_give_way":
        return gen_hetero_give_way(cfg)
    if kind == "string_grid":
        if cfg.text is None:
            raise ValueError("string_grid requires cfg.text")
        spec = parse_string_grid(cfg.text, cfg)
        return spec, sample_placement(spec, cfg, key.child("placement"))
    if kind == "batched_string_grid":
        if not cfg.texts:
            raise ValueError("batched_string_grid requires cfg.texts")
        text = cfg.texts[slot % len(cfg.texts)]
        spec = parse_string_grid(text, cfg)
        spec.layout_id = f"{spec.layout_id}:slot{slot % len(cfg.texts)}"
        return spec, sample_placement(spec, cfg, key.child("placement"))
    if kind == "movingai":
        text = cfg.map_text if cfg.map_text is not None else load_bundled_map(cfg.map_name or "")
        spec = parse_movingai(text, cfg)
        return spec, sample_placement(spec, cfg, key.child("placement"))
    raise ValueError(f"unknown generator kind {kind!r}")
