"""Text map formats: string grids, MovingAI files, canonical serialization."""

from __future__ import annotations

import hashlib
from importlib import resources

import numpy as np

from ..errors import HeaderMismatch, RaggedGrid, UnknownGlyph
from ..geometry import BoolGrid, Rect, Vec2, grid_to_circles
from .types import GeneratorConfig, MapSpec

# MovingAI glyph table ('S' swamp and 'W' water are treated as blocked:
# the simulator has no terrain costs).
_MOVINGAI_FREE = frozenset(".G")
_MOVINGAI_BLOCKED = frozenset("@OTSW")

_STRING_FREE = "."
_STRING_OBSTACLE = "#"
_STRING_START = "a"
_STRING_GOAL = "g"


def _grid_digest(cells: np.ndarray) -> str:
    return hashlib.blake2b(np.packbits(cells).tobytes(), digest_size=6).hexdigest()


def _spec_from_grid(
    obstacles: np.ndarray,
    cfg: GeneratorConfig,
    layout_id: str,
    start_cells: np.ndarray | None = None,
    goal_cells: np.ndarray | None = None,
    free_override: np.ndarray | None = None,
) -> MapSpec:
    grid = BoolGrid(obstacles)
    landmarks = grid_to_circles(grid, cfg.cell_size, cfg.granularity)
    h, w = obstacles.shape
    free = ~obstacles if free_override is None else free_override
    return MapSpec(
        landmarks=landmarks,
        bounds=Rect(Vec2(0.0, 0.0), Vec2(w * cfg.cell_size, h * cfg.cell_size)),
        cell_size=cfg.cell_size,
        layout_id=layout_id,
        free_cells=BoolGrid(free),
        start_cells=start_cells,
        goal_cells=goal_cells,
    )


def parse_string_grid(text: str, cfg: GeneratorConfig) -> MapSpec:
    """Layout from a glyph picture: '.' free, '#' obstacle, 'a'/'g' optional
    allowed start/goal cells (free). All rows must be the same length."""
    lines = [ln for ln in text.splitlines() if ln.strip() != ""]
    if not lines:
        raise RaggedGrid(1, 1, 0)
    width = len(lines[0])
    obstacles = np.zeros((len(lines), width), dtype=bool)
    starts: list[tuple[int, int]] = []
    goals: list[tuple[int, int]] = []
    for r, line in enumerate(lines):
        if len(line) != width:
            raise RaggedGrid(r + 1, width, len(line))
        for c, glyph in enumerate(line):
            if glyph == _STRING_OBSTACLE:
                obstacles[r, c] = True
            elif glyph == _STRING_START:
                starts.append((r, c))
            elif glyph == _STRING_GOAL:
                goals.append((r, c))
            elif glyph != _STRING_FREE:
                raise UnknownGlyph(glyph, r + 1, c + 1)
    return _spec_from_grid(
        obstacles,
        cfg,
        layout_id=f"string_grid:{_grid_digest(obstacles)}",
        start_cells=np.array(starts, dtype=np.int64) if starts else None,
        goal_cells=np.array(goals, dtype=np.int64) if goals else None,
    )


def parse_movingai(text: str, cfg: GeneratorConfig) -> MapSpec:
    """MovingAI .map file: four header lines then height rows of width glyphs."""
    lines = text.splitlines()
    stripped = [ln.rstrip("\r") for ln in lines]
    if len(stripped) < 4:
        raise HeaderMismatch("file too short for a MovingAI header")
    if not stripped[0].startswith("type"):
        raise HeaderMismatch(f"expected 'type' header, got {stripped[0]!r}")
    try:
        height = int(stripped[1].split()[1])
        width = int(stripped[2].split()[1])
    except (IndexError, ValueError) as exc:
        raise HeaderMismatch("malformed height/width header") from exc
    if stripped[1].split()[0] != "height" or stripped[2].split()[0] != "width":
        raise HeaderMismatch("header must list height then width")
    if stripped[3].strip() != "map":
        raise HeaderMismatch(f"expected 'map' header, got {stripped[3]!r}")
    rows = [ln for ln in stripped[4:] if ln != ""]
    if len(rows) != height:
        raise HeaderMismatch(f"header says height {height}, found {len(rows)} rows")
    obstacles = np.zeros((height, width), dtype=bool)
    for r, row in enumerate(rows):
        if len(row) != width:
            raise HeaderMismatch(f"row {r + 1} has {len(row)} glyphs, header says {width}")
        for c, glyph in enumerate(row):
            if glyph in _MOVINGAI_BLOCKED:
                obstacles[r, c] = True
            elif glyph not in _MOVINGAI_FREE:
                raise UnknownGlyph(glyph, r + 5, c + 1)
    return _spec_from_grid(obstacles, cfg, layout_id=f"movingai:{_grid_digest(obstacles)}")


def bundled_map_names() -> list[str]:
    """Names of the street-style MovingAI assets shipped with the package."""
    root = resources.files("swarmpath") / "assets"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".map"))


def load_bundled_map(name: str) -> str:
    path = resources.files("swarmpath") / "assets" / name
    return path.read_text()


def serialize_map(spec: MapSpec) -> str:
    """Canonical text form: glyph grid when the map is grid-derived, plus the
    landmark circle list (full float precision) so any map round-trips."""
    out = ["swarmpath-map v1"]
    out.append(f"layout {spec.layout_id}")
    out.append(
        "bounds "
        f"{spec.bounds.lo.x!r} {spec.bounds.lo.y!r} {spec.bounds.hi.x!r} {spec.bounds.hi.y!r}"
    )
    out.append(f"cell_size {spec.cell_size!r}")
    if spec.free_cells is not None:
        free = spec.free_cells.cells
        out.append(f"grid {free.shape[0]} {free.shape[1]}")
        for row in free:
            out.append("".join("." if v else "#" for v in row))
    out.append(f"landmarks {len(spec.landmarks)}")
    for c in spec.landmarks:
        out.append(f"{c.center.x!r} {c.center.y!r} {c.radius!r}")
    return "\n".join(out) + "\n"
