"""Circle primitives, distance queries, spatial hashing, grid discretization.

Everything physical in the simulator is a circle. Bodies carry a single global
index space: agents first (0..N-1), then landmarks — fixed ordering is what
makes force accumulation and neighbor queries deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np


class Vec2(NamedTuple):
    x: float
    y: float

    def __add__(self, other):  # type: ignore[override]
        return Vec2(self.x + other[0], self.y + other[1])

    def __sub__(self, other):
        return Vec2(self.x - other[0], self.y - other[1])

    def scaled(self, s: float) -> "Vec2":
        return Vec2(self.x * s, self.y * s)

    def norm(self) -> float:
        # sqrt(x*x + y*y) everywhere; hypot is avoided so scalar and array
        # paths round identically.
        return math.sqrt(self.x * self.x + self.y * self.y)


class Circle(NamedTuple):
    center: Vec2
    radius: float


class Rect(NamedTuple):
    """Axis-aligned rectangle (lo inclusive, hi exclusive for sampling)."""

    lo: Vec2
    hi: Vec2

    @property
    def width(self) -> float:
        return self.hi.x - self.lo.x

    @property
    def height(self) -> float:
        return self.hi.y - self.lo.y

    def diagonal(self) -> float:
        return math.sqrt(self.width * self.width + self.height * self.height)


@dataclass
class BoolGrid:
    """Row-major occupancy grid; True marks an obstacle cell."""

    cells: np.ndarray  # bool, shape (height, width)

    def __post_init__(self):
        self.cells = np.asarray(self.cells, dtype=bool)
        if self.cells.ndim != 2:
            raise ValueError("BoolGrid cells must be 2-D")

    @property
    def height(self) -> int:
        return int(self.cells.shape[0])

    @property
    def width(self) -> int:
        return int(self.cells.shape[1])

    def obstacle_count(self) -> int:
        return int(self.cells.sum())


def surface_distance(a: Circle, b: Circle) -> float:
    """Distance between circle surfaces; negative iff the discs overlap."""
    dx = b.center.x - a.center.x
    dy = b.center.y - a.center.y
    return math.sqrt(dx * dx + dy * dy) - a.radius - b.radius


def segment_circle_clearance(p0: Vec2, p1: Vec2, c: Circle) -> float:
    """Minimum distance from segment [p0, p1] to the circle surface.

    Negative when the segment enters the disc. A degenerate segment (p0 == p1)
    is treated as a point.
    """
    ex = p1.x - p0.x
    ey = p1.y - p0.y
    rx = c.center.x - p0.x
    ry = c.center.y - p0.y
    ee = ex * ex + ey * ey
    if ee == 0.0:
        t = 0.0
    else:
        t = (rx * ex + ry * ey) / ee
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
    qx = rx - t * ex
    qy = ry - t * ey
    return math.sqrt(qx * qx + qy * qy) - c.radius


def grid_to_circles(grid: BoolGrid, cell_size: float, granularity: int = 1) -> list[Circle]:
    """Tile every obstacle cell with granularity² inscribed circles.

    Circle bounding boxes tile the cell exactly, so radius is
    cell_size / (2 * granularity). Output order is row-major by cell, then
    row-major by sub-circle — callers rely on this for reproducible body
    indexing.
    """
    if granularity < 1:
        raise ValueError("granularity must be >= 1")
    g = granularity
    r = cell_size / (2.0 * g)
    sub = cell_size / g
    out: list[Circle] = []
    rows, cols = np.nonzero(grid.cells)
    for row, col in zip(rows.tolist(), cols.tolist()):
        x0 = col * cell_size
        y0 = row * cell_size
        for sy in range(g):
            cy = y0 + (sy + 0.5) * sub
            for sx in range(g):
                out.append(Circle(Vec2(x0 + (sx + 0.5) * sub, cy), r))
    return out


def _cell_range(lo: float, hi: float, cell_size: float) -> range:
    return range(math.floor(lo / cell_size), math.floor(hi / cell_size) + 1)


def _circle_overlaps_cell(c: Circle, ix: int, iy: int, cell_size: float) -> bool:
    # Clamp the center to the cell rectangle; the circle overlaps the cell
    # iff the clamped point is within the radius.
    cx = min(max(c.center.x, ix * cell_size), (ix + 1) * cell_size)
    cy = min(max(c.center.y, iy * cell_size), (iy + 1) * cell_size)
    dx = c.center.x - cx
    dy = c.center.y - cy
    return dx * dx + dy * dy <= c.radius * c.radius


@dataclass
class SpatialHash:
    """Broad-phase index over circles keyed by integer grid cells.

    Each body is registered in exactly the cells its circle overlaps. Bucket
    lists stay sorted by body index because insertion happens in index order;
    queries return sorted, de-duplicated indices.
    """

    cell_size: float
    buckets: dict[tuple[int, int], list[int]] = field(default_factory=dict)
    _bodies: list[Circle] = field(default_factory=list)

    @classmethod
    def build(cls, bodies: Iterable[Circle], cell_size: float) -> "SpatialHash":
        h = cls(cell_size=cell_size)
        for body in bodies:
            h.insert(body)
        return h

    def insert(self, body: Circle) -> int:
        index = len(self._bodies)
        self._bodies.append(body)
        s = self.cell_size
        for iy in _cell_range(body.center.y - body.radius, body.center.y + body.radius, s):
            for ix in _cell_range(body.center.x - body.radius, body.center.x + body.radius, s):
                if _circle_overlaps_cell(body, ix, iy, s):
                    self.buckets.setdefault((ix, iy), []).append(index)
        return index

    def body(self, index: int) -> Circle:
        return self._bodies[index]

    def __len__(self) -> int:
        return len(self._bodies)


def query_neighbors(hash: SpatialHash, c: Circle, range_: float) -> list[int]:
    """Indices of every body that may come within `range_` surface distance.

    Superset guarantee: a body whose surface distance to `c` is below `range_`
    intersects the disc of radius c.radius + range_ around c's center, and two
    intersecting circles always share at least one overlapped cell.
    """
    probe = Circle(c.center, c.radius + range_)
    s = hash.cell_size
    found: set[int] = set()
    for iy in _cell_range(probe.center.y - probe.radius, probe.center.y + probe.radius, s):
        for ix in _cell_range(probe.center.x - probe.radius, probe.center.x + probe.radius, s):
            if not _circle_overlaps_cell(probe, ix, iy, s):
                continue
            bucket = hash.buckets.get((ix, iy))
            if bucket:
                found.update(bucket)
    return sorted(found)
