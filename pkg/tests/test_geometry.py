import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swarmpath.geometry import (
    BoolGrid,
    Circle,
    SpatialHash,
    Vec2,
    grid_to_circles,
    query_neighbors,
    segment_circle_clearance,
    surface_distance,
)

finite = st.floats(min_value=-100, max_value=100, allow_nan=False)
radius = st.floats(min_value=0.01, max_value=10, allow_nan=False)


class TestSurfaceDistance:
    def test_collinear(self):
        assert surface_distance(Circle(Vec2(0, 0), 1), Circle(Vec2(3, 0), 1)) == 1.0

    def test_coincident(self):
        assert surface_distance(Circle(Vec2(0, 0), 1), Circle(Vec2(0, 0), 1)) == -2.0

    def test_hypotenuse(self):
        # independent scalar evaluation: sqrt(3^2 + 4^2) = 5, minus both radii
        got = surface_distance(Circle(Vec2(1, 2), 0.5), Circle(Vec2(4, 6), 0.5))
        assert got == math.sqrt(3 * 3 + 4 * 4) - 1.0
        assert got == 4.0

    @given(ax=finite, ay=finite, bx=finite, by=finite, ra=radius, rb=radius)
    @settings(max_examples=200)
    def test_symmetry_exact(self, ax, ay, bx, by, ra, rb):
        a = Circle(Vec2(ax, ay), ra)
        b = Circle(Vec2(bx, by), rb)
        assert surface_distance(a, b) == surface_distance(b, a)


class TestSegmentCircleClearance:
    def test_perpendicular_above(self):
        got = segment_circle_clearance(Vec2(-1, 1), Vec2(1, 1), Circle(Vec2(0, 0), 0.5))
        assert got == 0.5

    def test_degenerate_point_at_center(self):
        assert segment_circle_clearance(Vec2(0, 0), Vec2(0, 0), Circle(Vec2(0, 0), 1)) == -1.0

    def test_perpendicular_foot(self):
        got = segment_circle_clearance(Vec2(-2, 0), Vec2(2, 0), Circle(Vec2(0, 1), 0.25))
        assert got == 0.75
        # dense-sampling oracle along the segment
        ts = np.linspace(0.0, 1.0, 20001)
        px = -2 + 4 * ts
        dist = np.sqrt(px * px + 1.0) - 0.25
        assert abs(got - dist.min()) < 1e-6

    @given(x=finite, y=finite, cx=finite, cy=finite, r=radius)
    @settings(max_examples=200)
    def test_point_segment_equals_surface_distance(self, x, y, cx, cy, r):
        p = Vec2(x, y)
        c = Circle(Vec2(cx, cy), r)
        assert segment_circle_clearance(p, p, c) == surface_distance(
            Circle(p, 0.0), c
        ) + 0.0  # zero-radius circle

    def test_oblique_segment_vs_dense_sampling(self, rng):
        for _ in range(50):
            p0 = Vec2(*rng.uniform(-5, 5, 2))
            p1 = Vec2(*rng.uniform(-5, 5, 2))
            c = Circle(Vec2(*rng.uniform(-5, 5, 2)), float(rng.uniform(0.1, 2.0)))
            got = segment_circle_clearance(p0, p1, c)
            ts = np.linspace(0.0, 1.0, 4001)
            px = p0.x + (p1.x - p0.x) * ts
            py = p0.y + (p1.y - p0.y) * ts
            dist = np.sqrt((px - c.center.x) ** 2 + (py - c.center.y) ** 2) - c.radius
            assert got <= dist.min() + 1e-12
            assert abs(got - dist.min()) < 1e-5


class TestGridToCircles:
    def test_single_cell(self):
        grid = BoolGrid(np.ones((1, 1), dtype=bool))
        circles = grid_to_circles(grid, cell_size=1.0, granularity=1)
        assert circles == [Circle(Vec2(0.5, 0.5), 0.5)]

    def test_granularity_two_tiling(self):
        grid = BoolGrid(np.ones((1, 1), dtype=bool))
        circles = grid_to_circles(grid, cell_size=1.0, granularity=2)
        assert [c.radius for c in circles] == [0.25] * 4
        assert [c.center for c in circles] == [
            Vec2(0.25, 0.25),
            Vec2(0.75, 0.25),
            Vec2(0.25, 0.75),
            Vec2(0.75, 0.75),
        ]

    def test_count_density_grid(self, rng):
        cells = np.zeros(400, dtype=bool)
        cells[rng.permutation(400)[:120]] = True
        grid = BoolGrid(cells.reshape(20, 20))
        assert len(grid_to_circles(grid, 1.0, 1)) == 120

    @given(g=st.integers(min_value=1, max_value=4))
    @settings(max_examples=20)
    def test_count_is_granularity_squared_times_cells(self, g):
        gen = np.random.default_rng(g)
        cells = gen.random((6, 7)) < 0.4
        grid = BoolGrid(cells)
        assert len(grid_to_circles(grid, 0.7, g)) == g * g * int(cells.sum())

    def test_free_cells_produce_nothing(self):
        grid = BoolGrid(np.zeros((4, 4), dtype=bool))
        assert grid_to_circles(grid, 1.0, 3) == []

    def test_row_major_order(self):
        cells = np.zeros((2, 2), dtype=bool)
        cells[0, 1] = True
        cells[1, 0] = True
        circles = grid_to_circles(BoolGrid(cells), 1.0, 1)
        assert circles[0].center == Vec2(1.5, 0.5)  # row 0 first
        assert circles[1].center == Vec2(0.5, 1.5)


class TestSpatialHash:
    def test_empty_query(self):
        h = SpatialHash(cell_size=0.5)
        assert query_neighbors(h, Circle(Vec2(0, 0), 1), 5.0) == []

    def test_single_body_at_center(self):
        h = SpatialHash.build([Circle(Vec2(1, 1), 0.2)], cell_size=0.5)
        assert query_neighbors(h, Circle(Vec2(1, 1), 0.2), 0.0) == [0]

    def test_buckets_sorted(self, rng):
        bodies = [Circle(Vec2(*rng.uniform(0, 3, 2)), 0.3) for _ in range(40)]
        h = SpatialHash.build(bodies, cell_size=0.5)
        for bucket in h.buckets.values():
            assert bucket == sorted(bucket)

    def test_superset_of_brute_force_many_configs(self):
        # broad-phase must never miss a body within query range
        gen = np.random.default_rng(7)
        for trial in range(1000):
            n = 30 if trial % 10 else 100
            bodies = [
                Circle(Vec2(*gen.uniform(0, 8, 2)), float(gen.uniform(0.05, 0.5)))
                for _ in range(n)
            ]
            h = SpatialHash.build(bodies, cell_size=float(gen.uniform(0.3, 1.5)))
            probe = Circle(Vec2(*gen.uniform(0, 8, 2)), float(gen.uniform(0.05, 0.5)))
            rng_range = float(gen.uniform(0.0, 2.0))
            got = query_neighbors(h, probe, rng_range)
            expected = {
                i
                for i, b in enumerate(bodies)
                if surface_distance(probe, b) < rng_range
            }
            assert expected.issubset(got)
            assert got == sorted(got)

    def test_deterministic(self, rng):
        bodies = [Circle(Vec2(*rng.uniform(0, 5, 2)), 0.2) for _ in range(50)]
        h1 = SpatialHash.build(bodies, 0.5)
        h2 = SpatialHash.build(bodies, 0.5)
        probe = Circle(Vec2(2.5, 2.5), 0.3)
        assert query_neighbors(h1, probe, 1.0) == query_neighbors(h2, probe, 1.0)


def test_boolgrid_validation():
    with pytest.raises(ValueError):
        BoolGrid(np.zeros(4, dtype=bool))
