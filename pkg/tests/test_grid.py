import itertools
import random

import numpy as np
import pytest

from uavplan.errors import OutOfBoundsError
from uavplan.grid import (CellIndex, GridSpec, Obstacle, build_grid, cell_of, center_of, dilate,
                          is_traversable, polygon_is_simple)

import oracles

SPEC = GridSpec(100, 100, 5)


def test_spec_dimensions():
    s = GridSpec(101, 47, 5)
    assert (s.rows, s.cols) == (10, 21)
    with pytest.raises(ValueError):
        GridSpec(4, 10, 5)
    with pytest.raises(ValueError):
        GridSpec(10, 10, 0)


def test_empty_grid_all_traversable():
    g = build_grid(SPEC, [])
    assert not g.blocked.any()
    assert all(is_traversable(g, (i, j)) for i in range(20) for j in range(20))


def test_disc_matches_sampled_oracle():
    g = build_grid(SPEC, [Obstacle.disc((50, 50), 10)])
    expected = oracles.raster_disc_sampled(100, 100, 5, (50, 50), 10)
    assert np.array_equal(g.blocked, expected)
    # a disc of radius 10 centred on a grid vertex touches a 4x4 block plus edge cells
    assert g.blocked[8:12, 8:12].all()
    assert not is_traversable(g, (9, 9))


@pytest.mark.parametrize("seed", range(6))
def test_random_discs_match_oracle(seed):
    rng = random.Random(seed)
    c = (rng.uniform(10, 60), rng.uniform(10, 60))
    r = rng.uniform(2, 14)
    g = build_grid(GridSpec(70, 70, 5), [Obstacle.disc(c, r)])
    assert np.array_equal(g.blocked, oracles.raster_disc_sampled(70, 70, 5, c, r, samples=20))


@pytest.mark.parametrize("verts", [
    [(12, 12), (40, 15), (30, 44)],
    [(5, 5), (60, 5), (60, 8), (8, 8), (8, 60), (5, 60)],          # thin L
    [(20, 20), (25, 20), (25, 25), (20, 25)],                       # exactly on cell edges
    [(31.2, 2.1), (33.9, 2.4), (32.5, 3.7)],                        # inside one cell
    [(0, 30), (70, 30.5), (70, 31), (0, 31.2)],                     # sliver across the grid
])
def test_polygon_matches_shapely(verts):
    g = build_grid(GridSpec(70, 70, 5), [Obstacle.polygon(verts)])
    assert np.array_equal(g.blocked, oracles.raster_polygon_shapely(70, 70, 5, verts))


def test_random_star_polygons_match_shapely():
    rng = random.Random(17)
    for _ in range(15):
        k = rng.randint(3, 9)
        cx, cy = rng.uniform(15, 55), rng.uniform(15, 55)
        verts = []
        for v in range(k):
            ang = 2 * np.pi * (v + rng.uniform(-0.3, 0.3)) / k
            rad = rng.uniform(3, 15)
            verts.append((cx + rad * np.cos(ang), cy + rad * np.sin(ang)))
        g = build_grid(GridSpec(70, 70, 5), [Obstacle.polygon(verts)])
        assert np.array_equal(g.blocked, oracles.raster_polygon_shapely(70, 70, 5, verts))


def test_polygon_simplicity():
    assert polygon_is_simple([(0, 0), (4, 0), (4, 4), (0, 4)])
    assert not polygon_is_simple([(0, 0), (4, 4), (4, 0), (0, 4)])  # bow tie
    with pytest.raises(ValueError):
        Obstacle.polygon([(0, 0), (4, 4), (4, 0), (0, 4)])
    with pytest.raises(ValueError):
        Obstacle.disc((1, 1), 0)


def test_margin_dilates_single_cell():
    blocked = np.zeros((7, 7), dtype=bool)
    blocked[3, 3] = True
    d = dilate(blocked, 1)
    assert d.sum() == 9
    assert d[2:5, 2:5].all()
    assert dilate(blocked, 2).sum() == 25
    # clipped at the border
    edge = np.zeros((5, 5), dtype=bool)
    edge[0, 0] = True
    assert dilate(edge, 1).sum() == 4


def test_monotone_in_obstacles_and_margin():
    rng = random.Random(2)
    obs = []
    prev = build_grid(SPEC, obs).blocked
    for _ in range(5):
        obs.append(Obstacle.disc((rng.uniform(0, 100), rng.uniform(0, 100)), rng.uniform(3, 12)))
        cur = build_grid(SPEC, obs).blocked
        assert (cur >= prev).all()
        prev = cur
    last = build_grid(SPEC, obs, 0).blocked
    for m in range(1, 4):
        grown = build_grid(SPEC, obs, m).blocked
        assert (grown >= last).all()
        last = grown


@pytest.mark.parametrize("p, expected", [
    ((0, 0), (0, 0)),
    ((4.999, 4.999), (0, 0)),
    ((5, 5), (1, 1)),
    ((12, 7), (1, 2)),
])
def test_cell_of(p, expected):
    assert cell_of(SPEC, p) == CellIndex(*expected)


@pytest.mark.parametrize("p", [(-0.1, 3), (100, 3), (3, 100)])
def test_cell_of_out_of_bounds(p):
    with pytest.raises(OutOfBoundsError):
        cell_of(SPEC, p)


def test_center_of():
    assert center_of(SPEC, (0, 0)) == (2.5, 2.5)
    assert center_of(SPEC, (1, 2)) == (12.5, 7.5)
    with pytest.raises(OutOfBoundsError):
        center_of(SPEC, (20, 0))
    for c in itertools.product(range(SPEC.rows), range(SPEC.cols)):
        assert cell_of(SPEC, center_of(SPEC, c)) == c


def test_out_of_range_is_not_traversable():
    g = build_grid(SPEC, [])
    for c in [(-1, 0), (0, -1), (20, 0), (0, 20)]:
        assert not is_traversable(g, c)


def test_grid_is_read_only():
    g = build_grid(SPEC, [Obstacle.disc((50, 50), 10)])
    with pytest.raises(ValueError):
        g.blocked[0, 0] = True


def test_edge_count_matches_enumeration():
    rng = np.random.default_rng(4)
    blocked = rng.random((9, 11)) < 0.3
    g = build_grid(GridSpec(55, 45, 5), [])
    from uavplan.grid import OccupancyGrid
    g = OccupancyGrid(g.spec, blocked)
    count = 0
    for i in range(9):
        for j in range(11):
            if blocked[i, j]:
                continue
            for di in (-1, 0, 1):
                for dj in (-1, 0, 1):
                    if (di, dj) == (0, 0) or not is_traversable(g, (i + di, j + dj)):
                        continue
                    if di and dj and not (is_traversable(g, (i + di, j)) and is_traversable(g, (i, j + dj))):
                        continue
                    count += 1
    assert g.edge_count == count
    assert g.vertex_count == int((~blocked).sum())
