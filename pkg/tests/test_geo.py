import math
import random

import pytest
from hypothesis import given, strategies as st

from uavplan.errors import InvalidTransformError
from uavplan.geo import (GeoPoint, GeoTransform, PixelPoint, geo_from_pixel, haversine_m,
                         pixel_from_geo, polyline_length_m)

import oracles

T = GeoTransform(10.0, 20.0, 0.001, 0.001)

# haversine with R = 6371008.8 m, evaluated by the atan2 oracle
ONE_DEG_EQUATOR_M = 111195.0802335329


@pytest.mark.parametrize("p, expected", [
    ((0, 0), (10.0, 20.0)),
    ((100, 50), (9.95, 20.1)),
])
def test_geo_from_pixel(p, expected):
    g = geo_from_pixel(T, PixelPoint(*p))
    assert g.lat == pytest.approx(expected[0], abs=1e-12)
    assert g.lon == pytest.approx(expected[1], abs=1e-12)


def test_geo_from_pixel_left_of_origin():
    g = geo_from_pixel(GeoTransform(0, 0, 0.001, 0.001), PixelPoint(-5, 0))
    assert g.lat == 0
    assert g.lon == pytest.approx(-0.005, abs=1e-15)


def test_geo_from_pixel_out_of_bounds():
    with pytest.raises(InvalidTransformError):
        geo_from_pixel(GeoTransform(89.9, 0, 0.001, 0.001), PixelPoint(0, -1000))


@pytest.mark.parametrize("t, g, expected", [
    (T, (10, 20), (0, 0)),
    (T, (9.95, 20.1), (100, 50)),
    (GeoTransform(0, 0, 0.001, 0.001), (0, -0.005), (-5, 0)),
    (GeoTransform(10, 20, 0.002, 0.004), (9.996, 20.02), (10, 1)),
])
def test_pixel_from_geo(t, g, expected):
    p = pixel_from_geo(t, GeoPoint(*g))
    assert p.x == pytest.approx(expected[0], abs=1e-9)
    assert p.y == pytest.approx(expected[1], abs=1e-9)


@pytest.mark.parametrize("bad", [(0.0, 1.0), (1.0, -1.0)])
def test_transform_rejects_nonpositive_scale(bad):
    with pytest.raises(InvalidTransformError):
        GeoTransform(0, 0, *bad)


@given(st.floats(0, 4000), st.floats(0, 4000))
def test_round_trip(x, y):
    t = GeoTransform(37.7, -122.4, 2.8e-5, 2.25e-5)
    p = pixel_from_geo(t, geo_from_pixel(t, PixelPoint(x, y)))
    assert math.hypot(p.x - x, p.y - y) < 1e-6


def test_haversine_values():
    assert haversine_m((0, 0), (0, 0)) == 0
    assert haversine_m((0, 0), (0, 1)) == pytest.approx(ONE_DEG_EQUATOR_M, abs=0.01)


def test_haversine_matches_oracle_and_is_symmetric():
    rng = random.Random(3)
    for _ in range(100):
        a = (rng.uniform(-80, 80), rng.uniform(-179, 179))
        b = (rng.uniform(-80, 80), rng.uniform(-179, 179))
        assert haversine_m(a, b) == haversine_m(b, a)
        assert haversine_m(a, b) == pytest.approx(oracles.haversine(a, b), rel=1e-12, abs=1e-6)


def test_haversine_triangle_inequality():
    rng = random.Random(5)
    for _ in range(200):
        a, b, c = [(rng.uniform(-60, 60), rng.uniform(-170, 170)) for _ in range(3)]
        assert haversine_m(a, c) <= haversine_m(a, b) + haversine_m(b, c) + 1e-6


def test_polyline_length():
    g = GeoPoint(1, 2)
    assert polyline_length_m([g]) == 0
    assert polyline_length_m([(0, 0), (0, 1), (0, 2)]) == pytest.approx(2 * ONE_DEG_EQUATOR_M, abs=0.01)
    with pytest.raises(ValueError):
        polyline_length_m([])


def test_polyline_concatenation_and_reversal():
    rng = random.Random(11)
    pts = [(rng.uniform(40, 41), rng.uniform(-74, -73)) for _ in range(12)]
    p = (40.5, -73.5)
    assert polyline_length_m(pts + [p]) == polyline_length_m(pts) + haversine_m(pts[-1], p)
    assert polyline_length_m(pts[::-1]) == pytest.approx(polyline_length_m(pts), rel=1e-12)
