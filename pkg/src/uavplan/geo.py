"""Pixel <-> geographic conversion and geodesic lengths.

The georeference is a north-up affine map: pixel x grows east, pixel y
grows south. Distances use the haversine formula on a sphere of mean
Earth radius.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import InvalidTransformError

EARTH_RADIUS_M = 6371008.8
GEO_EPS_DEG = 1e-9


class PixelPoint(NamedTuple):
    x: float
    y: float


class GeoPoint(NamedTuple):
    lat: float
    lon: float

    def close_to(self, other, tol=GEO_EPS_DEG):
        return abs(self.lat - other[0]) <= tol and abs(self.lon - other[1]) <= tol


@dataclass(frozen=True)
class GeoTransform:
    origin_lat: float
    origin_lon: float
    deg_per_px_x: float
    deg_per_px_y: float

    def __post_init__(self):
        if not (self.deg_per_px_x > 0 and self.deg_per_px_y > 0):
            raise InvalidTransformError(
                f"degrees per pixel must be positive, got "
                f"({self.deg_per_px_x}, {self.deg_per_px_y})"
            )
        if not (-90.0 <= self.origin_lat <= 90.0 and -180.0 <= self.origin_lon <= 180.0):
            raise InvalidTransformError(
                f"origin ({self.origin_lat}, {self.origin_lon}) out of lat/lon bounds"
            )


def _check_geo(lat, lon):
    if not (math.isfinite(lat) and math.isfinite(lon)):
        raise InvalidTransformError(f"non-finite geo point ({lat}, {lon})")
    if not (-90.0 <= lat <= 90.0 and -180.0 <= lon <= 180.0):
        raise InvalidTransformError(f"geo point ({lat}, {lon}) out of lat/lon bounds")


def geo_from_pixel(t: GeoTransform, p) -> GeoPoint:
    lat = t.origin_lat - p[1] * t.deg_per_px_y
    lon = t.origin_lon + p[0] * t.deg_per_px_x
    _check_geo(lat, lon)
    return GeoPoint(lat, lon)


def pixel_from_geo(t: GeoTransform, g) -> PixelPoint:
    x = (g[1] - t.origin_lon) / t.deg_per_px_x
    y = (t.origin_lat - g[0]) / t.deg_per_px_y
    if not (math.isfinite(x) and math.isfinite(y)):
        raise InvalidTransformError(f"non-finite pixel result for {tuple(g)}")
    return PixelPoint(x, y)


def haversine_m(a, b) -> float:
    """Great-circle distance in meters between two (lat, lon) points."""
    lat1, lon1 = math.radians(a[0]), math.radians(a[1])
    lat2, lon2 = math.radians(b[0]), math.radians(b[1])
    s_lat = math.sin((lat2 - lat1) / 2.0)
    s_lon = math.sin((lon2 - lon1) / 2.0)
    h = s_lat * s_lat + math.cos(lat1) * math.cos(lat2) * s_lon * s_lon
    # clamp: rounding can push h a hair above 1 for antipodal points
    h = min(1.0, h)
    return 2.0 * EARTH_RADIUS_M * math.asin(math.sqrt(h))


def haversine_matrix(a, b) -> np.ndarray:
    """Pairwise haversine distances (meters) between rows of two (N, 2) lat/lon arrays."""
    a = np.radians(np.asarray(a, dtype=float).reshape(-1, 2))
    b = np.radians(np.asarray(b, dtype=float).reshape(-1, 2))
    lat1 = a[:, 0][:, None]
    lat2 = b[:, 0][None, :]
    dlat = lat2 - lat1
    dlon = b[:, 1][None, :] - a[:, 1][:, None]
    h = np.sin(dlat / 2.0) ** 2 + np.cos(lat1) * np.cos(lat2) * np.sin(dlon / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_M * np.arcsin(np.sqrt(np.minimum(h, 1.0)))


def haversine_pairs(a, b) -> np.ndarray:
    """Element-wise haversine distances between two equally long (N, 2) arrays."""
    a = np.radians(np.asarray(a, dtype=float).reshape(-1, 2))
    b = np.radians(np.asarray(b, dtype=float).reshape(-1, 2))
    dlat = b[:, 0] - a[:, 0]
    dlon = b[:, 1] - a[:, 1]
    h = np.sin(dlat / 2.0) ** 2 + np.cos(a[:, 0]) * np.cos(b[:, 0]) * np.sin(dlon / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_M * np.arcsin(np.sqrt(np.minimum(h, 1.0)))


def polyline_length_m(points: Sequence) -> float:
    if len(points) == 0:
        raise ValueError("polyline_length_m needs at least one point")
    total = 0.0
    for a, b in zip(points[:-1], points[1:]):
        total += haversine_m(a, b)
    return total


def meters_per_pixel(t: GeoTransform, lat: float):
    """(east, south) ground size of one pixel in meters at latitude ``lat``."""
    m_per_deg = math.pi * EARTH_RADIUS_M / 180.0
    return (t.deg_per_px_x * m_per_deg * math.cos(math.radians(lat)),
            t.deg_per_px_y * m_per_deg)
