"""Trajectory error metrics: KNN, DTW and sequential-interpolation RMSE.

All distances are haversine meters between (lat, lon) points.
"""

import math
import statistics
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .geo import GeoPoint, haversine_matrix, haversine_pairs, polyline_length_m

DEFAULT_SAMPLES = 200
METRIC_NAMES = ("knn_m", "dtw_m", "seq_m", "gen_length_km", "ref_length_km")


@dataclass(frozen=True)
class Trajectory:
    points: Tuple[GeoPoint, ...]

    def __post_init__(self):
        pts = tuple(GeoPoint(float(p[0]), float(p[1])) for p in self.points)
        if not pts:
            raise ValueError("trajectory must contain at least one point")
        for p in pts:
            if not (math.isfinite(p.lat) and math.isfinite(p.lon)):
                raise ValueError(f"non-finite trajectory point {p}")
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)

    def array(self) -> np.ndarray:
        return np.array(self.points, dtype=float)

    def length_m(self) -> float:
        return polyline_length_m(self.points)


def _traj(t) -> Trajectory:
    return t if isinstance(t, Trajectory) else Trajectory(tuple(t))


def knn_rmse(gen, ref) -> float:
    """RMS distance from each generated point to its nearest reference point.

    Directed gen -> ref; swapping the arguments generally changes the value.
    """
    gen, ref = _traj(gen), _traj(ref)
    d = haversine_matrix(gen.array(), ref.array())
    nearest = d.min(axis=1)
    return float(math.sqrt(np.mean(nearest ** 2)))


def dtw_rmse(gen, ref) -> float:
    """DTW with squared-distance local cost, normalised by warping-path length.

    Returns sqrt(optimal accumulated cost / number of aligned pairs). Among
    alignments of equal cost the one with fewer pairs is taken.
    """
    gen, ref = _traj(gen), _traj(ref)
    cost = (haversine_matrix(gen.array(), ref.array()) ** 2).tolist()
    n, m = len(gen), len(ref)
    inf = (math.inf, 0)
    prev = [inf] * (m + 1)
    prev[0] = (0.0, 0)
    for i in range(1, n + 1):
        row = [inf] * (m + 1)
        ci = cost[i - 1]
        for j in range(1, m + 1):
            best = min(prev[j - 1], prev[j], row[j - 1])
            row[j] = (best[0] + ci[j - 1], best[1] + 1)
        prev = row
        prev[0] = inf
    total, steps = prev[m]
    return math.sqrt(total / steps)


def resample_by_arclength(t, m: int) -> Trajectory:
    """``m`` points evenly spaced by arc length, interpolating linearly in lat/lon."""
    t = _traj(t)
    if m < 2:
        raise ValueError("resample_by_arclength needs m >= 2")
    pts = t.array()
    if len(pts) == 1:
        return Trajectory(tuple(t.points) * m)
    seg = haversine_pairs(pts[:-1], pts[1:])
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = cum[-1]
    if total == 0.0:
        return Trajectory((t.points[0],) * m)
    out = [t.points[0]]
    k = 0
    for s in range(1, m - 1):
        target = total * s / (m - 1)
        while k < len(seg) - 1 and cum[k + 1] < target:
            k += 1
        frac = 0.0 if seg[k] == 0 else (target - cum[k]) / seg[k]
        frac = min(1.0, max(0.0, frac))
        p = pts[k] + frac * (pts[k + 1] - pts[k])
        out.append(GeoPoint(float(p[0]), float(p[1])))
    out.append(t.points[-1])
    return Trajectory(tuple(out))


def sequential_rmse(gen, ref, m: int = DEFAULT_SAMPLES) -> float:
    a = resample_by_arclength(gen, m).array()
    b = resample_by_arclength(ref, m).array()
    d = haversine_pairs(a, b)
    return float(math.sqrt(np.mean(d ** 2)))


@dataclass(frozen=True)
class SceneMetrics:
    scene: str
    knn_m: float
    dtw_m: float
    seq_m: float
    gen_length_km: float
    ref_length_km: float


@dataclass(frozen=True)
class MetricsReport:
    per_scene: Tuple[SceneMetrics, ...]
    aggregate: Dict[str, Dict[str, float]]
    config: Dict[str, object] = field(default_factory=dict)


def evaluate_pair(name: str, gen, ref, samples: int = DEFAULT_SAMPLES) -> SceneMetrics:
    gen, ref = _traj(gen), _traj(ref)
    return SceneMetrics(
        scene=name,
        knn_m=knn_rmse(gen, ref),
        dtw_m=dtw_rmse(gen, ref),
        seq_m=sequential_rmse(gen, ref, samples),
        gen_length_km=gen.length_m() / 1000.0,
        ref_length_km=ref.length_m() / 1000.0,
    )


def aggregate(rows: Sequence[SceneMetrics]) -> Dict[str, Dict[str, float]]:
    out = {}
    for name in METRIC_NAMES:
        vals = [getattr(r, name) for r in rows]
        out[name] = {
            "mean": statistics.fmean(vals),
            "median": statistics.median(vals),
            "max": max(vals),
        }
    return out


def report(pairs, samples: int = DEFAULT_SAMPLES, include_pathpoints: bool = False) -> MetricsReport:
    """Per-scene metrics for ``(scene_name, gen, ref)`` triples plus mean/median/max.

    ``include_pathpoints`` is recorded in the config only; callers decide
    which points go into the trajectories.
    """
    pairs = list(pairs)
    if not pairs:
        raise ValueError("report needs at least one (scene, gen, ref) triple")
    rows: List[SceneMetrics] = [evaluate_pair(name, g, r, samples) for name, g, r in pairs]
    config = {"knn_k": 1, "knn_direction": "gen->ref", "dtw_norm": "path-length",
              "samples": samples, "include_pathpoints": include_pathpoints}
    return MetricsReport(tuple(rows), aggregate(rows), config)
