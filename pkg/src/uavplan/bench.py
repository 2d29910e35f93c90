"""Seeded desk-scale benchmark: all planners over generated scenes."""

import time
from dataclasses import dataclass, replace
from typing import Dict, List, Optional

from .metrics import DEFAULT_SAMPLES, dtw_rmse, knn_rmse, sequential_rmse, Trajectory
from .planner import (Mission, Scene, leg_cache, plan_astar_seq, plan_hybrid, plan_input_order,
                      plan_tsp_euclid)
from .rng import SplitMix64
from .sceneio import GenParams, generate_scene

BENCH_MODES = ("tsp-euclid", "astar-seq", "hybrid", "reference")
CSV_COLUMNS = ("scene", "mode", "length_km", "knn_m", "dtw_m", "seq_m", "plan_wall_ms")
POLYLINE_COLUMNS = ("scene", "mode", "idx", "lat", "lon")
LENGTH_TOL_M = 1e-6


@dataclass
class BenchmarkResult:
    rows: List[Dict]
    scenes: List[Scene]
    missions: List[Dict[str, Mission]]

    def ordering_counts(self):
        """(hybrid<=astar-seq, strict, tsp-euclid<=reference) scene counts."""
        hyb = strict = tsp = 0
        for ms in self.missions:
            h, a = ms["hybrid"].length_m, ms["astar-seq"].length_m
            hyb += h <= a + LENGTH_TOL_M
            strict += h < a - LENGTH_TOL_M
            tsp += ms["tsp-euclid"].length_m <= ms["reference"].length_m + LENGTH_TOL_M
        return hyb, strict, tsp

    @property
    def violations(self) -> int:
        hyb, _, tsp = self.ordering_counts()
        n = len(self.scenes)
        return (n - hyb) + (n - tsp)


def scene_seed(seed: int, index: int) -> int:
    return SplitMix64(seed).split(index).next_u64()


def _timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return out, (time.perf_counter() - t0) * 1000.0


def plan_all(scene: Scene):
    """Plan every benchmark mode; astar-seq and hybrid share one leg cache."""
    missions, wall = {}, {}
    missions["tsp-euclid"], wall["tsp-euclid"] = _timed(plan_tsp_euclid, scene)

    def astar_seq():
        cache = leg_cache(scene)
        return plan_astar_seq(scene, cache), cache

    (missions["astar-seq"], cache), wall["astar-seq"] = _timed(astar_seq)
    missions["hybrid"], wall["hybrid"] = _timed(plan_hybrid, scene, "input", cache)
    missions["reference"], wall["reference"] = _timed(plan_input_order, scene)
    return missions, wall


def run_benchmark(n_scenes: int, seed: int, gen: Optional[GenParams] = None,
                  samples: int = DEFAULT_SAMPLES, include_pathpoints: bool = False,
                  timing: bool = False) -> BenchmarkResult:
    gen = gen or GenParams()
    rows, scenes, all_missions = [], [], []
    for k in range(n_scenes):
        scene = generate_scene(replace(gen, seed=scene_seed(seed, k)), name=f"scene-{k:03d}")
        missions, wall = plan_all(scene)
        ref = Trajectory(tuple(missions["reference"].geo_points(include_pathpoints)))
        for mode in BENCH_MODES:
            m = missions[mode]
            g = Trajectory(tuple(m.geo_points(include_pathpoints)))
            rows.append({
                "scene": scene.name,
                "mode": mode,
                "length_km": m.length_m / 1000.0,
                "knn_m": knn_rmse(g, ref),
                "dtw_m": dtw_rmse(g, ref),
                "seq_m": sequential_rmse(g, ref, samples),
                "plan_wall_ms": wall[mode] if timing else None,
            })
        scenes.append(scene)
        all_missions.append(missions)
    return BenchmarkResult(rows, scenes, all_missions)


def format_row(row) -> str:
    wall = "" if row["plan_wall_ms"] is None else f"{row['plan_wall_ms']:.1f}"
    return (f"{row['scene']},{row['mode']},{row['length_km']:.6f},"
            f"{row['knn_m']:.3f},{row['dtw_m']:.3f},{row['seq_m']:.3f},{wall}")


def benchmark_csv(result: BenchmarkResult) -> str:
    lines = [",".join(CSV_COLUMNS)] + [format_row(r) for r in result.rows]
    return "\n".join(lines) + "\n"


def polylines_csv(result: BenchmarkResult) -> str:
    lines = [",".join(POLYLINE_COLUMNS)]
    for scene, missions in zip(result.scenes, result.missions):
        for mode in BENCH_MODES:
            for idx, g in enumerate(missions[mode].geo_points(include_pathpoints=True)):
                lines.append(f"{scene.name},{mode},{idx},{g.lat:.7f},{g.lon:.7f}")
    return "\n".join(lines) + "\n"
