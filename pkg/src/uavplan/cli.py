"""Command-line front end: ``uavplan plan|evaluate|benchmark|generate``.

Exit codes: 0 success, 1 bad input or generation failure, 2 infeasible mission.
"""

import argparse
import os
import sys
import tempfile

from . import bench
from .errors import (GenerationError, InfeasibleEndpointError, InfeasibleMissionError,
                     PlanningError)
from .metrics import DEFAULT_SAMPLES, dtw_rmse, knn_rmse, sequential_rmse
from .planner import plan, with_params
from .sceneio import GenParams, generate_scene, load_reference, load_scene, save_mission, save_scene

EXIT_OK = 0
EXIT_BAD_INPUT = 1
EXIT_INFEASIBLE = 2


def write_atomic(path, text):
    """Write via a temp file in the target directory, then rename over ``path``."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _err(msg):
    print(f"error: {msg}", file=sys.stderr)


def _gen_params(args, seed):
    return GenParams(
        seed=seed, width_px=args.width, height_px=args.height, cell_size_px=args.cell_size,
        n_targets=args.targets, n_obstacles=args.obstacles, obstacle_mix=args.mix,
        min_size_px=args.min_size, max_size_px=args.max_size, clearance_px=args.clearance,
        ground_res_m=args.ground_res, altitude_m=args.altitude,
    )


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_plan(args) -> int:
    try:
        scene = load_scene(_read(args.scene))
        changes = {}
        if args.snap:
            changes["snap_endpoints"] = True
        if args.snap_radius is not None:
            changes["snap_radius_cells"] = args.snap_radius
        if args.margin is not None:
            changes["margin_cells"] = args.margin
        if changes:
            scene = with_params(scene, **changes)
    except (OSError, ValueError) as exc:
        _err(exc)
        return EXIT_BAD_INPUT
    try:
        mission = plan(scene, args.mode, init=args.init)
    except (InfeasibleEndpointError, InfeasibleMissionError) as exc:
        _err(f"infeasible mission: {exc}")
        return EXIT_INFEASIBLE
    write_atomic(args.out, save_mission(mission))
    print(f"length_km={mission.length_m / 1000.0:.3f}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    try:
        gen_text, ref_text = _read(args.gen), _read(args.ref)
        gen = load_reference(gen_text, args.include_pathpoints)
        ref = load_reference(ref_text, args.include_pathpoints)
        # lengths always describe the full flown polyline
        gen_len = load_reference(gen_text, True).length_m()
        ref_len = load_reference(ref_text, True).length_m()
        if args.samples < 2:
            raise ValueError("--samples must be >= 2")
    except (OSError, ValueError) as exc:
        _err(exc)
        return EXIT_BAD_INPUT
    knn = knn_rmse(gen, ref)
    dtw = dtw_rmse(gen, ref)
    seq = sequential_rmse(gen, ref, args.samples)
    print(f"{knn:.3f},{dtw:.3f},{seq:.3f},{gen_len / 1000.0:.3f},{ref_len / 1000.0:.3f}")
    return EXIT_OK


def cmd_benchmark(args) -> int:
    try:
        gen = _gen_params(args, args.seed)
        result = bench.run_benchmark(args.scenes, args.seed, gen, samples=args.samples,
                                     include_pathpoints=args.include_pathpoints,
                                     timing=args.timing)
    except (GenerationError, ValueError) as exc:
        _err(exc)
        return EXIT_BAD_INPUT
    write_atomic(args.out, bench.benchmark_csv(result))
    if args.polylines:
        write_atomic(args.polylines, bench.polylines_csv(result))
    if args.figures and result.scenes:
        from .plotting import render_benchmark
        first = result.missions[0]
        render_benchmark(result.rows, result.scenes[0],
                         [first["reference"], first["astar-seq"], first["hybrid"]], args.figures)

    n = len(result.scenes)
    hyb, strict, tsp = result.ordering_counts()
    print(f"scenes={n}")
    print(f"hybrid<=astar-seq={hyb}/{n} strict={strict}")
    print(f"tsp-euclid<=reference={tsp}/{n}")
    for mode in bench.BENCH_MODES:
        rows = [r for r in result.rows if r["mode"] == mode]
        if rows:
            total = sum(r["length_km"] for r in rows)
            print(f"{mode}: total_km={total:.3f}")
    print(f"ordering_violations={result.violations}")
    return EXIT_OK if result.violations == 0 else EXIT_BAD_INPUT


def cmd_generate(args) -> int:
    try:
        scene = generate_scene(_gen_params(args, args.seed), name=args.name)
    except (GenerationError, ValueError) as exc:
        _err(exc)
        return EXIT_BAD_INPUT
    write_atomic(args.out, save_scene(scene))
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_gen_args(p):
    d = GenParams()
    p.add_argument("--width", type=int, default=d.width_px, help="image width in pixels")
    p.add_argument("--height", type=int, default=d.height_px, help="image height in pixels")
    p.add_argument("--cell-size", type=int, default=d.cell_size_px, help="grid cell side in pixels")
    p.add_argument("--targets", type=int, default=d.n_targets)
    p.add_argument("--obstacles", type=int, default=d.n_obstacles)
    p.add_argument("--mix", choices=("disc", "polygon", "mixed"), default=d.obstacle_mix)
    p.add_argument("--min-size", type=float, default=d.min_size_px, help="obstacle radius lower bound (px)")
    p.add_argument("--max-size", type=float, default=d.max_size_px, help="obstacle radius upper bound (px)")
    p.add_argument("--clearance", type=float, default=d.clearance_px,
                   help="minimum pixel gap between home/targets and obstacles")
    p.add_argument("--ground-res", type=float, default=d.ground_res_m, help="meters per pixel")
    p.add_argument("--altitude", type=float, default=d.altitude_m)


def build_parser():
    parser = argparse.ArgumentParser(prog="uavplan", description="Plan and evaluate UAV survey missions.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="plan a mission for one scene file")
    p.add_argument("--scene", required=True)
    p.add_argument("--mode", required=True, choices=("tsp-euclid", "astar-seq", "hybrid"))
    p.add_argument("--out", required=True)
    p.add_argument("--snap", action="store_true", help="snap blocked endpoints to free cells")
    p.add_argument("--snap-radius", type=int, default=None)
    p.add_argument("--margin", type=int, default=None, help="obstacle inflation in cells")
    p.add_argument("--init", choices=("input", "nn"), default="input",
                   help="2-opt start: detection order or nearest neighbour")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("evaluate", help="RMSE metrics of a plan against a reference")
    p.add_argument("--gen", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--include-pathpoints", action="store_true")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("benchmark", help="run all planners over seeded synthetic scenes")
    p.add_argument("--scenes", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--include-pathpoints", action="store_true")
    p.add_argument("--timing", action="store_true",
                   help="fill plan_wall_ms (makes the CSV non-reproducible)")
    p.add_argument("--polylines", default=None, help="also write scene,mode,idx,lat,lon CSV")
    p.add_argument("--figures", default=None, help="directory for PNG figures")
    _add_gen_args(p)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("generate", help="write one seeded synthetic scene")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--name", default=None)
    _add_gen_args(p)
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PlanningError as exc:
        _err(exc)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
