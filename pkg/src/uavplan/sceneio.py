"""Scene documents, plan files, reference trajectories and the scene generator.

Scene documents are JSON (see ``docs/formats.md``). Plan files are a
line-oriented text format with a fixed number of decimals so identical
missions always serialise to identical bytes.
"""

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .errors import (GenerationError, InfeasibleEndpointError, InfeasibleMissionError,
                     SceneFormatError)
from .geo import EARTH_RADIUS_M, GeoPoint, GeoTransform, PixelPoint
from .grid import GridSpec, Obstacle, build_grid, cell_of, is_traversable, polygon_is_simple
from .metrics import Trajectory
from .planner import ItemKind, Mission, MissionItem, MissionParams, Scene, plan_hybrid
from .rng import SplitMix64

SCHEMA_VERSION = 1
DEFAULT_OBSTACLE_RADIUS_PX = 15.0
PLAN_HEADER = "UAVVLPA PLAN 1"
PLAN_FOOTER = "LENGTH_KM"
MAX_ATTEMPTS = 100

_SCENE_KEYS = {"schema_version", "name", "transform", "grid", "home", "targets",
               "obstacles", "obstacle_default_radius_px", "params"}
_REQUIRED = ("schema_version", "name", "transform", "grid", "home")
_TRANSFORM_KEYS = ("origin_lat", "origin_lon", "deg_per_px_x", "deg_per_px_y")
_GRID_KEYS = {"width_px", "height_px", "cell_size_px"}
_PARAM_KEYS = {"altitude_m", "margin_cells", "snap_endpoints", "snap_radius_cells"}


# ---------------------------------------------------------------------------
# scene documents
# ---------------------------------------------------------------------------

def _num(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise SceneFormatError(f"expected a finite number, got {value!r}", field=where)
    return float(value)


def _size(value, where):
    v = _num(value, where)
    return int(v) if v.is_integer() else v


def _int(value, where):
    if isinstance(value, bool) or not isinstance(value, int):
        raise SceneFormatError(f"expected an integer, got {value!r}", field=where)
    return value


def _obj(value, where, allowed, required=()):
    if not isinstance(value, dict):
        raise SceneFormatError(f"expected an object, got {type(value).__name__}", field=where)
    unknown = sorted(set(value) - set(allowed))
    if unknown:
        raise SceneFormatError(f"unknown field(s) {', '.join(unknown)}", field=where)
    for key in required:
        if key not in value:
            raise SceneFormatError("missing required field", field=f"{where}.{key}" if where else key)
    return value


def _point(value, where) -> PixelPoint:
    if not isinstance(value, list) or len(value) != 2:
        raise SceneFormatError(f"expected [x, y], got {value!r}", field=where)
    return PixelPoint(_num(value[0], f"{where}[0]"), _num(value[1], f"{where}[1]"))


def _check_extent(p: PixelPoint, spec: GridSpec, where):
    if not (0 <= p.x < spec.width_px and 0 <= p.y < spec.height_px):
        raise SceneFormatError(
            f"point ({p.x}, {p.y}) outside image extent {spec.width_px}x{spec.height_px}", field=where)


def _obstacle(value, where, default_radius) -> Obstacle:
    if not isinstance(value, dict) or "kind" not in value:
        raise SceneFormatError("obstacle needs a 'kind'", field=where)
    kind = value["kind"]
    if kind == "polygon":
        _obj(value, where, {"kind", "vertices"}, ("vertices",))
        verts = value["vertices"]
        if not isinstance(verts, list) or len(verts) < 3:
            raise SceneFormatError("polygon needs at least 3 vertices", field=f"{where}.vertices")
        pts = [_point(v, f"{where}.vertices[{k}]") for k, v in enumerate(verts)]
        if not polygon_is_simple(pts):
            raise SceneFormatError("polygon is not simple (edges cross or repeat)", field=where)
        return Obstacle.polygon(pts)
    if kind == "disc":
        _obj(value, where, {"kind", "center", "radius_px"}, ("center", "radius_px"))
        r = _num(value["radius_px"], f"{where}.radius_px")
        if r <= 0:
            raise SceneFormatError("radius_px must be > 0", field=f"{where}.radius_px")
        return Obstacle.disc(_point(value["center"], f"{where}.center"), r)
    if kind == "point":
        _obj(value, where, {"kind", "center"}, ("center",))
        return Obstacle.disc(_point(value["center"], f"{where}.center"), default_radius)
    raise SceneFormatError(f"unknown obstacle kind {kind!r}", field=f"{where}.kind")


def scene_from_dict(doc) -> Scene:
    _obj(doc, "", _SCENE_KEYS, _REQUIRED)
    version = _int(doc["schema_version"], "schema_version")
    if version != SCHEMA_VERSION:
        raise SceneFormatError(f"unsupported schema_version {version} (expected {SCHEMA_VERSION})",
                               field="schema_version")
    name = doc["name"]
    if not isinstance(name, str) or not name:
        raise SceneFormatError("expected a non-empty string", field="name")

    tdoc = _obj(doc["transform"], "transform", _TRANSFORM_KEYS, _TRANSFORM_KEYS)
    try:
        transform = GeoTransform(*(_num(tdoc[k], f"transform.{k}") for k in _TRANSFORM_KEYS))
    except ValueError as exc:
        if isinstance(exc, SceneFormatError):
            raise
        raise SceneFormatError(str(exc), field="transform") from None

    gdoc = _obj(doc["grid"], "grid", _GRID_KEYS, ("width_px", "height_px"))
    try:
        spec = GridSpec(_size(gdoc["width_px"], "grid.width_px"),
                        _size(gdoc["height_px"], "grid.height_px"),
                        _int(gdoc.get("cell_size_px", 5), "grid.cell_size_px"))
    except ValueError as exc:
        if isinstance(exc, SceneFormatError):
            raise
        raise SceneFormatError(str(exc), field="grid") from None

    home = _point(doc["home"], "home")
    _check_extent(home, spec, "home")
    raw_targets = doc.get("targets", [])
    if not isinstance(raw_targets, list):
        raise SceneFormatError("expected a list", field="targets")
    targets = []
    for k, t in enumerate(raw_targets):
        p = _point(t, f"targets[{k}]")
        _check_extent(p, spec, f"targets[{k}]")
        targets.append(p)

    default_r = _num(doc.get("obstacle_default_radius_px", DEFAULT_OBSTACLE_RADIUS_PX),
                     "obstacle_default_radius_px")
    if default_r <= 0:
        raise SceneFormatError("must be > 0", field="obstacle_default_radius_px")
    raw_obs = doc.get("obstacles", [])
    if not isinstance(raw_obs, list):
        raise SceneFormatError("expected a list", field="obstacles")
    obstacles = [_obstacle(o, f"obstacles[{k}]", default_r) for k, o in enumerate(raw_obs)]

    pdoc = _obj(doc.get("params", {}), "params", _PARAM_KEYS)
    kwargs = {}
    if "altitude_m" in pdoc:
        kwargs["altitude_m"] = _num(pdoc["altitude_m"], "params.altitude_m")
    for key in ("margin_cells", "snap_radius_cells"):
        if key in pdoc:
            kwargs[key] = _int(pdoc[key], f"params.{key}")
    if "snap_endpoints" in pdoc:
        if not isinstance(pdoc["snap_endpoints"], bool):
            raise SceneFormatError("expected true/false", field="params.snap_endpoints")
        kwargs["snap_endpoints"] = pdoc["snap_endpoints"]
    try:
        params = MissionParams(**kwargs)
    except ValueError as exc:
        raise SceneFormatError(str(exc), field="params") from None

    return Scene(name, transform, spec, home, tuple(targets), tuple(obstacles), params)


def load_scene(text: str) -> Scene:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneFormatError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    return scene_from_dict(doc)


def _obstacle_dict(ob: Obstacle):
    if ob.kind == "disc":
        return {"kind": "disc", "center": [ob.center.x, ob.center.y], "radius_px": ob.radius_px}
    return {"kind": "polygon", "vertices": [[v.x, v.y] for v in ob.vertices]}


def scene_to_dict(scene: Scene, default_radius: float = DEFAULT_OBSTACLE_RADIUS_PX):
    t = scene.transform
    p = scene.params
    return {
        "schema_version": SCHEMA_VERSION,
        "name": scene.name,
        "transform": {"origin_lat": t.origin_lat, "origin_lon": t.origin_lon,
                      "deg_per_px_x": t.deg_per_px_x, "deg_per_px_y": t.deg_per_px_y},
        "grid": {"width_px": scene.spec.width_px, "height_px": scene.spec.height_px,
                 "cell_size_px": scene.spec.cell_size_px},
        "home": [scene.home.x, scene.home.y],
        "targets": [[q.x, q.y] for q in scene.targets],
        "obstacles": [_obstacle_dict(ob) for ob in scene.obstacles],
        "obstacle_default_radius_px": default_radius,
        "params": {"altitude_m": p.altitude_m, "margin_cells": p.margin_cells,
                   "snap_endpoints": p.snap_endpoints, "snap_radius_cells": p.snap_radius_cells},
    }


def save_scene(scene: Scene) -> str:
    return json.dumps(scene_to_dict(scene), indent=2) + "\n"


# ---------------------------------------------------------------------------
# plan files
# ---------------------------------------------------------------------------

def save_mission(m: Mission) -> str:
    lines = [PLAN_HEADER]
    for k, it in enumerate(m.items):
        lines.append(f"{k} {it.kind.value} {it.geo.lat:.7f} {it.geo.lon:.7f} {it.alt_m:.1f}")
    lines.append(f"{PLAN_FOOTER} {m.length_m / 1000.0:.3f}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class PlanFile:
    items: Tuple[MissionItem, ...]
    length_km: float

    def geo_points(self, include_pathpoints=True) -> List[GeoPoint]:
        return [it.geo for it in self.items
                if include_pathpoints or it.kind is not ItemKind.PATHPOINT]


def _float(token, lineno, what):
    try:
        v = float(token)
    except ValueError:
        raise SceneFormatError(f"bad {what} {token!r}", line=lineno) from None
    if not math.isfinite(v):
        raise SceneFormatError(f"non-finite {what}", line=lineno)
    return v


def load_plan(text: str) -> PlanFile:
    lines = text.splitlines()
    if not lines or lines[0].strip() != PLAN_HEADER:
        raise SceneFormatError(f"expected header {PLAN_HEADER!r}", line=1)
    items = []
    length_km = None
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if not parts:
            continue
        if length_km is not None:
            raise SceneFormatError("content after the LENGTH_KM footer", line=lineno)
        if parts[0] == PLAN_FOOTER:
            if len(parts) != 2:
                raise SceneFormatError("footer must be 'LENGTH_KM <km>'", line=lineno)
            length_km = _float(parts[1], lineno, "length")
            continue
        if len(parts) != 5:
            raise SceneFormatError(f"expected 5 fields, got {len(parts)}", line=lineno)
        if parts[0] != str(len(items)):
            raise SceneFormatError(f"expected item index {len(items)}, got {parts[0]!r}", line=lineno)
        try:
            kind = ItemKind(parts[1])
        except ValueError:
            raise SceneFormatError(f"unknown item kind {parts[1]!r}", line=lineno) from None
        lat = _float(parts[2], lineno, "latitude")
        lon = _float(parts[3], lineno, "longitude")
        alt = _float(parts[4], lineno, "altitude")
        if not (-90 <= lat <= 90 and -180 <= lon <= 180):
            raise SceneFormatError(f"coordinate ({lat}, {lon}) out of range", line=lineno)
        items.append(MissionItem(kind, GeoPoint(lat, lon), alt))
    if length_km is None:
        raise SceneFormatError("missing LENGTH_KM footer", line=len(lines))
    if not items:
        raise SceneFormatError("plan has no items", line=len(lines))
    return PlanFile(tuple(items), length_km)


def _load_csv(text: str) -> Trajectory:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or [c.strip() for c in rows[0]] != ["lat", "lon"]:
        raise SceneFormatError("expected CSV header 'lat,lon'", line=1)
    pts = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise SceneFormatError(f"expected 2 columns, got {len(row)}", line=lineno)
        lat = _float(row[0].strip(), lineno, "latitude")
        lon = _float(row[1].strip(), lineno, "longitude")
        if not (-90 <= lat <= 90 and -180 <= lon <= 180):
            raise SceneFormatError(f"coordinate ({lat}, {lon}) out of range", line=lineno)
        pts.append(GeoPoint(lat, lon))
    if not pts:
        raise SceneFormatError("no points in CSV", line=len(rows))
    return Trajectory(tuple(pts))


def load_reference(text: str, include_pathpoints: bool = False) -> Trajectory:
    """Trajectory from a plan file or a ``lat,lon`` CSV.

    PATHPOINT items of plan files are skipped unless ``include_pathpoints``.
    """
    if not text.strip():
        raise SceneFormatError("empty reference file", line=1)
    first = text.lstrip().splitlines()[0].strip()
    if first == PLAN_HEADER:
        plan = load_plan(text)
        pts = plan.geo_points(include_pathpoints)
        return Trajectory(tuple(pts))
    return _load_csv(text)


# ---------------------------------------------------------------------------
# synthetic scenes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GenParams:
    seed: int = 0
    width_px: int = 400
    height_px: int = 400
    cell_size_px: int = 5
    n_targets: int = 8
    n_obstacles: int = 6
    obstacle_mix: str = "mixed"  # disc | polygon | mixed
    min_size_px: float = 15.0
    max_size_px: float = 45.0
    clearance_px: float = 8.0
    ground_res_m: float = 2.5
    altitude_m: float = 100.0

    def __post_init__(self):
        if self.obstacle_mix not in ("disc", "polygon", "mixed"):
            raise ValueError(f"obstacle_mix must be disc, polygon or mixed, got {self.obstacle_mix!r}")
        if self.n_targets < 0 or self.n_obstacles < 0:
            raise ValueError("counts must be >= 0")
        if not 0 < self.min_size_px <= self.max_size_px:
            raise ValueError("need 0 < min_size_px <= max_size_px")
        if self.clearance_px < 0 or self.ground_res_m <= 0:
            raise ValueError("clearance_px must be >= 0 and ground_res_m > 0")
        GridSpec(self.width_px, self.height_px, self.cell_size_px)


def _round(v, nd=2):
    return float(round(v, nd))


def _sig(v):
    return float(f"{v:.12g}")


def _gen_obstacle(r: SplitMix64, p: GenParams) -> Obstacle:
    size = r.uniform(p.min_size_px, p.max_size_px)
    cx = _round(r.uniform(0, p.width_px))
    cy = _round(r.uniform(0, p.height_px))
    if p.obstacle_mix == "disc" or (p.obstacle_mix == "mixed" and r.random() < 0.5):
        return Obstacle.disc((cx, cy), _round(size))
    while True:
        k = r.randint(3, 8)
        step = 2.0 * math.pi / k
        verts = []
        for v in range(k):
            # star-shaped around the centre with increasing angles: always simple
            ang = step * (v + r.uniform(-0.3, 0.3))
            rad = r.uniform(0.5 * size, size)
            verts.append((_round(cx + rad * math.cos(ang)), _round(cy + rad * math.sin(ang))))
        if polygon_is_simple(verts):
            return Obstacle.polygon(verts)


def _gen_transform(r: SplitMix64, p: GenParams) -> GeoTransform:
    lat0 = _round(r.uniform(25.0, 48.0), 6)
    lon0 = _round(r.uniform(-124.0, -70.0), 6)
    dy = p.ground_res_m / (math.pi * EARTH_RADIUS_M / 180.0)
    center_lat = lat0 - 0.5 * p.height_px * dy
    # square ground pixels at the scene centre
    dx = dy / math.cos(math.radians(center_lat))
    return GeoTransform(lat0, lon0, _sig(dx), _sig(dy))


def _attempt(p: GenParams, attempt: int, name: str) -> Optional[Scene]:
    root = SplitMix64(p.seed).split(attempt)
    spec = GridSpec(p.width_px, p.height_px, p.cell_size_px)
    transform = _gen_transform(root.split(1), p)
    obstacles = tuple(_gen_obstacle(root.split(100 + k), p) for k in range(p.n_obstacles))
    grid = build_grid(spec, obstacles, 0)

    points: List[PixelPoint] = []
    used = set()
    for k in range(p.n_targets + 1):
        r = root.split(1000 + k)
        for _ in range(1000):
            q = PixelPoint(_round(r.uniform(0, p.width_px)), _round(r.uniform(0, p.height_px)))
            if not (q.x < p.width_px and q.y < p.height_px):
                continue
            c = cell_of(spec, q)
            if c in used or not is_traversable(grid, c):
                continue
            if any(ob.distance_to(q) < p.clearance_px for ob in obstacles):
                continue
            points.append(q)
            used.add(c)
            break
        else:
            return None

    scene = Scene(name, transform, spec, points[0], tuple(points[1:]), obstacles,
                  MissionParams(altitude_m=p.altitude_m))
    try:
        plan_hybrid(scene)
    except (InfeasibleMissionError, InfeasibleEndpointError):
        return None
    return scene


def generate_scene(p: GenParams, name: Optional[str] = None) -> Scene:
    """Deterministic synthetic scene for ``p.seed``, guaranteed to have a hybrid plan."""
    name = name or f"gen-{p.seed}"
    for attempt in range(MAX_ATTEMPTS):
        scene = _attempt(p, attempt, name)
        if scene is not None:
            return scene
    raise GenerationError(f"no feasible scene for seed {p.seed} after {MAX_ATTEMPTS} attempts")
