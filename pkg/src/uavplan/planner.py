"""End-to-end mission planners.

Three modes share one scene model:

* ``tsp-euclid`` - 2-opt over straight-leg haversine distances, obstacles ignored
* ``astar-seq``  - targets in detection order, every leg routed with A*
* ``hybrid``     - 2-opt over the A* leg matrix, legs stitched from the cached paths

Node 0 is home; node ``k`` (k >= 1) is ``scene.targets[k - 1]``.
"""

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .astar import astar, prune_collinear
from .errors import InfeasibleEndpointError, InfeasibleMissionError
from .geo import GeoPoint, GeoTransform, PixelPoint, geo_from_pixel, haversine_m, polyline_length_m
from .grid import CellIndex, GridSpec, Obstacle, OccupancyGrid, build_grid, cell_of, center_of, is_traversable
from .tsp import nearest_neighbor_init, two_opt

MODES = ("tsp-euclid", "astar-seq", "hybrid")


class ItemKind(str, Enum):
    TAKEOFF = "TAKEOFF"
    WAYPOINT = "WAYPOINT"
    PATHPOINT = "PATHPOINT"
    RTL = "RTL"


@dataclass(frozen=True)
class MissionParams:
    altitude_m: float = 100.0
    margin_cells: int = 0
    snap_endpoints: bool = False
    snap_radius_cells: int = 3

    def __post_init__(self):
        if not self.altitude_m > 0:
            raise ValueError(f"altitude_m must be > 0, got {self.altitude_m}")
        if self.margin_cells < 0:
            raise ValueError("margin_cells must be >= 0")
        if self.snap_radius_cells < 0:
            raise ValueError("snap_radius_cells must be >= 0")


@dataclass(frozen=True)
class Scene:
    name: str
    transform: GeoTransform
    spec: GridSpec
    home: PixelPoint
    targets: Tuple[PixelPoint, ...] = ()
    obstacles: Tuple[Obstacle, ...] = ()
    params: MissionParams = field(default_factory=MissionParams)

    def __post_init__(self):
        object.__setattr__(self, "home", PixelPoint(*self.home))
        object.__setattr__(self, "targets", tuple(PixelPoint(*t) for t in self.targets))
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        for label, p in [("home", self.home)] + [(f"targets[{k}]", t) for k, t in enumerate(self.targets)]:
            if not (0 <= p.x < self.spec.width_px and 0 <= p.y < self.spec.height_px):
                raise ValueError(f"{label} ({p.x}, {p.y}) lies outside the image extent")

    @property
    def nodes(self) -> Tuple[PixelPoint, ...]:
        return (self.home,) + self.targets

    def geo(self, p) -> GeoPoint:
        return geo_from_pixel(self.transform, p)


@dataclass(frozen=True)
class MissionItem:
    kind: ItemKind
    geo: GeoPoint
    alt_m: float


@dataclass(frozen=True)
class Mission:
    mode: str
    items: Tuple[MissionItem, ...]
    length_m: float
    visit_order: Tuple[int, ...]
    # every A* leg flown, as full cell paths (empty for tsp-euclid)
    leg_cells: Tuple[Tuple[CellIndex, ...], ...] = ()

    def geo_points(self, include_pathpoints=True) -> List[GeoPoint]:
        return [it.geo for it in self.items
                if include_pathpoints or it.kind is not ItemKind.PATHPOINT]


def node_label(k: int) -> str:
    return "home" if k == 0 else f"target {k - 1}"


# ---------------------------------------------------------------------------
# grid helpers
# ---------------------------------------------------------------------------

def scene_grid(scene: Scene) -> OccupancyGrid:
    return build_grid(scene.spec, scene.obstacles, scene.params.margin_cells)


def snap_endpoint(grid: OccupancyGrid, c, radius: int) -> CellIndex:
    """Nearest traversable cell within Chebyshev ``radius``.

    Ties go to the smaller Euclidean distance, then lexicographic (i, j).
    """
    c = CellIndex(*c)
    if is_traversable(grid, c):
        return c
    best = None
    for di in range(-radius, radius + 1):
        for dj in range(-radius, radius + 1):
            cand = CellIndex(c.i + di, c.j + dj)
            if not is_traversable(grid, cand):
                continue
            key = (di * di + dj * dj, cand.i, cand.j)
            if best is None or key < best[0]:
                best = (key, cand)
    if best is None:
        raise InfeasibleEndpointError(f"no traversable cell within {radius} cells of {tuple(c)}")
    return best[1]


@dataclass
class _Anchors:
    """Per-node grid cell and the pixel point where legs start/end."""
    cells: List[CellIndex]
    points: List[PixelPoint]
    snapped: List[bool]


def _anchors(scene: Scene, grid: OccupancyGrid) -> _Anchors:
    cells, points, snapped = [], [], []
    for k, p in enumerate(scene.nodes):
        c = cell_of(scene.spec, p)
        if is_traversable(grid, c):
            cells.append(c)
            points.append(p)
            snapped.append(False)
            continue
        if not scene.params.snap_endpoints:
            raise InfeasibleEndpointError(
                f"{node_label(k)} at ({p.x}, {p.y}) falls in blocked cell {tuple(c)}; "
                f"enable endpoint snapping or move the point")
        try:
            s = snap_endpoint(grid, c, scene.params.snap_radius_cells)
        except InfeasibleEndpointError as exc:
            raise InfeasibleEndpointError(f"{node_label(k)}: {exc}") from None
        cells.append(s)
        points.append(center_of(scene.spec, s))
        snapped.append(True)
    return _Anchors(cells, points, snapped)


@dataclass(frozen=True)
class Leg:
    """One routed leg between two nodes, stored in the (lo, hi) direction."""
    cells: Tuple[CellIndex, ...]
    pixels: Tuple[PixelPoint, ...]
    geo: Tuple[GeoPoint, ...]
    length_m: float

    def reversed(self) -> "Leg":
        return Leg(self.cells[::-1], self.pixels[::-1], self.geo[::-1], self.length_m)


class LegCache:
    """A* legs between scene nodes, computed once per unordered pair."""

    def __init__(self, scene: Scene, grid: OccupancyGrid, anchors: _Anchors):
        self.scene = scene
        self.grid = grid
        self.anchors = anchors
        self._legs: Dict[Tuple[int, int], Leg] = {}

    def get(self, a: int, b: int) -> Leg:
        lo, hi = min(a, b), max(a, b)
        leg = self._legs.get((lo, hi))
        if leg is None:
            leg = self._route(lo, hi)
            self._legs[(lo, hi)] = leg
        return leg if a <= b else leg.reversed()

    def _route(self, a: int, b: int) -> Leg:
        path, _ = astar(self.grid, self.anchors.cells[a], self.anchors.cells[b])
        if path is None:
            raise InfeasibleMissionError(
                f"no obstacle-free path between {node_label(a)} and {node_label(b)}",
                pair=(node_label(a), node_label(b)))
        spec = self.scene.spec
        pixels = [self.anchors.points[a]]
        for c in prune_collinear(path):
            pixels.append(center_of(spec, c))
        pixels.append(self.anchors.points[b])
        deduped = [pixels[0]]
        for p in pixels[1:]:
            if p != deduped[-1]:
                deduped.append(p)
        geo = tuple(self.scene.geo(p) for p in deduped)
        return Leg(path.cells, tuple(deduped), geo, polyline_length_m(geo))


def build_cost_matrix(grid: OccupancyGrid, scene: Scene):
    """Leg-length matrix (meters) over {home} + targets, plus the leg cache.

    Entry (a, b) is the flown length of the A* leg between the two nodes,
    so a tour's matrix length equals the realised mission length.
    """
    cache = leg_cache(scene, grid)
    return _leg_matrix(cache), cache


def _leg_matrix(cache: LegCache) -> np.ndarray:
    n = len(cache.scene.nodes)
    m = np.zeros((n, n))
    for a in range(n):
        for b in range(a + 1, n):
            m[a, b] = m[b, a] = cache.get(a, b).length_m
    return m


# ---------------------------------------------------------------------------
# mission assembly
# ---------------------------------------------------------------------------

def _finish(scene: Scene, mode: str, items: List[MissionItem], order: Sequence[int], legs=()) -> Mission:
    length = polyline_length_m([it.geo for it in items])
    visit = tuple(k - 1 for k in order[1:])
    return Mission(mode, tuple(items), length, visit, tuple(legs))


def _straight_mission(scene: Scene, mode: str, order: Sequence[int]) -> Mission:
    alt = scene.params.altitude_m
    home = scene.geo(scene.home)
    items = [MissionItem(ItemKind.TAKEOFF, home, alt)]
    for k in order[1:]:
        items.append(MissionItem(ItemKind.WAYPOINT, scene.geo(scene.nodes[k]), alt))
    items.append(MissionItem(ItemKind.RTL, home, 0.0))
    return _finish(scene, mode, items, order)


def _routed_mission(scene: Scene, mode: str, order: Sequence[int], cache: LegCache) -> Mission:
    alt = scene.params.altitude_m
    home = scene.geo(scene.home)
    anchors = cache.anchors
    items = [MissionItem(ItemKind.TAKEOFF, home, alt)]
    if len(order) == 1:
        items.append(MissionItem(ItemKind.RTL, home, 0.0))
        return _finish(scene, mode, items, order)
    if anchors.snapped[0]:
        items.append(MissionItem(ItemKind.PATHPOINT, scene.geo(anchors.points[0]), alt))
    legs = []
    closed = list(order) + [0]
    for a, b in zip(closed[:-1], closed[1:]):
        leg = cache.get(a, b)
        legs.append(leg.cells)
        # first vertex is the previous item's anchor; last is this node's anchor
        for g in leg.geo[1:-1]:
            items.append(MissionItem(ItemKind.PATHPOINT, g, alt))
        if b == 0:
            if anchors.snapped[0]:
                items.append(MissionItem(ItemKind.PATHPOINT, leg.geo[-1], alt))
            items.append(MissionItem(ItemKind.RTL, home, 0.0))
            continue
        if anchors.snapped[b]:
            # fly to the snapped cell, mark the visit at the true target, come back out
            items.append(MissionItem(ItemKind.PATHPOINT, leg.geo[-1], alt))
            items.append(MissionItem(ItemKind.WAYPOINT, scene.geo(scene.nodes[b]), alt))
            items.append(MissionItem(ItemKind.PATHPOINT, leg.geo[-1], alt))
        else:
            items.append(MissionItem(ItemKind.WAYPOINT, leg.geo[-1], alt))
    return _finish(scene, mode, items, order, legs)


def straight_cost_matrix(scene: Scene) -> np.ndarray:
    pts = [scene.geo(p) for p in scene.nodes]
    n = len(pts)
    m = np.zeros((n, n))
    for a in range(n):
        for b in range(a + 1, n):
            m[a, b] = m[b, a] = haversine_m(pts[a], pts[b])
    return m


def _initial_order(m: np.ndarray, init: str) -> List[int]:
    if init == "input":
        return list(range(m.shape[0]))
    if init == "nn":
        return nearest_neighbor_init(m)
    raise ValueError(f"unknown initialisation {init!r} (expected 'input' or 'nn')")


def plan_input_order(scene: Scene) -> Mission:
    """Straight legs in detection order: the unoptimised reference route."""
    return _straight_mission(scene, "reference", list(range(len(scene.nodes))))


def plan_tsp_euclid(scene: Scene, init: str = "input") -> Mission:
    m = straight_cost_matrix(scene)
    tour = two_opt(m, _initial_order(m, init))
    return _straight_mission(scene, "tsp-euclid", tour.order)


def leg_cache(scene: Scene, grid: Optional[OccupancyGrid] = None) -> LegCache:
    """Empty leg cache for ``scene``; raises if an endpoint cannot be placed."""
    grid = scene_grid(scene) if grid is None else grid
    return LegCache(scene, grid, _anchors(scene, grid))


def plan_astar_seq(scene: Scene, cache: Optional[LegCache] = None) -> Mission:
    cache = leg_cache(scene) if cache is None else cache
    return _routed_mission(scene, "astar-seq", list(range(len(scene.nodes))), cache)


def plan_hybrid(scene: Scene, init: str = "input", cache: Optional[LegCache] = None) -> Mission:
    if cache is None:
        m, cache = build_cost_matrix(scene_grid(scene), scene)
    else:
        m = _leg_matrix(cache)
    tour = two_opt(m, _initial_order(m, init))
    return _routed_mission(scene, "hybrid", tour.order, cache)


def plan(scene: Scene, mode: str, init: str = "input") -> Mission:
    if mode == "tsp-euclid":
        return plan_tsp_euclid(scene, init)
    if mode == "astar-seq":
        return plan_astar_seq(scene)
    if mode == "hybrid":
        return plan_hybrid(scene, init)
    if mode == "reference":
        return plan_input_order(scene)
    raise ValueError(f"unknown mode {mode!r}; expected one of {MODES + ('reference',)}")


def with_params(scene: Scene, **changes) -> Scene:
    return replace(scene, params=replace(scene.params, **changes))
