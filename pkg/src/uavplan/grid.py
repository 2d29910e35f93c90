"""Uniform occupancy grid over the scene image.

Cells are ``cell_size_px`` squares indexed ``(i, j)`` = (row, column).
A cell is blocked when its closed square footprint touches any obstacle;
the blocked set can then be dilated by a Chebyshev margin.
"""

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .errors import OutOfBoundsError
from .geo import PixelPoint


class CellIndex(NamedTuple):
    i: int
    j: int


@dataclass(frozen=True)
class GridSpec:
    width_px: float
    height_px: float
    cell_size_px: int = 5

    def __post_init__(self):
        if int(self.cell_size_px) != self.cell_size_px or self.cell_size_px < 1:
            raise ValueError(f"cell_size_px must be an integer >= 1, got {self.cell_size_px}")
        if self.width_px < self.cell_size_px or self.height_px < self.cell_size_px:
            raise ValueError("image must be at least one cell wide and tall")

    @property
    def rows(self) -> int:
        return math.ceil(self.height_px / self.cell_size_px)

    @property
    def cols(self) -> int:
        return math.ceil(self.width_px / self.cell_size_px)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols


@dataclass(frozen=True)
class Obstacle:
    """A polygon (``vertices``) or a disc (``center`` + ``radius_px``)."""

    kind: str
    vertices: Tuple[PixelPoint, ...] = ()
    center: Optional[PixelPoint] = None
    radius_px: float = 0.0

    def __post_init__(self):
        if self.kind == "polygon":
            verts = tuple(PixelPoint(float(x), float(y)) for x, y in self.vertices)
            object.__setattr__(self, "vertices", verts)
            if len(verts) < 3:
                raise ValueError("polygon obstacle needs at least 3 vertices")
            if not polygon_is_simple(verts):
                raise ValueError("polygon obstacle is not simple")
        elif self.kind == "disc":
            if self.center is None or not self.radius_px > 0:
                raise ValueError("disc obstacle needs a center and radius_px > 0")
            object.__setattr__(self, "center", PixelPoint(float(self.center[0]), float(self.center[1])))
        else:
            raise ValueError(f"unknown obstacle kind {self.kind!r}")

    @classmethod
    def polygon(cls, vertices):
        return cls("polygon", vertices=tuple(vertices))

    @classmethod
    def disc(cls, center, radius_px):
        return cls("disc", center=PixelPoint(*center), radius_px=float(radius_px))

    def bbox(self):
        """(xmin, ymin, xmax, ymax) in pixels."""
        if self.kind == "disc":
            cx, cy = self.center
            r = self.radius_px
            return cx - r, cy - r, cx + r, cy + r
        xs = [v.x for v in self.vertices]
        ys = [v.y for v in self.vertices]
        return min(xs), min(ys), max(xs), max(ys)

    def distance_to(self, p) -> float:
        """Euclidean pixel distance from ``p`` to the obstacle (0 inside)."""
        if self.kind == "disc":
            return max(0.0, math.hypot(p[0] - self.center.x, p[1] - self.center.y) - self.radius_px)
        if point_in_polygon(p, self.vertices):
            return 0.0
        n = len(self.vertices)
        return min(_point_segment_distance(p, self.vertices[k], self.vertices[(k + 1) % n])
                   for k in range(n))


# ---------------------------------------------------------------------------
# geometry predicates
# ---------------------------------------------------------------------------

def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _on_segment(p, a, b):
    return (min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
            and min(a[1], b[1]) <= p[1] <= max(a[1], b[1]))


def segments_intersect(p1, p2, q1, q2) -> bool:
    """Closed-segment intersection, collinear overlaps included."""
    d1 = _cross(q1, q2, p1)
    d2 = _cross(q1, q2, p2)
    d3 = _cross(p1, p2, q1)
    d4 = _cross(p1, p2, q2)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and \
            ((d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)):
        return True
    if d1 == 0 and _on_segment(p1, q1, q2):
        return True
    if d2 == 0 and _on_segment(p2, q1, q2):
        return True
    if d3 == 0 and _on_segment(q1, p1, p2):
        return True
    if d4 == 0 and _on_segment(q2, p1, p2):
        return True
    return False


def polygon_is_simple(vertices: Sequence) -> bool:
    n = len(vertices)
    edges = [(vertices[k], vertices[(k + 1) % n]) for k in range(n)]
    for a in range(n):
        if edges[a][0] == edges[a][1]:
            return False
        for b in range(a + 1, n):
            adjacent = b == a + 1 or (a == 0 and b == n - 1)
            if adjacent:
                # neighbours share one vertex; they may only overlap there
                shared = edges[a][1] if b == a + 1 else edges[a][0]
                other_a = edges[a][0] if b == a + 1 else edges[a][1]
                other_b = edges[b][1] if b == a + 1 else edges[b][0]
                if _cross(shared, other_a, other_b) == 0 and (
                        _on_segment(other_a, shared, other_b) or _on_segment(other_b, shared, other_a)):
                    return False
                continue
            if segments_intersect(*edges[a], *edges[b]):
                return False
    return True


def point_in_polygon(p, vertices) -> bool:
    """Even-odd ray cast; points exactly on the boundary may go either way."""
    x, y = p
    inside = False
    n = len(vertices)
    for k in range(n):
        x1, y1 = vertices[k]
        x2, y2 = vertices[(k + 1) % n]
        if (y1 > y) != (y2 > y):
            xc = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x < xc:
                inside = not inside
    return inside


def _point_segment_distance(p, a, b):
    dx, dy = b[0] - a[0], b[1] - a[1]
    seg2 = dx * dx + dy * dy
    t = 0.0 if seg2 == 0 else max(0.0, min(1.0, ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / seg2))
    return math.hypot(p[0] - (a[0] + t * dx), p[1] - (a[1] + t * dy))


def segment_hits_box(a, b, x0, y0, x1, y1) -> bool:
    """Liang-Barsky clip of segment ab against the closed box [x0,x1]x[y0,y1]."""
    dx, dy = b[0] - a[0], b[1] - a[1]
    t0, t1 = 0.0, 1.0
    for p, q in ((-dx, a[0] - x0), (dx, x1 - a[0]), (-dy, a[1] - y0), (dy, y1 - a[1])):
        if p == 0:
            if q < 0:
                return False
            continue
        r = q / p
        if p < 0:
            if r > t1:
                return False
            t0 = max(t0, r)
        else:
            if r < t0:
                return False
            t1 = min(t1, r)
    return t0 <= t1


def square_hits_disc(x0, y0, x1, y1, center, radius) -> bool:
    nx = min(max(center[0], x0), x1)
    ny = min(max(center[1], y0), y1)
    return (nx - center[0]) ** 2 + (ny - center[1]) ** 2 <= radius * radius


def square_hits_polygon(x0, y0, x1, y1, vertices) -> bool:
    # boundaries cross, or one shape contains the other
    n = len(vertices)
    for k in range(n):
        if segment_hits_box(vertices[k], vertices[(k + 1) % n], x0, y0, x1, y1):
            return True
    return point_in_polygon(((x0 + x1) / 2.0, (y0 + y1) / 2.0), vertices)


# ---------------------------------------------------------------------------
# grid
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class OccupancyGrid:
    spec: GridSpec
    blocked: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.array(self.blocked, dtype=bool, copy=True)
        if arr.shape != self.spec.shape:
            raise ValueError(f"blocked field shape {arr.shape} != grid shape {self.spec.shape}")
        arr.flags.writeable = False
        object.__setattr__(self, "blocked", arr)

    @property
    def rows(self) -> int:
        return self.spec.rows

    @property
    def cols(self) -> int:
        return self.spec.cols

    @cached_property
    def free_flat(self):
        """Row-major list of traversability flags, for tight search loops."""
        return (~self.blocked).ravel().tolist()

    @cached_property
    def vertex_count(self) -> int:
        return int((~self.blocked).sum())

    @cached_property
    def edge_count(self) -> int:
        """Directed edges of the 8-connected, no-corner-cutting graph."""
        free = ~self.blocked
        horiz = int((free[:, :-1] & free[:, 1:]).sum())
        vert = int((free[:-1, :] & free[1:, :]).sum())
        quad = free[:-1, :-1] & free[:-1, 1:] & free[1:, :-1] & free[1:, 1:]
        # each fully free 2x2 block carries both diagonals
        return 2 * (horiz + vert + 2 * int(quad.sum()))


def cell_bounds(spec: GridSpec, i: int, j: int):
    s = spec.cell_size_px
    return j * s, i * s, (j + 1) * s, (i + 1) * s


def _rasterize(spec: GridSpec, obstacle: Obstacle, out: np.ndarray):
    s = spec.cell_size_px
    xmin, ymin, xmax, ymax = obstacle.bbox()
    # closed squares: a shape touching a shared edge hits both neighbours
    j0 = max(0, math.floor(xmin / s) - 1)
    i0 = max(0, math.floor(ymin / s) - 1)
    j1 = min(spec.cols - 1, math.floor(xmax / s))
    i1 = min(spec.rows - 1, math.floor(ymax / s))
    for i in range(i0, i1 + 1):
        for j in range(j0, j1 + 1):
            if out[i, j]:
                continue
            x0, y0, x1, y1 = j * s, i * s, (j + 1) * s, (i + 1) * s
            if obstacle.kind == "disc":
                hit = square_hits_disc(x0, y0, x1, y1, obstacle.center, obstacle.radius_px)
            else:
                hit = square_hits_polygon(x0, y0, x1, y1, obstacle.vertices)
            if hit:
                out[i, j] = True


def dilate(blocked: np.ndarray, margin: int) -> np.ndarray:
    """Chebyshev dilation by ``margin`` cells (separable row/column max)."""
    out = np.array(blocked, dtype=bool)
    if margin <= 0:
        return out
    for axis in (0, 1):
        acc = out.copy()
        n = out.shape[axis]
        for d in range(1, min(margin, n - 1) + 1):
            if axis == 0:
                acc[d:, :] |= out[:-d, :]
                acc[:-d, :] |= out[d:, :]
            else:
                acc[:, d:] |= out[:, :-d]
                acc[:, :-d] |= out[:, d:]
        out = acc
    return out


def build_grid(spec: GridSpec, obstacles=(), margin_cells: int = 0) -> OccupancyGrid:
    if margin_cells < 0:
        raise ValueError("margin_cells must be >= 0")
    blocked = np.zeros(spec.shape, dtype=bool)
    for ob in obstacles:
        _rasterize(spec, ob, blocked)
    return OccupancyGrid(spec, dilate(blocked, margin_cells))


def cell_of(spec: GridSpec, p) -> CellIndex:
    x, y = p
    if not (0 <= x < spec.width_px and 0 <= y < spec.height_px):
        raise OutOfBoundsError(f"point ({x}, {y}) outside the {spec.width_px}x{spec.height_px} image")
    return CellIndex(int(y // spec.cell_size_px), int(x // spec.cell_size_px))


def center_of(spec: GridSpec, c) -> PixelPoint:
    i, j = c
    if not (0 <= i < spec.rows and 0 <= j < spec.cols):
        raise OutOfBoundsError(f"cell {tuple(c)} outside the {spec.rows}x{spec.cols} grid")
    s = spec.cell_size_px
    return PixelPoint((j + 0.5) * s, (i + 0.5) * s)


def in_range(grid: OccupancyGrid, c) -> bool:
    return 0 <= c[0] < grid.rows and 0 <= c[1] < grid.cols


def is_traversable(grid: OccupancyGrid, c) -> bool:
    i, j = c
    if not (0 <= i < grid.rows and 0 <= j < grid.cols):
        return False
    return not grid.blocked[i, j]
