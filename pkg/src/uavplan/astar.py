"""8-connected A* over an OccupancyGrid.

Orthogonal steps cost 1 and diagonal steps sqrt(2). Diagonal moves may not
cut corners: both orthogonal neighbours must be traversable. Path costs are
kept as integer (orthogonal, diagonal) step counts so equal-cost paths
always compare bit-identical, whatever order their steps were summed in.
"""

import heapq
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .errors import InvalidEndpointError
from .grid import CellIndex, OccupancyGrid, is_traversable

SQRT2 = math.sqrt(2.0)
_OCTILE_K = SQRT2 - 1.0

# (di, dj, diagonal)
_MOVES = (
    (-1, 0, False), (1, 0, False), (0, -1, False), (0, 1, False),
    (-1, -1, True), (-1, 1, True), (1, -1, True), (1, 1, True),
)


@dataclass(frozen=True)
class CellPath:
    cells: Tuple[CellIndex, ...]
    orthogonal_steps: int
    diagonal_steps: int

    @property
    def cost(self) -> float:
        return step_cost(self.orthogonal_steps, self.diagonal_steps)

    def __len__(self):
        return len(self.cells)


@dataclass(frozen=True)
class SearchStats:
    expanded_nodes: int
    generated_edges: int
    grid_vertices: int
    grid_edges_bound: int


def step_cost(orthogonal: int, diagonal: int) -> float:
    return orthogonal + diagonal * SQRT2


def heuristic(a, b) -> float:
    """Octile distance; admissible and consistent for 1/sqrt(2) step costs."""
    di = abs(a[0] - b[0])
    dj = abs(a[1] - b[1])
    if di > dj:
        return di + _OCTILE_K * dj
    return dj + _OCTILE_K * di


def astar(grid: OccupancyGrid, start, goal) -> Tuple[Optional[CellPath], SearchStats]:
    """Minimum-cost path from ``start`` to ``goal``.

    Returns ``(path, stats)``; ``path`` is None when the goal is unreachable.
    Among equal f-values the deeper node (larger g) is popped first, then
    the lexicographically smallest (i, j), so results never depend on
    insertion order.
    """
    for name, c in (("start", start), ("goal", goal)):
        if not is_traversable(grid, c):
            raise InvalidEndpointError(f"{name} cell {tuple(c)} is blocked or out of range")

    rows, cols = grid.rows, grid.cols
    free = grid.free_flat
    si, sj = start
    gi, gj = goal
    s_idx = si * cols + sj
    g_idx = gi * cols + gj

    n_orth = {s_idx: 0}
    n_diag = {s_idx: 0}
    parent = {s_idx: -1}
    closed = set()
    expanded = 0
    generated = 0

    h0 = heuristic(start, goal)
    heap = [(h0, -0.0, si, sj)]
    found = False
    while heap:
        f, neg_g, i, j = heapq.heappop(heap)
        idx = i * cols + j
        if idx in closed:
            continue
        closed.add(idx)
        expanded += 1
        if idx == g_idx:
            found = True
            break
        o, d = n_orth[idx], n_diag[idx]
        for di, dj, diag in _MOVES:
            ni, nj = i + di, j + dj
            if ni < 0 or nj < 0 or ni >= rows or nj >= cols:
                continue
            nidx = ni * cols + nj
            if not free[nidx]:
                continue
            if diag and not (free[ni * cols + j] and free[i * cols + nj]):
                continue
            generated += 1
            if nidx in closed:
                continue
            if diag:
                no, nd = o, d + 1
            else:
                no, nd = o + 1, d
            g_new = no + nd * SQRT2
            if nidx in n_orth and n_orth[nidx] + n_diag[nidx] * SQRT2 <= g_new:
                continue
            n_orth[nidx] = no
            n_diag[nidx] = nd
            parent[nidx] = idx
            heapq.heappush(heap, (g_new + heuristic((ni, nj), goal), -g_new, ni, nj))

    stats = SearchStats(
        expanded_nodes=expanded,
        generated_edges=generated,
        grid_vertices=grid.vertex_count,
        grid_edges_bound=grid.edge_count,
    )
    if not found:
        return None, stats

    cells: List[CellIndex] = []
    idx = g_idx
    while idx != -1:
        cells.append(CellIndex(idx // cols, idx % cols))
        idx = parent[idx]
    cells.reverse()
    return CellPath(tuple(cells), n_orth[g_idx], n_diag[g_idx]), stats


def prune_collinear(path) -> List[CellIndex]:
    """Keep endpoints and the cells where the step direction changes."""
    cells = list(path.cells if isinstance(path, CellPath) else path)
    if len(cells) <= 2:
        return cells
    kept = [cells[0]]
    for k in range(1, len(cells) - 1):
        a, b, c = cells[k - 1], cells[k], cells[k + 1]
        if (b[0] - a[0], b[1] - a[1]) != (c[0] - b[0], c[1] - b[1]):
            kept.append(b)
    kept.append(cells[-1])
    return kept


def expand_pruned(points) -> List[CellIndex]:
    """Re-expand a pruned waypoint list into unit 8-connected steps."""
    out = [CellIndex(*points[0])]
    for a, b in zip(points[:-1], points[1:]):
        di, dj = b[0] - a[0], b[1] - a[1]
        n = max(abs(di), abs(dj))
        if n == 0:
            continue
        if di not in (0, n, -n) or dj not in (0, n, -n):
            raise ValueError(f"segment {tuple(a)} -> {tuple(b)} is not a straight 8-direction run")
        si, sj = di // n, dj // n
        for k in range(1, n + 1):
            out.append(CellIndex(a[0] + k * si, a[1] + k * sj))
    return out
