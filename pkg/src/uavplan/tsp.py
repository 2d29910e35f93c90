"""Closed-tour 2-opt local search with the depot pinned at position 0."""

import itertools
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

IMPROVEMENT_EPS = 1e-9
BRUTE_FORCE_MAX_N = 11


@dataclass(frozen=True)
class Tour:
    order: Tuple[int, ...]
    length_m: float


def as_cost_matrix(costs) -> np.ndarray:
    """Validate and return a symmetric, zero-diagonal, finite, non-negative matrix."""
    m = np.asarray(costs, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"cost matrix must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)) or np.any(m < 0):
        raise ValueError("cost matrix entries must be finite and >= 0")
    if np.any(np.diag(m) != 0):
        raise ValueError("cost matrix diagonal must be zero")
    if not np.allclose(m, m.T, rtol=0.0, atol=1e-9):
        raise ValueError("cost matrix must be symmetric")
    return m


def _check_order(n: int, order: Sequence[int]):
    if len(order) != n or sorted(order) != list(range(n)):
        raise ValueError(f"order {list(order)} is not a permutation of 0..{n - 1}")
    if n and order[0] != 0:
        raise ValueError("tour must start at the depot (node 0)")


def tour_length(costs, order: Sequence[int]) -> float:
    m = np.asarray(costs, dtype=float)
    n = m.shape[0]
    _check_order(n, order)
    if n <= 1:
        return 0.0
    total = 0.0
    for k in range(n - 1):
        total += m[order[k], order[k + 1]]
    return float(total + m[order[-1], order[0]])


def _best_move(c: List[List[float]], t: List[int]):
    """Best (delta, i, k) segment reversal of t[i..k], 1 <= i < k <= n-1."""
    n = len(t)
    best = (-IMPROVEMENT_EPS, -1, -1)
    for i in range(1, n - 1):
        a = t[i - 1]
        b = t[i]
        row_a = c[a]
        row_b = c[b]
        ab = row_a[b]
        for k in range(i + 1, n):
            x = t[k]
            y = t[(k + 1) % n]
            delta = row_a[x] + row_b[y] - ab - c[x][y]
            if delta < best[0]:
                best = (delta, i, k)
    return best


def two_opt(costs, initial: Sequence[int]) -> Tour:
    """Best-improvement 2-opt until no reversal gains more than 1e-9."""
    m = as_cost_matrix(costs)
    n = m.shape[0]
    _check_order(n, initial)
    t = list(initial)
    c = m.tolist()
    if n > 3:
        while True:
            delta, i, k = _best_move(c, t)
            if i < 0:
                break
            t[i:k + 1] = t[i:k + 1][::-1]
    return Tour(tuple(t), tour_length(m, t))


def is_two_opt_minimal(costs, order: Sequence[int], eps: float = IMPROVEMENT_EPS) -> bool:
    """True if no single segment reversal shortens the closed tour by more than eps."""
    m = np.asarray(costs, dtype=float)
    base = tour_length(m, order)
    n = len(order)
    for i in range(1, n - 1):
        for k in range(i + 1, n):
            cand = list(order[:i]) + list(order[i:k + 1])[::-1] + list(order[k + 1:])
            if tour_length(m, cand) < base - eps:
                return False
    return True


def nearest_neighbor_init(costs) -> List[int]:
    m = np.asarray(costs, dtype=float)
    n = m.shape[0]
    if n == 0:
        return []
    order = [0]
    unvisited = list(range(1, n))
    while unvisited:
        here = order[-1]
        # min() keeps the first of equal keys -> lowest index wins ties
        nxt = min(unvisited, key=lambda v: m[here, v])
        order.append(nxt)
        unvisited.remove(nxt)
    return order


def brute_force_tsp(costs) -> Tour:
    """Exhaustive optimum with the depot fixed; refuses n > 11."""
    m = as_cost_matrix(costs)
    n = m.shape[0]
    if n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute_force_tsp refuses n={n} > {BRUTE_FORCE_MAX_N}")
    if n <= 3:
        order = list(range(n))
        return Tour(tuple(order), tour_length(m, order))
    c = m.tolist()
    best_len = math.inf
    best = None
    for perm in itertools.permutations(range(1, n)):
        if perm[0] > perm[-1]:
            continue  # mirror image of an already-seen tour
        length = c[0][perm[0]]
        prev = perm[0]
        for v in perm[1:]:
            length += c[prev][v]
            prev = v
        length += c[prev][0]
        if length < best_len:
            best_len = length
            best = (0,) + perm
    return Tour(best, tour_length(m, best))
