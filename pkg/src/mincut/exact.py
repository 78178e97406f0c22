"""Exact and approximate global minimum cut solvers.

``noi_mincut`` is the production exact solver. ``stoer_wagner`` and
``brute_force_mincut`` are independent oracles (dense matrix and full
enumeration respectively) and share no code with it. ``matula_approx``
reuses the scan with a looser contraction threshold.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
from numba import njit

from .graph import (
    ContractionMap,
    CutResult,
    Graph,
    UnionFind,
    _uf_union,
    connected_components,
    contract_marked,
    min_degree,
)

BRUTE_FORCE_MAX_N = 24
STOER_WAGNER_MAX_N = 5000
MATULA_SCALE = 1000


# ---------------------------------------------------------------------------
# addressable binary max-heap keyed by int64
# ---------------------------------------------------------------------------


@njit(cache=True)
def _heap_up(heap, pos, key, i):
    v = heap[i]
    kv = key[v]
    while i > 0:
        p = (i - 1) >> 1
        u = heap[p]
        if key[u] >= kv:
            break
        heap[i] = u
        pos[u] = i
        i = p
    heap[i] = v
    pos[v] = i


@njit(cache=True)
def _heap_down(heap, pos, key, i, size):
    v = heap[i]
    kv = key[v]
    while True:
        c = 2 * i + 1
        if c >= size:
            break
        if c + 1 < size and key[heap[c + 1]] > key[heap[c]]:
            c += 1
        u = heap[c]
        if key[u] <= kv:
            break
        heap[i] = u
        pos[u] = i
        i = c
    heap[i] = v
    pos[v] = i


@njit(cache=True)
def _capforest(indptr, indices, weights, lam, num, den, parent, size, q, record_q):
    """One maximum-adjacency scan from vertex 0.

    When vertex v is visited, every edge (v, u) to an unvisited u gets
    q = r(u) + c(v, u), a lower bound on the v-u connectivity, and r(u) is
    raised to q. Edges with q * num >= lambda_hat * den are unioned.
    Returns the number of unions.
    """
    n = len(indptr) - 1
    r = np.zeros(n, np.int64)
    visited = np.zeros(n, np.bool_)
    heap = np.empty(n, np.int64)
    pos = np.full(n, -1, np.int64)
    size_h = 1
    heap[0] = 0
    pos[0] = 0
    unions = 0
    bound = lam * den
    while size_h > 0:
        v = heap[0]
        pos[v] = -1
        size_h -= 1
        if size_h > 0:
            heap[0] = heap[size_h]
            pos[heap[0]] = 0
            _heap_down(heap, pos, r, 0, size_h)
        visited[v] = True
        for e in range(indptr[v], indptr[v + 1]):
            u = indices[e]
            if visited[u]:
                continue
            qu = r[u] + weights[e]
            if record_q:
                q[e] = qu
            if qu * num >= bound:
                if _uf_union(parent, size, v, u):
                    unions += 1
            r[u] = qu
            if pos[u] < 0:
                heap[size_h] = u
                pos[u] = size_h
                size_h += 1
            _heap_up(heap, pos, r, pos[u])
    return unions


def capforest_bounds(g: Graph) -> np.ndarray:
    """Per-adjacency-entry connectivity lower bounds from a single scan.

    Entries never assigned (edge scanned from its other endpoint) are -1.
    """
    q = np.full(len(g.indices), -1, dtype=np.int64)
    if g.n >= 1:
        uf = UnionFind(g.n)
        _capforest(g.indptr, g.indices, g.weights, np.iinfo(np.int64).max // 4, 1, 1,
                   uf.parent, uf.size, q, True)
    return q


def _degenerate(n: int) -> CutResult:
    return CutResult(0, np.ones(n, dtype=bool), degenerate=True)


def _disconnected(g: Graph) -> CutResult | None:
    comp, count = connected_components(g)
    if count > 1:
        return CutResult(0, comp == 0)
    return None


def _contracting_solver(g: Graph, num: int, den: int, stats: dict | None = None) -> CutResult:
    if g.n < 2:
        return _degenerate(g.n)
    split = _disconnected(g)
    if split is not None:
        return split
    cmap = ContractionMap()
    v, lam = min_degree(g)
    best_depth, best_vertex, best_n = 0, v, g.n
    cur = g
    scans = 0
    q_dummy = np.empty(0, dtype=np.int64)
    while cur.n > 2:
        uf = UnionFind(cur.n)
        unions = _capforest(cur.indptr, cur.indices, cur.weights, lam, num, den,
                            uf.parent, uf.size, q_dummy, False)
        scans += 1
        if unions == 0:
            raise RuntimeError("scan contracted no edge; graph invariants violated")
        uf.set_count -= int(unions)
        cur, level = contract_marked(cur, uf)
        cmap.append(level)
        if cur.n >= 2:
            v, d = min_degree(cur)
            if d < lam:
                lam, best_depth, best_vertex, best_n = d, len(cmap), v, cur.n
    if stats is not None:
        stats["scans"] = scans
        stats["levels"] = len(cmap)
    marker = np.zeros(best_n, dtype=bool)
    marker[best_vertex] = True
    return CutResult(int(lam), cmap.lift(marker, best_depth))


def noi_mincut(g: Graph, stats: dict | None = None) -> CutResult:
    """Exact minimum cut by repeated scans contracting edges with q >= lambda_hat.

    ``lambda_hat`` starts at the minimum degree and is lowered to the
    contracted graph's minimum degree after every round; the best trivial
    cut is lifted back to the input vertices. Disconnected input yields 0
    with the component of vertex 0 as side A.
    """
    return _contracting_solver(g, 1, 1, stats)


def _matula_ratio(epsilon: float) -> tuple[int, int]:
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    # floor keeps the effective epsilon <= the requested one
    eps_scaled = math.floor(Fraction(str(epsilon)) * MATULA_SCALE)
    if eps_scaled < 1:
        raise ValueError(f"epsilon below resolution 1/{MATULA_SCALE}")
    return 2 * MATULA_SCALE + eps_scaled, MATULA_SCALE


def matula_approx(g: Graph, epsilon: float = 0.1, stats: dict | None = None) -> CutResult:
    """(2+epsilon)-approximate minimum cut.

    Same scan as :func:`noi_mincut` but every edge with
    ``q >= lambda_hat / (2 + epsilon)`` is contracted, compared in scaled
    integers. The returned value is the capacity of the returned cut.
    """
    num, den = _matula_ratio(epsilon)
    if g.n >= 2:
        total = int(g.degrees.max(initial=0)) * g.n
        if total * num >= 2**62:
            raise OverflowError("edge weights too large for scaled comparison")
    return _contracting_solver(g, num, den, stats)


def stoer_wagner(g: Graph) -> CutResult:
    """Exact minimum cut with n-1 maximum-adjacency phases on a dense matrix.

    Intended as an oracle; memory is O(n^2) and graphs above
    ``STOER_WAGNER_MAX_N`` vertices are rejected.
    """
    n = g.n
    if n < 2:
        return _degenerate(n)
    if n > STOER_WAGNER_MAX_N:
        raise ValueError(f"stoer_wagner is a dense oracle; n={n} exceeds {STOER_WAGNER_MAX_N}")
    split = _disconnected(g)
    if split is not None:
        return split
    u, v, w = g.edges()
    mat = np.zeros((n, n), dtype=np.int64)
    mat[u, v] = w
    mat[v, u] = w
    owner = np.arange(n)  # original vertex -> surviving representative
    active = list(range(n))
    best_value, best_rep = None, None
    while len(active) > 1:
        idx = np.array(active)
        sub = mat[np.ix_(idx, idx)]
        conn = sub[0].copy()
        added = np.zeros(len(idx), dtype=bool)
        added[0] = True
        prev = last = 0
        cut_of_phase = 0
        for _ in range(1, len(idx)):
            masked = np.where(added, -1, conn)
            nxt = int(np.argmax(masked))
            cut_of_phase = int(conn[nxt])
            added[nxt] = True
            prev, last = last, nxt
            conn += sub[nxt]
        s, t = int(idx[prev]), int(idx[last])
        if best_value is None or cut_of_phase < best_value:
            best_value = cut_of_phase
            best_rep = owner == t
        mat[s, :] += mat[t, :]
        mat[:, s] += mat[:, t]
        mat[s, s] = 0
        mat[t, :] = 0
        mat[:, t] = 0
        owner[owner == t] = s
        active.remove(t)
    return CutResult(int(best_value), best_rep.copy())


def brute_force_mincut(g: Graph) -> CutResult:
    """Enumerate all 2^(n-1)-1 bipartitions with vertex 0 fixed on side A.

    Ties resolve to the lowest bitmask of side B over vertices 1..n-1.
    """
    n = g.n
    if n < 2:
        return _degenerate(n)
    if n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute force limited to n <= {BRUTE_FORCE_MAX_N}, got {n}")
    u, v, w = g.edges()
    total = 1 << (n - 1)
    best_value, best_mask = None, None
    shifts = np.arange(n, dtype=np.int64) - 1
    batch = 1 << 14
    for lo in range(1, total, batch):
        masks = np.arange(lo, min(lo + batch, total), dtype=np.int64)
        in_b = np.zeros((len(masks), n), dtype=bool)
        in_b[:, 1:] = (masks[:, None] >> shifts[None, 1:]) & 1
        cuts = (in_b[:, u] != in_b[:, v]).astype(np.int64) @ w if len(w) else np.zeros(len(masks), np.int64)
        i = int(np.argmin(cuts))
        if best_value is None or cuts[i] < best_value:
            best_value, best_mask = int(cuts[i]), int(masks[i])
    side = np.ones(n, dtype=bool)
    for x in range(1, n):
        if (best_mask >> (x - 1)) & 1:
            side[x] = False
    return CutResult(best_value, side)
