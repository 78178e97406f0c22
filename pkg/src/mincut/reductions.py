"""Padberg-Rinaldi reduction runs.

An edge ``(v, w)`` that is not the only edge at either endpoint may be
contracted without losing the minimum cut when

1. ``c(v,w) >= lambda_hat``
2. ``c(v) <= 2 c(v,w)`` or ``c(w) <= 2 c(v,w)``
3. some common neighbor ``u`` has ``c(v) <= 2 (c(v,w) + c(v,u))`` and
   ``c(w) <= 2 (c(v,w) + c(w,u))``
4. ``c(v,w) + sum_u min(c(v,u), c(w,u)) >= lambda_hat``

Tests 1 and 4 lower-bound the v-w connectivity, so they stay valid however
the endpoints were merged earlier in the pass; the first pass therefore
compares ``lambda_hat`` with the weight from ``v`` into the whole supervertex
that ``w`` already belongs to. Tests 2 and 3 move ``v`` (or
``w``) across a cut and rely on the trivial cut of that vertex being no
smaller than ``lambda_hat``; they are only applied to endpoints that are
still unmerged in the current pass, where the degree is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit, prange

from ._threads import numba_threads
from .graph import Graph, UnionFind, _uf_find, _uf_union, contract_marked, min_degree

COND1, COND2, COND3, COND4 = 1, 2, 3, 4


@dataclass
class PrRunState:
    lambda_hat: int
    uf: UnionFind
    scanned: np.ndarray | None = None
    touches: int = 0
    marked: dict[int, int] = field(default_factory=lambda: {COND1: 0, COND2: 0, COND3: 0, COND4: 0})

    @classmethod
    def fresh(cls, g: Graph, lambda_hat: int) -> "PrRunState":
        return cls(int(lambda_hat), UnionFind(g.n))


@njit(cache=True, inline="always")
def _pass_12_decide(v, b, c, indptr, degrees, lam, parent, size, use_cond1):
    rv = _uf_find(parent, v)
    if _uf_find(parent, b) == rv:
        return 0
    single_b = size[b] == 1
    if single_b and indptr[b + 1] - indptr[b] < 2:
        return 0
    if use_cond1 and c >= lam:
        return 1
    if (size[rv] == 1 and degrees[v] <= 2 * c) or (single_b and degrees[b] <= 2 * c):
        return 2
    return 0


@njit(cache=True)
def _pass_12(indptr, indices, weights, degrees, lam, parent, size, use_cond1, counts):
    # v's row is summed per current supervertex B of the neighbors, so a merge
    # earlier in the pass is visible at once: c(v, B) lower-bounds the cut
    # between v's supervertex and B and is at least c(v, w) for any w in B.
    # A singleton B occurs once in the row and is decided on the spot.
    n = len(indptr) - 1
    acc = np.zeros(n, np.int64)
    touched = np.empty(n, np.int64)
    touches = 0
    unions = 0
    for v in range(n):
        lo = indptr[v]
        hi = indptr[v + 1]
        touches += hi - lo
        if hi - lo < 2:
            continue
        nt = 0
        for e in range(lo, hi):
            r = _uf_find(parent, indices[e])
            if size[r] > 1:
                if acc[r] == 0:
                    touched[nt] = r
                    nt += 1
                acc[r] += weights[e]
                continue
            c = weights[e]
            if not ((use_cond1 and c >= lam) or degrees[v] <= 2 * c or degrees[r] <= 2 * c):
                continue
            kind = _pass_12_decide(v, r, c, indptr, degrees, lam, parent, size, use_cond1)
            if kind:
                _uf_union(parent, size, _uf_find(parent, v), r)
                counts[kind] += 1
                unions += 1
        for t in range(nt):
            b = touched[t]
            c = acc[b]
            acc[b] = 0
            kind = _pass_12_decide(v, b, c, indptr, degrees, lam, parent, size, use_cond1)
            if kind:
                _uf_union(parent, size, _uf_find(parent, v), b)
                counts[kind] += 1
                unions += 1
    return unions, touches


@njit(cache=True)
def _examine_pair(v, w, cvw, indptr, indices, weights, degrees, lam, parent, stamp, mark, tag):
    """Conditions 3 and 4 for edge (v, w); N(v) must be stamped with ``tag``.

    Returns (cond3 witness or -1, cond4 holds, touches).
    """
    witness = -1
    total = cvw
    touches = 0
    rv = _uf_find(parent, v)
    rw = _uf_find(parent, w)
    for e in range(indptr[w], indptr[w + 1]):
        touches += 1
        u = indices[e]
        if u == v or stamp[u] != tag:
            continue
        cvu = mark[u]
        cwu = weights[e]
        total += min(cvu, cwu)
        if witness < 0 and degrees[v] <= 2 * (cvw + cvu) and degrees[w] <= 2 * (cvw + cwu):
            ru = _uf_find(parent, u)
            if ru != rv and ru != rw:
                witness = u
    return witness, total >= lam, touches


@njit(cache=True)
def _pass_34(indptr, indices, weights, degrees, lam, parent, size, scanned, counts):
    n = len(indptr) - 1
    stamp = np.full(n, -1, np.int64)
    mark = np.zeros(n, np.int64)
    touches = 0
    unions = 0
    for v in range(n):
        if scanned[v]:
            continue
        # stamp N(v) and pick its heaviest unscanned neighbor
        w = -1
        cvw = 0
        for e in range(indptr[v], indptr[v + 1]):
            touches += 1
            u = indices[e]
            stamp[u] = v
            mark[u] = weights[e]
            if not scanned[u] and weights[e] > cvw:
                cvw = weights[e]
                w = u
        scanned[v] = True
        if w < 0:
            continue
        scanned[w] = True
        if indptr[v + 1] - indptr[v] < 2 or indptr[w + 1] - indptr[w] < 2:
            continue
        witness, cond4, t = _examine_pair(v, w, cvw, indptr, indices, weights, degrees, lam, parent, stamp, mark, v)
        touches += t
        rv = _uf_find(parent, v)
        rw = _uf_find(parent, w)
        if rv == rw:
            continue
        if cond4:
            _uf_union(parent, size, rv, rw)
            counts[4] += 1
            unions += 1
        elif witness >= 0 and size[rv] == 1 and size[rw] == 1:
            _uf_union(parent, size, rv, rw)
            counts[3] += 1
            unions += 1
    return unions, touches


@njit(parallel=True, cache=True)
def _candidates_parallel(indptr, indices, weights, degrees, lam, parent, nchunks):
    """Conditions 3 and 4 evaluated concurrently on a snapshot.

    Each chunk owns a vertex range and the matching rows of the output, at
    most one candidate per vertex; the shared ``scanned`` flags are racy,
    which can only cause a pair to be examined twice. Candidates are
    ``(v, w, kind, witness)`` rows.
    """
    n = len(indptr) - 1
    bounds = np.empty(nchunks + 1, np.int64)
    for t in range(nchunks + 1):
        bounds[t] = t * n // nchunks
    out = np.full((n + 1, 4), -1, np.int64)
    used = np.zeros(nchunks, np.int64)
    scanned = np.zeros(n, np.bool_)
    for t in prange(nchunks):
        stamp = np.full(n, -1, np.int64)
        mark = np.zeros(n, np.int64)
        pos = bounds[t]
        for v in range(t * n // nchunks, (t + 1) * n // nchunks):
            if indptr[v + 1] - indptr[v] < 2:
                scanned[v] = True
                continue
            w = -1
            cvw = 0
            for e in range(indptr[v], indptr[v + 1]):
                u = indices[e]
                stamp[u] = v
                mark[u] = weights[e]
                if not scanned[u] and u != v and weights[e] > cvw:
                    cvw = weights[e]
                    w = u
            if scanned[v] or w < 0:
                scanned[v] = True
                continue
            scanned[v] = True
            scanned[w] = True
            if indptr[w + 1] - indptr[w] < 2 or cvw >= lam:
                continue
            witness, cond4, _ = _examine_pair(v, w, cvw, indptr, indices, weights, degrees, lam, parent, stamp, mark, v)
            if cond4 or witness >= 0:
                out[pos, 0] = v
                out[pos, 1] = w
                out[pos, 2] = 4 if cond4 else 3
                out[pos, 3] = witness
                pos += 1
        used[t] = pos - bounds[t]
    return out, bounds, used


@njit(cache=True)
def _apply_candidates(out, bounds, used, parent, size, counts):
    unions = 0
    for t in range(len(used)):
        for i in range(bounds[t], bounds[t] + used[t]):
            v = out[i, 0]
            w = out[i, 1]
            kind = out[i, 2]
            rv = _uf_find(parent, v)
            rw = _uf_find(parent, w)
            if rv == rw:
                continue
            if kind == 3:
                ru = _uf_find(parent, out[i, 3])
                if size[rv] != 1 or size[rw] != 1 or ru == rv or ru == rw:
                    continue
            _uf_union(parent, size, rv, rw)
            counts[kind] += 1
            unions += 1
    return unions


def _counts_array() -> np.ndarray:
    return np.zeros(5, dtype=np.int64)


def _merge_counts(state: PrRunState, counts: np.ndarray) -> None:
    for kind in (COND1, COND2, COND3, COND4):
        state.marked[kind] += int(counts[kind])


def pr_pass_12(g: Graph, state: PrRunState) -> int:
    """Union every edge passing condition 1 or 2. Returns the number of unions."""
    counts = _counts_array()
    unions, touches = _pass_12(
        g.indptr, g.indices, g.weights, g.degrees, state.lambda_hat,
        state.uf.parent, state.uf.size, True, counts,
    )
    state.uf.set_count -= int(unions)
    state.touches += int(touches)
    _merge_counts(state, counts)
    return int(unions)


def pr_pass_34(g: Graph, state: PrRunState) -> int:
    """Scan pairs of unscanned adjacent vertices over their common
    neighborhood and union those passing condition 3 or 4."""
    if state.scanned is None:
        state.scanned = np.zeros(g.n, dtype=np.bool_)
    counts = _counts_array()
    unions, touches = _pass_34(
        g.indptr, g.indices, g.weights, g.degrees, state.lambda_hat,
        state.uf.parent, state.uf.size, state.scanned, counts,
    )
    state.uf.set_count -= int(unions)
    state.touches += int(touches)
    _merge_counts(state, counts)
    return int(unions)


def _parallel_run_marks(g: Graph, state: PrRunState, threads: int) -> int:
    with numba_threads(threads) as t:
        out, bounds, used = _candidates_parallel(
            g.indptr, g.indices, g.weights, g.degrees, state.lambda_hat, state.uf.parent, t
        )
    counts = _counts_array()
    unions = _apply_candidates(out, bounds, used, state.uf.parent, state.uf.size, counts)
    # conditions 1 and 2 read supervertices built by earlier unions; sequential
    more, touches = _pass_12(
        g.indptr, g.indices, g.weights, g.degrees, state.lambda_hat,
        state.uf.parent, state.uf.size, True, counts,
    )
    state.uf.set_count -= int(unions + more)
    state.touches += int(touches)
    _merge_counts(state, counts)
    return int(unions + more)


@dataclass
class PrRunResult:
    graph: Graph
    lambda_hat: int
    mapping: np.ndarray  # input vertex -> output vertex
    cut_side: np.ndarray | None  # realises lambda_hat on the input graph when it improved
    runs: int
    contracted: int
    marked: dict[int, int]
    touches: list[int]

    def __iter__(self):
        return iter((self.graph, self.lambda_hat, self.mapping))


def pr_run(g: Graph, lambda_hat: int, n0: int = 2, threads: int = 1) -> PrRunResult:
    """Repeat Padberg-Rinaldi runs until one contracts nothing or ``n <= n0``.

    Each run is pass 1/2 then pass 3/4 on a shared union-find, followed by a
    single contraction; ``lambda_hat`` is lowered to the contracted minimum
    degree after every run. ``min(result.lambda_hat, lambda(result.graph))``
    equals ``min(lambda_hat, lambda(g))``.
    """
    return _pr_run_owned([g], lambda_hat, n0, threads)


def _pr_run_owned(box: list, lambda_hat: int, n0: int, threads: int) -> PrRunResult:
    # the caller hands over its only reference in ``box`` so that a large
    # input can be freed as soon as the first run has contracted it
    g = box.pop()
    if g.n < 2:
        raise ValueError("pr_run needs at least two vertices")
    lam = int(lambda_hat)
    side = None
    v, d = min_degree(g)
    if d < lam:
        lam = d
        side = np.zeros(g.n, dtype=bool)
        side[v] = True

    mapping = np.arange(g.n, dtype=np.int64)
    cur, g = g, None
    runs = contracted = 0
    marked = {COND1: 0, COND2: 0, COND3: 0, COND4: 0}
    touches: list[int] = []
    while cur.n > max(n0, 1) and lam > 0:
        state = PrRunState.fresh(cur, lam)
        if threads > 1:
            _parallel_run_marks(cur, state, threads)
        else:
            pr_pass_12(cur, state)
            pr_pass_34(cur, state)
        runs += 1
        touches.append(state.touches)
        for kind, cnt in state.marked.items():
            marked[kind] += cnt
        if state.uf.set_count == cur.n:
            break
        contracted += cur.n - state.uf.set_count
        cur, level = contract_marked(cur, state.uf, threads)
        mapping = level[mapping]
        if cur.n >= 2:
            v, d = min_degree(cur)
            if d < lam:
                lam = d
                side = mapping == v
    return PrRunResult(cur, lam, mapping, side, runs, contracted, marked, touches)
