"""Weighted undirected graphs in compressed adjacency form, contraction and cuts.

A :class:`Graph` stores each undirected edge twice (once per endpoint) in
CSR arrays: ``indptr`` (int64, length n+1), ``indices`` (int32 neighbor ids)
and ``weights`` (int64). Graphs are immutable; every contraction builds a new
graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from numba import njit, prange

INDEX_DTYPE = np.int32
WEIGHT_DTYPE = np.int64


class DegenerateCutError(ValueError):
    """Raised when a bipartition has an empty side."""


# ---------------------------------------------------------------------------
# numba kernels
# ---------------------------------------------------------------------------


@njit(cache=True)
def _csr_from_edges(n, src, dst, w):
    """CSR arrays from undirected edges; each edge is stored in both rows."""
    indptr = np.zeros(n + 1, np.int64)
    for i in range(len(src)):
        indptr[src[i] + 1] += 1
        indptr[dst[i] + 1] += 1
    for v in range(n):
        indptr[v + 1] += indptr[v]
    cursor = indptr[:-1].copy()
    indices = np.empty(indptr[n], np.int32)
    weights = np.empty(indptr[n], np.int64)
    for i in range(len(src)):
        a = src[i]
        b = dst[i]
        indices[cursor[a]] = b
        weights[cursor[a]] = w[i]
        cursor[a] += 1
        indices[cursor[b]] = a
        weights[cursor[b]] = w[i]
        cursor[b] += 1
    return indptr, indices, weights


@njit(cache=True)
def _row_sums(indptr, weights):
    n = len(indptr) - 1
    out = np.zeros(n, np.int64)
    for v in range(n):
        s = 0
        for e in range(indptr[v], indptr[v + 1]):
            s += weights[e]
        out[v] = s
    return out


@njit(cache=True)
def _upper_edges(indptr, indices, weights):
    n = len(indptr) - 1
    m = len(indices) // 2
    us = np.empty(m, np.int64)
    vs = np.empty(m, np.int64)
    ws = np.empty(m, np.int64)
    k = 0
    for v in range(n):
        for e in range(indptr[v], indptr[v + 1]):
            u = indices[e]
            if v < u:
                us[k] = v
                vs[k] = u
                ws[k] = weights[e]
                k += 1
    return us[:k], vs[:k], ws[:k]


@njit(cache=True)
def _dense_relabel(labels):
    """Map arbitrary non-negative labels onto 0..k-1 preserving label order."""
    hi = 0
    for x in labels:
        if x > hi:
            hi = x
    rank = np.zeros(hi + 2, np.int64)
    for x in labels:
        rank[x + 1] = 1
    for i in range(hi + 1):
        rank[i + 1] += rank[i]
    out = np.empty(len(labels), np.int64)
    for i in range(len(labels)):
        out[i] = rank[labels[i]]
    return out, rank[hi + 1]


@njit(cache=True)
def _uf_find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


@njit(cache=True)
def _uf_union(parent, size, a, b):
    """Union by size. Returns True when two distinct sets were merged."""
    ra = _uf_find(parent, a)
    rb = _uf_find(parent, b)
    if ra == rb:
        return False
    if size[ra] < size[rb] or (size[ra] == size[rb] and rb < ra):
        ra, rb = rb, ra
    parent[rb] = ra
    size[ra] += size[rb]
    return True


@njit(cache=True)
def _uf_roots(parent):
    out = np.empty(len(parent), np.int64)
    for i in range(len(parent)):
        out[i] = _uf_find(parent, i)
    return out


@njit(cache=True)
def _cluster_members(cid, k):
    """Vertices grouped by cluster: ``members[start[c]:start[c+1]]``."""
    n = len(cid)
    start = np.zeros(k + 1, np.int64)
    for v in range(n):
        start[cid[v] + 1] += 1
    for c in range(k):
        start[c + 1] += start[c]
    members = np.empty(n, np.int64)
    fill = start[:-1].copy()
    for v in range(n):
        members[fill[cid[v]]] = v
        fill[cid[v]] += 1
    return start, members


@njit(cache=True)
def _contract_by_cluster(indptr, indices, weights, cid, k):
    """Coarse CSR, one row per cluster, built cluster by cluster.

    ``slot[d]`` remembers where cluster ``d`` was last written; a slot inside
    the current row means the entry already exists and is accumulated. A
    lone vertex whose neighbors are all lone vertices keeps its row as is,
    relabelled, which is the common case after a few PR unions.
    """
    start, members = _cluster_members(cid, k)
    lone = np.empty(k, np.bool_)
    for c in range(k):
        lone[c] = start[c + 1] - start[c] == 1
    slot = np.full(k, -1, np.int64)
    out_ptr = np.zeros(k + 1, np.int64)
    out_idx = np.empty(len(indices), np.int32)
    out_w = np.empty(len(indices), np.int64)
    pos = 0
    for c in range(k):
        row = pos
        if lone[c]:
            v = members[start[c]]
            plain = True
            for e in range(indptr[v], indptr[v + 1]):
                d = cid[indices[e]]
                if not lone[d]:
                    plain = False
                    break
                out_idx[pos] = d
                out_w[pos] = weights[e]
                pos += 1
            if plain:
                out_ptr[c + 1] = pos
                continue
            pos = row
        for j in range(start[c], start[c + 1]):
            v = members[j]
            for e in range(indptr[v], indptr[v + 1]):
                d = cid[indices[e]]
                if d == c:
                    continue
                s = slot[d]
                if s >= row:
                    out_w[s] += weights[e]
                else:
                    slot[d] = pos
                    out_idx[pos] = d
                    out_w[pos] = weights[e]
                    pos += 1
        out_ptr[c + 1] = pos
    return out_ptr, out_idx[:pos], out_w[:pos]


@njit(cache=True)
def _dense_to_csr(mat):
    k = mat.shape[0]
    out_ptr = np.zeros(k + 1, np.int64)
    for a in range(k):
        cnt = 0
        for b in range(k):
            if mat[a, b] != 0:
                cnt += 1
        out_ptr[a + 1] = out_ptr[a] + cnt
    out_idx = np.empty(out_ptr[k], np.int32)
    out_w = np.empty(out_ptr[k], np.int64)
    pos = 0
    for a in range(k):
        for b in range(k):
            if mat[a, b] != 0:
                out_idx[pos] = b
                out_w[pos] = mat[a, b]
                pos += 1
    return out_ptr, out_idx, out_w


@njit(cache=True)
def _contract_dense(indptr, indices, weights, cid, k):
    """Coarse CSR via a k-by-k accumulator; used when k*k <= n."""
    n = len(cid)
    mat = np.zeros((k, k), np.int64)
    for v in range(n):
        a = cid[v]
        for e in range(indptr[v], indptr[v + 1]):
            b = cid[indices[e]]
            if a != b:
                mat[a, b] += weights[e]
    return _dense_to_csr(mat)


@njit(parallel=True, cache=True)
def _contract_dense_parallel(indptr, indices, weights, cid, k, nchunks):
    """Per-thread k-by-k temporaries over vertex ranges, merged by one thread."""
    n = len(cid)
    mats = np.zeros((nchunks, k, k), np.int64)
    for t in prange(nchunks):
        lo = t * n // nchunks
        hi = (t + 1) * n // nchunks
        for v in range(lo, hi):
            a = cid[v]
            for e in range(indptr[v], indptr[v + 1]):
                b = cid[indices[e]]
                if a != b:
                    mats[t, a, b] += weights[e]
    total = mats[0].copy()
    for t in range(1, nchunks):
        total += mats[t]
    return _dense_to_csr(total)


@njit(parallel=True, cache=True)
def _contract_by_cluster_parallel(indptr, indices, weights, cid, k, nchunks):
    """Cluster-level parallel contraction: count pass, prefix sum, fill pass."""
    start, members = _cluster_members(cid, k)

    counts = np.zeros(k + 1, np.int64)
    for t in prange(nchunks):
        seen = np.full(k, -1, np.int64)
        for c in range(t * k // nchunks, (t + 1) * k // nchunks):
            cnt = 0
            for j in range(start[c], start[c + 1]):
                v = members[j]
                for e in range(indptr[v], indptr[v + 1]):
                    d = cid[indices[e]]
                    if d != c and seen[d] != c:
                        seen[d] = c
                        cnt += 1
            counts[c + 1] = cnt
    for c in range(k):
        counts[c + 1] += counts[c]
    out_idx = np.empty(counts[k], np.int32)
    out_w = np.empty(counts[k], np.int64)
    for t in prange(nchunks):
        slot = np.full(k, -1, np.int64)
        for c in range(t * k // nchunks, (t + 1) * k // nchunks):
            pos = counts[c]
            for j in range(start[c], start[c + 1]):
                v = members[j]
                for e in range(indptr[v], indptr[v + 1]):
                    d = cid[indices[e]]
                    if d == c:
                        continue
                    if slot[d] < counts[c] or slot[d] >= pos:
                        slot[d] = pos
                        out_idx[pos] = d
                        out_w[pos] = weights[e]
                        pos += 1
                    else:
                        out_w[slot[d]] += weights[e]
    return counts, out_idx, out_w


@njit(cache=True)
def _cut_capacity(indptr, indices, weights, side):
    total = 0
    n = len(indptr) - 1
    for v in range(n):
        sv = side[v]
        for e in range(indptr[v], indptr[v + 1]):
            if side[indices[e]] != sv:
                total += weights[e]
    return total // 2


@njit(cache=True)
def _components(indptr, indices):
    n = len(indptr) - 1
    comp = np.full(n, -1, np.int64)
    stack = np.empty(n, np.int64)
    count = 0
    for s in range(n):
        if comp[s] >= 0:
            continue
        comp[s] = count
        top = 0
        stack[top] = s
        top += 1
        while top > 0:
            top -= 1
            v = stack[top]
            for e in range(indptr[v], indptr[v + 1]):
                u = indices[e]
                if comp[u] < 0:
                    comp[u] = count
                    stack[top] = u
                    top += 1
        count += 1
    return comp, count


@njit(cache=True)
def _induced(indptr, indices, weights, keep):
    """Subgraph on vertices with keep[v]; ids are renumbered densely in order."""
    n = len(indptr) - 1
    newid = np.full(n, -1, np.int64)
    k = 0
    for v in range(n):
        if keep[v]:
            newid[v] = k
            k += 1
    out_ptr = np.zeros(k + 1, np.int64)
    for v in range(n):
        if keep[v]:
            cnt = 0
            for e in range(indptr[v], indptr[v + 1]):
                if keep[indices[e]]:
                    cnt += 1
            out_ptr[newid[v] + 1] = cnt
    for i in range(k):
        out_ptr[i + 1] += out_ptr[i]
    out_idx = np.empty(out_ptr[k], np.int32)
    out_w = np.empty(out_ptr[k], np.int64)
    pos = 0
    for v in range(n):
        if keep[v]:
            for e in range(indptr[v], indptr[v + 1]):
                u = indices[e]
                if keep[u]:
                    out_idx[pos] = newid[u]
                    out_w[pos] = weights[e]
                    pos += 1
    return out_ptr, out_idx, out_w


# ---------------------------------------------------------------------------
# Data types
# ---------------------------------------------------------------------------


class Graph:
    """Immutable weighted undirected graph (CSR, both edge directions stored)."""

    __slots__ = ("indptr", "indices", "weights", "degrees")

    def __init__(self, indptr, indices, weights, degrees=None):
        self.indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        self.indices = np.ascontiguousarray(indices, dtype=INDEX_DTYPE)
        self.weights = np.ascontiguousarray(weights, dtype=WEIGHT_DTYPE)
        if degrees is None:
            degrees = _row_sums(self.indptr, self.weights)
        self.degrees = np.ascontiguousarray(degrees, dtype=WEIGHT_DTYPE)
        for arr in (self.indptr, self.indices, self.weights, self.degrees):
            arr.flags.writeable = False

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(np.zeros(n + 1, np.int64), np.empty(0, INDEX_DTYPE), np.empty(0, WEIGHT_DTYPE))

    @property
    def n(self) -> int:
        return len(self.indptr) - 1

    @property
    def m(self) -> int:
        """Number of undirected edges."""
        return len(self.indices) // 2

    def neighbors(self, v: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.indptr[v], self.indptr[v + 1]
        return self.indices[lo:hi], self.weights[lo:hi]

    def neighbor_counts(self) -> np.ndarray:
        return np.diff(self.indptr)

    def edges(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Undirected edges as ``(u, v, w)`` arrays with ``u < v``."""
        return _upper_edges(self.indptr, self.indices, self.weights)

    def total_weight(self) -> int:
        return int(self.weights.sum()) // 2

    def canonical(self) -> tuple[int, np.ndarray, np.ndarray, np.ndarray]:
        u, v, w = self.edges()
        order = np.lexsort((v, u))
        return self.n, u[order], v[order], w[order]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        if self.n != other.n or self.m != other.m:
            return False
        a, b = self.canonical(), other.canonical()
        return all(np.array_equal(x, y) for x, y in zip(a[1:], b[1:]))

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


class UnionFind:
    """Disjoint sets with path compression and union by size."""

    __slots__ = ("parent", "size", "set_count")

    def __init__(self, n: int):
        self.parent = np.arange(n, dtype=np.int64)
        self.size = np.ones(n, dtype=np.int64)
        self.set_count = n

    def find(self, x: int) -> int:
        return int(_uf_find(self.parent, x))

    def union(self, a: int, b: int) -> bool:
        merged = bool(_uf_union(self.parent, self.size, a, b))
        if merged:
            self.set_count -= 1
        return merged

    def roots(self) -> np.ndarray:
        return _uf_roots(self.parent)

    def recount(self) -> int:
        """Resynchronise ``set_count`` after kernels mutated the arrays directly."""
        self.set_count = int(np.count_nonzero(self.roots() == np.arange(len(self.parent))))
        return self.set_count


@dataclass
class ContractionMap:
    """Stack of per-level maps, each sending finer vertex ids to coarser ones."""

    levels: list[np.ndarray] = field(default_factory=list)

    def append(self, level: np.ndarray) -> None:
        self.levels.append(np.asarray(level, dtype=np.int64))

    def __len__(self) -> int:
        return len(self.levels)

    def compose(self, depth: int | None = None) -> np.ndarray | None:
        """Direct map from level-0 ids to ids at ``depth`` (None if no levels)."""
        depth = len(self.levels) if depth is None else depth
        if depth == 0:
            return None
        out = self.levels[0]
        for level in self.levels[1:depth]:
            out = level[out]
        return out

    def lift(self, marker: np.ndarray, depth: int | None = None) -> np.ndarray:
        """Push a per-vertex array at ``depth`` back to the original vertices."""
        depth = len(self.levels) if depth is None else depth
        out = np.asarray(marker)
        for level in reversed(self.levels[:depth]):
            out = out[level]
        return out


@dataclass
class CutResult:
    value: int
    side: np.ndarray  # bool per original vertex, True = side A
    degenerate: bool = False

    def side_a(self) -> np.ndarray:
        return np.flatnonzero(self.side)

    def side_b(self) -> np.ndarray:
        return np.flatnonzero(~self.side)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def graph_from_arrays(n: int, u, v, w, *, assume_simple: bool = False) -> Graph:
    """Vectorised constructor: merges parallel edges and drops self-loops.

    With ``assume_simple`` the caller guarantees no loops/duplicates and the
    merge step is skipped.
    """
    if n < 0:
        raise ValueError("vertex count must be non-negative")
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    w = np.asarray(w, dtype=np.int64)
    if not (len(u) == len(v) == len(w)):
        raise ValueError("edge arrays differ in length")
    if len(u):
        if u.min() < 0 or v.min() < 0 or u.max() >= n or v.max() >= n:
            raise ValueError(f"vertex id out of range [0, {n})")
        if w.min() < 1:
            raise ValueError("edge weights must be positive integers")
    if not assume_simple and len(u):
        keep = u != v
        a = np.minimum(u[keep], v[keep])
        b = np.maximum(u[keep], v[keep])
        w = w[keep]
        key = a * n + b
        order = np.argsort(key, kind="stable")
        key = key[order]
        w = w[order]
        first = np.ones(len(key), dtype=bool)
        first[1:] = key[1:] != key[:-1]
        starts = np.flatnonzero(first)
        if len(starts):
            w = np.add.reduceat(w, starts)
            key = key[starts]
        u, v = key // n, key % n
    indptr, indices, weights = _csr_from_edges(n, u, v, w)
    return Graph(indptr, indices, weights)


def build_graph(edges: Iterable[Sequence[int]], n: int | None = None) -> Graph:
    """Graph from ``(u, v, weight)`` triples.

    ``n`` defaults to one past the largest id. Parallel edges are merged with
    summed weight and self-loops are dropped.

    >>> build_graph([(0, 1, 2), (0, 1, 3)]).weights.tolist()
    [5, 5]
    """
    arr = np.asarray(list(edges), dtype=np.int64).reshape(-1, 3)
    if n is None:
        n = int(arr[:, :2].max()) + 1 if len(arr) else 0
    bad = np.flatnonzero(arr[:, 2] < 1)
    if len(bad):
        u, v, w = arr[bad[0]]
        raise ValueError(f"edge ({u}, {v}) has non-positive weight {w}")
    return graph_from_arrays(n, arr[:, 0], arr[:, 1], arr[:, 2])


def min_degree(g: Graph) -> tuple[int, int]:
    """``(vertex, weighted degree)`` of a minimum-degree vertex, lowest id on ties."""
    if g.n < 1:
        raise ValueError("min_degree needs at least one vertex")
    v = int(np.argmin(g.degrees))
    return v, int(g.degrees[v])


def _contract(g: Graph, cid: np.ndarray, k: int, threads: int = 1) -> Graph:
    if threads > 1:
        from ._threads import numba_threads

        with numba_threads(threads) as t:
            if k * k <= g.n:
                arrays = _contract_dense_parallel(g.indptr, g.indices, g.weights, cid, k, t)
            else:
                arrays = _contract_by_cluster_parallel(g.indptr, g.indices, g.weights, cid, k, t)
    elif k * k <= g.n:
        arrays = _contract_dense(g.indptr, g.indices, g.weights, cid, k)
    else:
        arrays = _contract_by_cluster(g.indptr, g.indices, g.weights, cid, k)
    return Graph(*arrays)


def contract_clustering(g: Graph, labels, threads: int = 1) -> tuple[Graph, np.ndarray]:
    """Contract every block of a clustering into one vertex.

    ``labels`` is a per-vertex array of non-negative ids (or a Clustering).
    Coarse ids follow ascending label order. Returns the coarse graph and the
    fine-to-coarse map.
    """
    labels = getattr(labels, "label", labels)
    labels = np.asarray(labels, dtype=np.int64)
    if len(labels) != g.n:
        raise ValueError("labels must cover every vertex")
    if g.n == 0:
        return Graph.empty(0), labels
    cid, k = _dense_relabel(labels)
    return _contract(g, cid, int(k), threads), cid


def contract_marked(g: Graph, uf: UnionFind, threads: int = 1) -> tuple[Graph, np.ndarray]:
    """Contract each union-find set into one vertex."""
    return contract_clustering(g, uf.roots(), threads)


def cut_capacity(g: Graph, side_marker) -> int:
    """Total weight of edges crossing the bipartition given by ``side_marker``."""
    side = np.asarray(side_marker, dtype=bool)
    if len(side) != g.n:
        raise ValueError("side marker must cover every vertex")
    if side.all() or not side.any():
        raise DegenerateCutError("one side of the cut is empty")
    return int(_cut_capacity(g.indptr, g.indices, g.weights, side))


def connected_components(g: Graph) -> tuple[np.ndarray, int]:
    """Component label per vertex; labels are numbered by smallest member id."""
    comp, count = _components(g.indptr, g.indices)
    return comp, int(count)


def induced_subgraph(g: Graph, keep) -> tuple[Graph, np.ndarray]:
    """Subgraph on ``keep`` (bool mask); returns it and the new-to-old id map."""
    keep = np.asarray(keep, dtype=bool)
    return Graph(*_induced(g.indptr, g.indices, g.weights, keep)), np.flatnonzero(keep)


def largest_component(g: Graph) -> tuple[Graph, np.ndarray]:
    """Largest connected component, densely relabelled, with new-to-old ids.

    Ties go to the component holding the smallest original id.
    """
    if g.n == 0:
        return g, np.empty(0, np.int64)
    comp, count = connected_components(g)
    sizes = np.bincount(comp, minlength=count)
    return induced_subgraph(g, comp == int(np.argmax(sizes)))
