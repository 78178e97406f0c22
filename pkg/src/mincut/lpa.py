"""Label propagation clustering and the misplaced-vertex correction."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from numba import njit, prange

from ._threads import numba_threads
from .graph import Graph, _cluster_members, _dense_relabel


@dataclass(frozen=True)
class LpaConfig:
    iterations: int = 2
    shuffle_block_size: int = 128
    singleton_guard: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("need at least one label propagation iteration")
        if self.shuffle_block_size < 1:
            raise ValueError("shuffle block size must be >= 1")

    def with_(self, **changes) -> "LpaConfig":
        return replace(self, **changes)


@dataclass
class Clustering:
    """Dense cluster labels ``0..cluster_count-1`` with per-cluster sizes."""

    label: np.ndarray
    cluster_count: int
    cluster_size: np.ndarray

    @classmethod
    def from_labels(cls, labels) -> "Clustering":
        labels = np.asarray(labels, dtype=np.int64)
        if len(labels) == 0:
            return cls(labels, 0, np.zeros(0, np.int64))
        dense, k = _dense_relabel(labels)
        return cls(dense, int(k), np.bincount(dense, minlength=int(k)))

    def __len__(self) -> int:
        return len(self.label)


def _u32_seeds(seed: int, count: int) -> np.ndarray:
    return np.random.SeedSequence(seed).generate_state(count, dtype=np.uint32)


@njit(cache=True)
def _block_shuffle(n, block, seed):
    np.random.seed(seed)
    order = np.arange(n)
    for lo in range(0, n, block):
        hi = min(lo + block, n)
        for i in range(hi - 1, lo, -1):
            j = lo + np.random.randint(0, i - lo + 1)
            tmp = order[i]
            order[i] = order[j]
            order[j] = tmp
    return order


def block_shuffled_order(n: int, block_size: int, seed: int) -> np.ndarray:
    """Permutation of ``range(n)``: blocks of ``block_size`` consecutive ids are
    shuffled internally and visited in their natural order."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return _block_shuffle(n, block_size, _u32_seeds(seed, 1)[0])


@njit(cache=True)
def _update_vertex(v, indptr, indices, weights, labels, acc, touched):
    """Heaviest neighboring label of ``v`` (uniform among ties), or -1."""
    nt = 0
    for e in range(indptr[v], indptr[v + 1]):
        lab = labels[indices[e]]
        if acc[lab] == 0:
            touched[nt] = lab
            nt += 1
        acc[lab] += weights[e]
    best = -1
    best_w = -1
    ties = 0
    for t in range(nt):
        lab = touched[t]
        a = acc[lab]
        acc[lab] = 0
        if a > best_w:
            best_w = a
            best = lab
            ties = 1
        elif a == best_w:
            ties += 1
            if np.random.randint(0, ties) == 0:
                best = lab
    return best


@njit(cache=True)
def _held(v, labels, guard, keep_pairs, taken, sizes):
    """Whether the singleton guard forbids ``v`` from moving."""
    if guard and labels[v] == v and taken[v]:
        return True
    return keep_pairs and sizes[labels[v]] <= 2


@njit(cache=True)
def _lpa_round(indptr, indices, weights, labels, order, guard, keep_pairs, taken, sizes, seed):
    np.random.seed(seed)
    n = len(labels)
    acc = np.zeros(n, np.int64)
    touched = np.empty(n, np.int64)
    moved = 0
    for i in range(n):
        v = order[i]
        if _held(v, labels, guard, keep_pairs, taken, sizes):
            continue
        best = _update_vertex(v, indptr, indices, weights, labels, acc, touched)
        if best >= 0 and best != labels[v]:
            sizes[labels[v]] -= 1
            sizes[best] += 1
            labels[v] = best
            moved += 1
            if guard:
                taken[best] = True
    return moved


@njit(parallel=True, cache=True)
def _lpa_round_parallel(indptr, indices, weights, labels, order, guard, keep_pairs, taken, sizes, seed, nchunks):
    # Labels are read and written without synchronisation; lost updates and
    # stale reads only perturb the clustering.
    n = len(labels)
    moved = np.zeros(nchunks, np.int64)
    for t in prange(nchunks):
        np.random.seed(seed + t)
        acc = np.zeros(n, np.int64)
        touched = np.empty(n, np.int64)
        for i in range(t * n // nchunks, (t + 1) * n // nchunks):
            v = order[i]
            if _held(v, labels, guard, keep_pairs, taken, sizes):
                continue
            best = _update_vertex(v, indptr, indices, weights, labels, acc, touched)
            if best >= 0 and best != labels[v]:
                sizes[labels[v]] -= 1
                sizes[best] += 1
                labels[v] = best
                moved[t] += 1
                if guard:
                    taken[best] = True
    return moved.sum()


def label_propagation(g: Graph, cfg: LpaConfig | None = None, threads: int = 1) -> Clustering:
    """Cluster ``g`` with ``cfg.iterations`` rounds of label propagation.

    Every vertex starts in its own cluster and moves to the neighboring label
    with the largest incident weight. With ``singleton_guard`` the first round
    pins vertex ``i`` to label ``i`` once any other vertex has adopted it,
    and later rounds never shrink a cluster below two members, which halves
    the vertex count of a connected graph. ``threads > 1``
    selects the racy shared-label mode (nondeterministic).
    """
    cfg = cfg or LpaConfig()
    n = g.n
    labels = np.arange(n, dtype=np.int64)
    if n == 0:
        return Clustering.from_labels(labels)
    seeds = _u32_seeds(cfg.seed, 2 * cfg.iterations)
    taken = np.zeros(n, dtype=np.bool_)
    sizes = np.ones(n, dtype=np.int64)
    for it in range(cfg.iterations):
        order = _block_shuffle(n, cfg.shuffle_block_size, seeds[2 * it])
        guard = cfg.singleton_guard and it == 0
        keep_pairs = cfg.singleton_guard and it > 0
        if threads > 1:
            with numba_threads(threads) as t:
                _lpa_round_parallel(
                    g.indptr, g.indices, g.weights, labels, order, guard, keep_pairs, taken,
                    sizes, seeds[2 * it + 1], t,
                )
        else:
            _lpa_round(
                g.indptr, g.indices, g.weights, labels, order, guard, keep_pairs, taken, sizes,
                seeds[2 * it + 1],
            )
    return Clustering.from_labels(labels)


@njit(cache=True)
def _boundary_weights(indptr, indices, weights, cid, small):
    """Per-vertex weight leaving its cluster and per-cluster boundary weight,
    restricted to clusters flagged in ``small``."""
    n = len(cid)
    cout = np.zeros(n, np.int64)
    cdeg = np.zeros(len(small), np.int64)
    for v in range(n):
        c = cid[v]
        if not small[c]:
            continue
        s = 0
        for e in range(indptr[v], indptr[v + 1]):
            if cid[indices[e]] != c:
                s += weights[e]
        cout[v] = s
        cdeg[c] += s
    return cout, cdeg


@njit(cache=True)
def _is_misplaced(deg_v, cout_v, cdeg_c):
    # extracting v: cluster boundary loses v's outside edges, gains its inside ones
    inner = deg_v - cout_v
    return cdeg_c - cout_v + inner < cdeg_c


@njit(cache=True)
def _fix_misplaced(indptr, indices, weights, degrees, cid, sizes, limit):
    n = len(cid)
    k = len(sizes)
    small = (sizes >= 2) & (sizes <= limit)
    cout, cdeg = _boundary_weights(indptr, indices, weights, cid, small)
    extracted = np.full(k, -1, np.int64)
    for v in range(n):
        c = cid[v]
        if small[c] and extracted[c] < 0 and _is_misplaced(degrees[v], cout[v], cdeg[c]):
            extracted[c] = v
    return _extract(cid, extracted)


@njit(cache=True)
def _extract(cid, extracted):
    out = cid.copy()
    fresh = len(extracted)
    for c in range(len(extracted)):
        if extracted[c] >= 0:
            out[extracted[c]] = fresh
            fresh += 1
    return out


@njit(parallel=True, cache=True)
def _fix_misplaced_parallel(indptr, indices, weights, degrees, cid, sizes, limit, nchunks):
    k = len(sizes)
    small = (sizes >= 2) & (sizes <= limit)
    start, members = _cluster_members(cid, k)
    extracted = np.full(k, -1, np.int64)
    for t in prange(nchunks):
        for c in range(t * k // nchunks, (t + 1) * k // nchunks):
            if not small[c]:
                continue
            cdeg = 0
            for j in range(start[c], start[c + 1]):
                v = members[j]
                for e in range(indptr[v], indptr[v + 1]):
                    if cid[indices[e]] != c:
                        cdeg += weights[e]
            for j in range(start[c], start[c + 1]):
                v = members[j]
                cout = 0
                for e in range(indptr[v], indptr[v + 1]):
                    if cid[indices[e]] != c:
                        cout += weights[e]
                if _is_misplaced(degrees[v], cout, cdeg):
                    extracted[c] = v
                    break
    return _extract(cid, extracted)


def misplaced_size_limit(n: int) -> int:
    return int(math.floor(math.log2(n))) if n >= 1 else 0


def fix_misplaced(g: Graph, c: Clustering, threads: int = 1) -> Clustering:
    """Move at most one misplaced vertex per small cluster into a singleton.

    Only clusters with between 2 and ``floor(log2(n))`` members are examined.
    Within a cluster ``C`` the first vertex (ascending id) whose extraction
    lowers the cluster degree, i.e. ``deg(C) - out(v) + in(v) < deg(C)``, is
    extracted. The contracted minimum degree can then only go down.
    """
    if g.n == 0 or c.cluster_count == 0:
        return c
    limit = misplaced_size_limit(g.n)
    if threads > 1:
        with numba_threads(threads) as t:
            labels = _fix_misplaced_parallel(
                g.indptr, g.indices, g.weights, g.degrees, c.label, c.cluster_size, limit, t
            )
    else:
        labels = _fix_misplaced(g.indptr, g.indices, g.weights, g.degrees, c.label, c.cluster_size, limit)
    return Clustering.from_labels(labels)
