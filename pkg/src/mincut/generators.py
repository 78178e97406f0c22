"""Clustered Erdos-Renyi benchmark graphs.

Vertex ``v`` belongs to cluster ``v mod k``. Exactly ``m`` distinct vertex
pairs are drawn uniformly; every edge gets a weight uniform in [1, 100],
multiplied by ``n`` when both endpoints share a cluster, so the minimum cut
separates clusters with high probability.

Randomness comes from numpy's PCG64 seeded through ``SeedSequence``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .graph import Graph, graph_from_arrays

# Below this many vertex pairs the pair list is materialised and shuffled.
_DENSE_PAIR_LIMIT = 1 << 22


@dataclass(frozen=True)
class ClusteredErParams:
    n: int
    d: float  # density in percent
    k: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not 0 < self.d <= 100:
            raise ValueError(f"density must lie in (0, 100], got {self.d}")
        if not 1 <= self.k <= self.n:
            raise ValueError(f"cluster count must lie in [1, n], got {self.k}")

    @property
    def m(self) -> int:
        """Edge count ``n(n-1)/2 * d/100`` rounded half up."""
        exact = Fraction(self.n * (self.n - 1), 2) * Fraction(str(self.d)) / 100
        return int(exact + Fraction(1, 2))


def _sample_pairs(n: int, m: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    pairs = n * (n - 1) // 2
    if m > pairs:
        raise ValueError(f"cannot place {m} edges among {pairs} vertex pairs")
    if pairs <= _DENSE_PAIR_LIMIT or 4 * m > pairs:
        chosen = np.sort(rng.choice(pairs, size=m, replace=False))
        # decode row-major upper-triangle index
        n_f = float(n)
        u = np.floor((2 * n_f - 1 - np.sqrt((2 * n_f - 1) ** 2 - 8 * chosen)) / 2).astype(np.int64)
        row_start = u * (2 * n - u - 1) // 2
        # repair floating point at row boundaries
        low = chosen < row_start
        while low.any():
            u[low] -= 1
            row_start = u * (2 * n - u - 1) // 2
            low = chosen < row_start
        high = chosen >= row_start + (n - 1 - u)
        while high.any():
            u[high] += 1
            row_start = u * (2 * n - u - 1) // 2
            high = chosen >= row_start + (n - 1 - u)
        v = chosen - row_start + u + 1
        return u, v

    # rejection sampling on pair keys a*n+b with a<b
    keys = np.empty(0, dtype=np.int64)
    while len(keys) < m:
        need = m - len(keys)
        batch = int(need * 1.05) + 64
        a = rng.integers(0, n, size=batch)
        b = rng.integers(0, n, size=batch)
        keep = a != b
        lo = np.minimum(a[keep], b[keep])
        hi = np.maximum(a[keep], b[keep])
        keys = np.union1d(keys, lo * n + hi)
    if len(keys) > m:
        keys = np.sort(keys[rng.permutation(len(keys))[:m]])
    return keys // n, keys % n


def generate_clustered_er(p: ClusteredErParams) -> Graph:
    """Clustered Erdos-Renyi graph; bit-identical for a fixed ``p.seed``."""
    rng = np.random.default_rng(np.random.SeedSequence(p.seed))
    u, v = _sample_pairs(p.n, p.m, rng)
    w = rng.integers(1, 101, size=len(u), dtype=np.int64)
    same = (u % p.k) == (v % p.k)
    w[same] *= p.n
    return graph_from_arrays(p.n, u, v, w, assume_simple=True)


def cluster_of(n: int, k: int) -> np.ndarray:
    """Planted cluster id of every vertex."""
    return np.arange(n, dtype=np.int64) % k
