"""Multilevel minimum cut: cluster contraction down to a small kernel, then an exact finish.

Each level runs label propagation, extracts misplaced vertices, contracts the
clusters and applies Padberg-Rinaldi runs. The upper bound ``lambda_hat`` is
refreshed from the minimum weighted degree after every contraction and always
carries a bipartition, so the returned value is the capacity of the returned
cut on the input graph.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .exact import noi_mincut
from .graph import ContractionMap, CutResult, Graph, contract_clustering, min_degree
from .lpa import LpaConfig, fix_misplaced, label_propagation
from .reductions import _pr_run_owned


@dataclass(frozen=True)
class PipelineConfig:
    n0: int = 10000
    lpa: LpaConfig = field(default_factory=LpaConfig)
    threads: int = 1
    seed: int = 0
    emit_partition: bool = True

    def __post_init__(self):
        if self.n0 < 2:
            raise ValueError(f"n0 must be >= 2, got {self.n0}")
        if self.threads < 1:
            raise ValueError(f"threads must be >= 1, got {self.threads}")


@dataclass
class LevelRecord:
    n_before: int
    m_before: int
    clusters: int
    n_after: int
    m_after: int
    lambda_hat: int
    singleton_guard: bool
    time_lpa: float
    time_correcting: float
    time_contraction: float
    time_pr: float


@dataclass
class PipelineTrace:
    levels: list[LevelRecord] = field(default_factory=list)
    kernel_n: int = 0
    kernel_m: int = 0
    time_final: float = 0.0
    time_total: float = 0.0
    early_exit: bool = False

    def _total(self, name: str) -> float:
        return float(sum(getattr(rec, name) for rec in self.levels))

    @property
    def time_lpa(self) -> float:
        return self._total("time_lpa")

    @property
    def time_correcting(self) -> float:
        return self._total("time_correcting")

    @property
    def time_contraction(self) -> float:
        return self._total("time_contraction")

    @property
    def time_pr(self) -> float:
        return self._total("time_pr")

    def phase_times(self) -> dict[str, float]:
        return {
            "lpa": self.time_lpa,
            "correcting": self.time_correcting,
            "contraction": self.time_contraction,
            "pr": self.time_pr,
            "final": self.time_final,
        }


class _Best:
    """Lowest cut seen so far as (value, depth in the contraction stack, side marker at that depth)."""

    def __init__(self, value: int, depth: int, marker: np.ndarray):
        self.value, self.depth, self.marker = value, depth, marker

    def offer(self, value: int, depth: int, marker: np.ndarray) -> bool:
        if value < self.value:
            self.value, self.depth, self.marker = value, depth, marker
            return True
        return False


def _trivial_marker(n: int, v: int) -> np.ndarray:
    marker = np.zeros(n, dtype=bool)
    marker[v] = True
    return marker


def _level_seed(seed: int, level: int, attempt: int) -> int:
    return int(np.random.SeedSequence([seed, level, attempt]).generate_state(1)[0])


def solution_transfer(cmap: ContractionMap, marker) -> np.ndarray:
    """Lift a side marker on the coarsest level to the original vertices."""
    marker = np.asarray(marker)
    if len(cmap):
        coarse_n = int(cmap.levels[-1].max()) + 1 if len(cmap.levels[-1]) else 0
        if len(marker) != coarse_n:
            raise ValueError(f"marker has {len(marker)} entries, coarsest level has {coarse_n}")
    return cmap.lift(marker)


def _cluster_level(cur: Graph, cfg: PipelineConfig, level: int, attempt: int,
                   guard: bool, correct: bool, threads: int):
    lpa_cfg = cfg.lpa.with_(seed=_level_seed(cfg.seed, level, attempt), singleton_guard=guard)
    t0 = time.perf_counter()
    clustering = label_propagation(cur, lpa_cfg, threads)
    t1 = time.perf_counter()
    if correct:
        clustering = fix_misplaced(cur, clustering, threads)
    t2 = time.perf_counter()
    coarse, level_map = contract_clustering(cur, clustering, threads)
    t3 = time.perf_counter()
    return coarse, level_map, clustering.cluster_count, (t1 - t0, t2 - t1, t3 - t2)


def _run(g: Graph, cfg: PipelineConfig, threads: int) -> tuple[CutResult, PipelineTrace]:
    trace = PipelineTrace()
    start = time.perf_counter()
    if g.n < 2:
        trace.kernel_n, trace.kernel_m = g.n, g.m
        return CutResult(0, np.ones(g.n, dtype=bool), degenerate=True), trace

    cmap = ContractionMap()
    v, deg = min_degree(g)
    best = _Best(deg, 0, _trivial_marker(g.n, v))
    cur = g
    guard = cfg.lpa.singleton_guard
    level = 0
    while cur.n > cfg.n0 and best.value > 0:
        n_before, m_before = cur.n, cur.m
        coarse, level_map, clusters, times = _cluster_level(cur, cfg, level, 0, guard, True, threads)
        used_guard = guard
        if coarse.n == cur.n:
            # no merge at all: redo with the guard, which pairs every non-isolated vertex
            coarse, level_map, clusters, retry = _cluster_level(cur, cfg, level, 1, True, False, 1)
            times = tuple(a + b for a, b in zip(times, retry))
            used_guard = True
            if coarse.n == cur.n:
                break
        guard = 2 * coarse.n > cur.n
        cmap.append(level_map)
        cur, coarse = coarse, None
        if cur.n >= 2:
            v, deg = min_degree(cur)
            best.offer(deg, len(cmap), _trivial_marker(cur.n, v))

        t_pr = time.perf_counter()
        if best.value > 0 and cur.n > cfg.n0:
            box, cur = [cur], None
            res = _pr_run_owned(box, best.value, cfg.n0, threads)
            if res.cut_side is not None:
                best.offer(res.lambda_hat, len(cmap), res.cut_side)
            if res.contracted:
                cmap.append(res.mapping)
            cur, res = res.graph, None
        t_pr = time.perf_counter() - t_pr

        trace.levels.append(LevelRecord(
            n_before, m_before, clusters, cur.n, cur.m, best.value, used_guard,
            times[0], times[1], times[2], t_pr,
        ))
        level += 1

    trace.kernel_n, trace.kernel_m = cur.n, cur.m
    if best.value == 0:
        trace.early_exit = True
    elif cur.n >= 2:
        t0 = time.perf_counter()
        res = noi_mincut(cur)
        best.offer(res.value, len(cmap), res.side)
        trace.time_final = time.perf_counter() - t0

    side = cmap.lift(best.marker, best.depth)
    trace.time_total = time.perf_counter() - start
    return CutResult(int(best.value), np.ascontiguousarray(side, dtype=bool)), trace


def viecut(g: Graph, cfg: PipelineConfig | None = None) -> tuple[CutResult, PipelineTrace]:
    """Sequential multilevel minimum cut.

    Graphs with at most ``cfg.n0`` vertices go straight to the exact solver.
    The result is deterministic for a fixed graph, config and seed, and its
    value is never below the true minimum cut.
    """
    return _run(g, cfg or PipelineConfig(), 1)


def viecut_parallel(g: Graph, cfg: PipelineConfig) -> tuple[CutResult, PipelineTrace]:
    """Shared-memory variant using ``cfg.threads`` workers for every phase but the final solve.

    With more than one thread the result may vary between runs; it always
    satisfies the same guarantees as :func:`viecut`.
    """
    if cfg.threads == 1:
        return viecut(g, cfg)
    return _run(g, cfg, cfg.threads)
