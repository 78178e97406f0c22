"""Benchmark harness: repeated timed runs, optimality against an exact reference, speedups.

Every row carries the same field set (``ROW_FIELDS``) whatever the
algorithm, so the JSON-lines output validates against one schema. Time per
edge divides by the undirected edge count ``m``. Timings start after the
graph is built and exclude I/O.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from .exact import matula_approx, noi_mincut, stoer_wagner
from .generators import ClusteredErParams, generate_clustered_er
from .graph import CutResult, Graph, cut_capacity
from .io import read_graph
from .pipeline import PipelineConfig, viecut, viecut_parallel

ALGORITHMS = ("viecut", "noi", "stoer-wagner", "matula")
PARALLEL_ALGORITHMS = frozenset({"viecut"})
PHASES = ("lpa", "correcting", "contraction", "pr", "final")

ROW_FIELDS = (
    "kind", "instance", "algorithm", "threads", "repetitions", "n", "m",
    "cut", "cut_max", "mean_time", "ns_per_edge",
    "time_lpa", "time_correcting", "time_contraction", "time_pr", "time_final",
    "reference_cut", "optimal", "nonoptimal_runs", "relative_error",
    "partition_consistent", "speedup", "error",
)


@dataclass(frozen=True)
class BenchPlan:
    instances: tuple[str, ...]
    algorithms: tuple[str, ...] = ("viecut", "noi")
    repetitions: int = 5
    threads: tuple[int, ...] = (1,)
    seed: int = 0
    reference: str = "noi"  # "noi" or "none"
    epsilon: float = 0.1
    n0: int = 10000
    check_partitions: bool = True

    def __post_init__(self):
        object.__setattr__(self, "instances", tuple(self.instances))
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        object.__setattr__(self, "threads", tuple(int(t) for t in self.threads))
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        unknown = [a for a in self.algorithms if a not in ALGORITHMS]
        if unknown:
            raise ValueError(f"unknown algorithm(s) {unknown}; choose from {list(ALGORITHMS)}")
        if not self.threads or min(self.threads) < 1:
            raise ValueError("thread counts must be >= 1")
        if self.reference not in ("noi", "none"):
            raise ValueError("reference must be 'noi' or 'none'")

    @classmethod
    def from_json(cls, source: str | Path | dict) -> "BenchPlan":
        data = source if isinstance(source, dict) else json.loads(Path(source).read_text())
        return cls(**data)


def parse_generator_spec(spec: str) -> ClusteredErParams:
    """``cluster-er:n=1000,d=5,k=2,seed=3`` to generator parameters."""
    kind, _, args = spec.partition(":")
    if kind != "cluster-er":
        raise ValueError(f"unknown generator {kind!r}")
    values: dict[str, float] = {}
    for item in filter(None, args.split(",")):
        key, sep, raw = item.partition("=")
        if not sep or key not in ("n", "d", "k", "seed"):
            raise ValueError(f"bad generator argument {item!r}")
        values[key] = float(raw) if key == "d" else int(raw)
    if "n" not in values or "d" not in values:
        raise ValueError("generator spec needs n and d")
    return ClusteredErParams(**values)


def load_instance(spec: str) -> Graph:
    if spec.startswith("cluster-er:"):
        return generate_clustered_er(parse_generator_spec(spec))
    return read_graph(spec)


def solve(algorithm: str, g: Graph, *, threads: int = 1, seed: int = 0,
          epsilon: float = 0.1, n0: int = 10000) -> tuple[CutResult, dict[str, float]]:
    """Run one algorithm; returns the cut and per-phase seconds (zeros outside the pipeline)."""
    phases = dict.fromkeys(PHASES, 0.0)
    if algorithm == "viecut":
        cfg = PipelineConfig(n0=n0, threads=threads, seed=seed)
        result, trace = viecut_parallel(g, cfg) if threads > 1 else viecut(g, cfg)
        phases.update(trace.phase_times())
        return result, phases
    if algorithm == "noi":
        return noi_mincut(g), phases
    if algorithm == "stoer-wagner":
        return stoer_wagner(g), phases
    if algorithm == "matula":
        return matula_approx(g, epsilon), phases
    raise ValueError(f"unknown algorithm {algorithm!r}")


def _row(**values) -> dict:
    row = dict.fromkeys(ROW_FIELDS)
    row.update(values)
    return row


def _relative_error(cuts: list[int], reference: int) -> float | None:
    """Mean of ``(cut - reference) / reference``; undefined (None) for a nonzero cut against 0."""
    if reference == 0:
        return 0.0 if not any(cuts) else None
    return float(np.mean([(c - reference) / reference for c in cuts]))


def _measure(plan: BenchPlan, name: str, g: Graph, algorithm: str, threads: int,
             reference: int | None) -> dict:
    cuts, times = [], []
    phase_sums = dict.fromkeys(PHASES, 0.0)
    consistent = True if plan.check_partitions else None
    for rep in range(plan.repetitions):
        start = time.perf_counter()
        result, phases = solve(algorithm, g, threads=threads, seed=plan.seed + rep,
                               epsilon=plan.epsilon, n0=plan.n0)
        times.append(time.perf_counter() - start)
        cuts.append(result.value)
        for key in PHASES:
            phase_sums[key] += phases[key]
        if plan.check_partitions and not result.degenerate:
            consistent = consistent and cut_capacity(g, result.side) == result.value
    mean_time = float(np.mean(times))
    row = _row(
        kind="result", instance=name, algorithm=algorithm, threads=threads,
        repetitions=plan.repetitions, n=g.n, m=g.m,
        cut=min(cuts), cut_max=max(cuts), mean_time=mean_time,
        ns_per_edge=mean_time / g.m * 1e9 if g.m else None,
        partition_consistent=consistent,
        **{f"time_{k}": v / plan.repetitions for k, v in phase_sums.items()},
    )
    if reference is not None:
        misses = sum(c != reference for c in cuts)
        row.update(
            reference_cut=reference, optimal=misses == 0, nonoptimal_runs=misses,
            relative_error=_relative_error(cuts, reference),
        )
    return row


def _speedup_rows(rows: list[dict]) -> list[dict]:
    out = []
    groups: dict[tuple[str, str], list[dict]] = {}
    for row in rows:
        if row["kind"] == "result":
            groups.setdefault((row["instance"], row["algorithm"]), []).append(row)
    for (instance, algorithm), group in groups.items():
        if len(group) < 2:
            continue
        base = min(group, key=lambda r: r["threads"])
        for row in group:
            out.append(_row(
                kind="speedup", instance=instance, algorithm=algorithm,
                threads=row["threads"], repetitions=row["repetitions"], n=row["n"], m=row["m"],
                mean_time=row["mean_time"],
                speedup=base["mean_time"] / row["mean_time"] if row["mean_time"] > 0 else None,
            ))
    return out


def run_plan(plan: BenchPlan, progress: Callable[[dict], None] | None = None) -> list[dict]:
    """Execute every (instance, algorithm, threads) group sequentially."""
    rows: list[dict] = []

    def emit(row: dict) -> None:
        rows.append(row)
        if progress is not None:
            progress(row)

    for name in plan.instances:
        try:
            g = load_instance(name)
        except (OSError, ValueError) as exc:
            emit(_row(kind="failed", instance=name, error=f"{type(exc).__name__}: {exc}"))
            continue
        reference = None
        if plan.reference == "noi" and g.n >= 2:
            reference = noi_mincut(g).value
        for algorithm in plan.algorithms:
            thread_counts = plan.threads if algorithm in PARALLEL_ALGORITHMS else (1,)
            for threads in dict.fromkeys(thread_counts):
                try:
                    emit(_measure(plan, name, g, algorithm, threads, reference))
                except (ValueError, OverflowError, RuntimeError) as exc:
                    emit(_row(kind="failed", instance=name, algorithm=algorithm, threads=threads,
                              n=g.n, m=g.m, error=f"{type(exc).__name__}: {exc}"))
    for row in _speedup_rows(rows):
        emit(row)
    return rows


def rows_to_jsonl(rows: Iterable[dict]) -> str:
    return "".join(json.dumps(r, separators=(",", ":")) + "\n" for r in rows)


def _fmt(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return f"{value:.4g}"
    return str(value)


def format_summary(rows: Iterable[dict]) -> str:
    """Plain aligned table of result, speedup and failed rows."""
    columns = ("kind", "instance", "algorithm", "threads", "cut", "mean_time",
               "ns_per_edge", "optimal", "nonoptimal_runs", "speedup", "error")
    table = [list(columns)] + [[_fmt(r.get(c)) for c in columns] for r in rows]
    widths = [max(len(line[i]) for line in table) for i in range(len(columns))]
    return "\n".join(
        "  ".join(cell.ljust(w) for cell, w in zip(line, widths)).rstrip() for line in table
    ) + "\n"


__all__ = [
    "ALGORITHMS",
    "BenchPlan",
    "ROW_FIELDS",
    "format_summary",
    "load_instance",
    "parse_generator_spec",
    "rows_to_jsonl",
    "run_plan",
    "solve",
]

