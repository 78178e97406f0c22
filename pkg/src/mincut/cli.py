"""Command-line interface: ``mincut solve | generate | kcore | bench``.

Exit codes: 0 success, 2 unreadable or malformed input / invalid arguments,
3 input that violates an algorithm's precondition.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from ._threads import default_threads
from .bench import ALGORITHMS, BenchPlan, format_summary, rows_to_jsonl, run_plan, solve
from .generators import ClusteredErParams, generate_clustered_er
from .graph import connected_components, largest_component
from .io import MetisError, ResultRecord, kcore, read_graph, write_graph

EXIT_INPUT = 2
EXIT_PRECONDITION = 3


class _Precondition(Exception):
    pass


def _thread_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError("thread counts must be >= 1")
    return values


def _read(path: str):
    try:
        return read_graph(path)
    except MetisError as exc:
        raise MetisError(f"{path}: {exc}") from None


def cmd_solve(args) -> int:
    g = _read(args.graph)
    if g.n < 2:
        raise _Precondition(f"graph has {g.n} vertex; a cut needs at least 2")
    if args.algorithm == "matula" and connected_components(g)[1] > 1:
        raise _Precondition("matula requires a connected graph")
    start = time.perf_counter()
    try:
        result, phases = solve(args.algorithm, g, threads=args.threads, seed=args.seed,
                               epsilon=args.epsilon, n0=args.n0)
    except (ValueError, OverflowError) as exc:
        raise _Precondition(str(exc)) from None
    elapsed = time.perf_counter() - start
    record = ResultRecord(
        algorithm=args.algorithm, graph=args.graph, seed=args.seed, threads=args.threads,
        cut=result.value, n=g.n, m=g.m, time_total=elapsed,
        **{f"time_{k}": v for k, v in phases.items()},
        side_size=int(result.side.sum()),
    )
    if args.partition_out:
        ids = result.side_a()
        Path(args.partition_out).write_text("".join(f"{v}\n" for v in ids))
    print(record.to_json())
    if not args.json:
        print(f"{args.algorithm}: cut {result.value} on n={g.n} m={g.m} in {elapsed:.3f}s",
              file=sys.stderr)
    return 0


def cmd_generate(args) -> int:
    try:
        params = ClusteredErParams(args.n, args.d, args.k, args.seed)
    except ValueError as exc:
        raise MetisError(str(exc)) from None
    g = generate_clustered_er(params)
    if args.out:
        write_graph(g, args.out)
    else:
        from .io import write_metis

        sys.stdout.write(write_metis(g))
    return 0


def cmd_kcore(args) -> int:
    if args.k < 1:
        raise MetisError(f"k must be >= 1, got {args.k}")
    g = _read(args.input)
    core, core_ids = kcore(g, args.k)
    if core.n == 0:
        print(f"empty core: no subgraph where every vertex has at least {args.k} neighbors")
        return 0
    lcc, lcc_ids = largest_component(core)
    write_graph(lcc, args.out)
    mapping = core_ids[lcc_ids]
    Path(str(args.out) + ".map").write_text("".join(f"{v}\n" for v in mapping))
    print(f"wrote {lcc.n} vertices, {lcc.m} edges to {args.out} (ids in {args.out}.map)",
          file=sys.stderr)
    return 0


def cmd_bench(args) -> int:
    if args.plan:
        plan = BenchPlan.from_json(args.plan)
    else:
        if not args.instance:
            raise MetisError("bench needs --plan or at least one --instance")
        plan = BenchPlan(
            instances=args.instance,
            algorithms=args.algorithm or ("viecut", "noi"),
            repetitions=args.repetitions,
            threads=args.threads,
            seed=args.seed,
            reference=args.reference,
            n0=args.n0,
        )
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        rows = run_plan(plan, progress=lambda row: (out.write(rows_to_jsonl([row])), out.flush()))
    finally:
        if args.out:
            out.close()
    summary = format_summary(rows)
    (sys.stdout if args.out else sys.stderr).write(summary)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mincut", description="Global minimum cut toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="compute a minimum cut of a METIS graph")
    p.add_argument("--graph", required=True, help="METIS file (.gz accepted)")
    p.add_argument("--algorithm", choices=ALGORITHMS, default="viecut")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: $MINCUT_THREADS or 1)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon", type=float, default=0.1, help="matula approximation slack")
    p.add_argument("--n0", type=int, default=10000, help="kernel size handed to the exact solver")
    p.add_argument("--partition-out", help="write side A vertex ids (0-indexed, one per line)")
    p.add_argument("--json", action="store_true", help="print only the JSON record")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("generate", help="write a generated graph in METIS format")
    gen = p.add_subparsers(dest="generator", required=True)
    q = gen.add_parser("cluster-er", help="clustered Erdos-Renyi graph")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--d", type=float, required=True, help="edge density in percent")
    q.add_argument("--k", type=int, default=2, help="number of planted clusters")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out", help="output path (stdout if omitted)")
    q.set_defaults(func=cmd_generate)

    p = sub.add_parser("kcore", help="largest connected component of the k-core")
    p.add_argument("--input", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out", required=True, help="METIS output; ids go to OUT.map")
    p.set_defaults(func=cmd_kcore)

    p = sub.add_parser("bench", help="timed repetitions with optimality and speedup rows")
    p.add_argument("--plan", help="JSON file with BenchPlan fields")
    p.add_argument("--instance", action="append",
                   help="METIS path or generator spec like cluster-er:n=1000,d=5,k=2,seed=1")
    p.add_argument("--algorithm", action="append", choices=ALGORITHMS)
    p.add_argument("--repetitions", type=int, default=5)
    p.add_argument("--threads", type=_thread_list, default=None, help="e.g. 1,2,4")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reference", choices=("noi", "none"), default="noi")
    p.add_argument("--n0", type=int, default=10000)
    p.add_argument("--out", help="JSON-lines output file (stdout if omitted)")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "threads", 0) is None:
            threads = default_threads()
            args.threads = threads if args.command == "solve" else (threads,)
        if args.command == "solve" and args.threads < 1:
            raise MetisError(f"--threads must be >= 1, got {args.threads}")
        return args.func(args)
    except _Precondition as exc:
        print(f"mincut: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (MetisError, OSError, ValueError) as exc:
        print(f"mincut: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
