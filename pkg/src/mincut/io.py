"""METIS graph files, k-core preprocessing and JSON-lines result records."""

from __future__ import annotations

import dataclasses
import gzip
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable

import numpy as np
from numba import njit

from .graph import Graph, induced_subgraph

__all__ = [
    "MetisError",
    "MetisHeader",
    "ResultRecord",
    "emit_results",
    "kcore",
    "parse_metis",
    "read_graph",
    "write_metis",
    "write_graph",
]


class MetisError(ValueError):
    """Malformed METIS input. ``line`` is 1-based within the file."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class MetisHeader:
    n: int
    m: int
    fmt: int = 0


def _parse_header(tokens: list[str], lineno: int) -> MetisHeader:
    if len(tokens) not in (2, 3):
        raise MetisError("header must be 'n m [fmt]'", lineno)
    try:
        values = [int(t) for t in tokens]
    except ValueError:
        raise MetisError(f"malformed header token in {' '.join(tokens)!r}", lineno) from None
    n, m = values[0], values[1]
    fmt = values[2] if len(values) == 3 else 0
    if n < 1:
        raise MetisError(f"vertex count must be >= 1, got {n}", lineno)
    if m < 0:
        raise MetisError(f"edge count must be >= 0, got {m}", lineno)
    if fmt not in (0, 1):
        raise MetisError(f"unsupported fmt code {tokens[2]!r} (only 0 and 1)", lineno)
    return MetisHeader(n, m, fmt)


def parse_metis(source: str | IO[str]) -> Graph:
    """Parse METIS text (a string or a text stream) into a :class:`Graph`.

    Vertex lines are 1-indexed neighbor lists; with ``fmt=1`` they hold
    ``neighbor weight`` pairs. ``%`` lines are comments. The adjacency must
    be symmetric with matching weights; it is never repaired.
    """
    text = source if isinstance(source, str) else source.read()
    lines = text.splitlines()

    header = None
    body: list[tuple[int, str]] = []
    for lineno, line in enumerate(lines, start=1):
        if line.lstrip().startswith("%"):
            continue
        if header is None:
            if not line.strip():
                continue
            header = _parse_header(line.split(), lineno)
        else:
            body.append((lineno, line))
    if header is None:
        raise MetisError("missing header line")
    n, weighted = header.n, header.fmt == 1

    if len(body) < n:
        raise MetisError(f"expected {n} vertex lines, found {len(body)}")
    for lineno, line in body[n:]:
        if line.strip():
            raise MetisError(f"unexpected content after {n} vertex lines", lineno)

    stride = 2 if weighted else 1
    counts = np.zeros(n, dtype=np.int64)
    chunks: list[list[str]] = []
    for v, (lineno, line) in enumerate(body[:n]):
        toks = line.split()
        if weighted and len(toks) % 2:
            raise MetisError("odd number of tokens in a weighted vertex line", lineno)
        counts[v] = len(toks) // stride
        chunks.append(toks)

    flat = [t for toks in chunks for t in toks]
    try:
        values = np.array(flat, dtype=np.int64) if flat else np.empty(0, np.int64)
    except ValueError:
        for v, toks in enumerate(chunks):
            for t in toks:
                try:
                    int(t)
                except ValueError:
                    raise MetisError(f"malformed token {t!r}", body[v][0]) from None
        raise
    if weighted:
        nbr = values[0::2] - 1
        wts = values[1::2]
    else:
        nbr = values - 1
        wts = np.ones(len(values), dtype=np.int64)
    src = np.repeat(np.arange(n, dtype=np.int64), counts)

    def fail_at(idx: int, message: str):
        raise MetisError(message, body[int(src[idx])][0])

    bad = np.flatnonzero((nbr < 0) | (nbr >= n))
    if len(bad):
        fail_at(bad[0], f"neighbor index {nbr[bad[0]] + 1} outside [1, {n}]")
    bad = np.flatnonzero(wts < 1)
    if len(bad):
        fail_at(bad[0], f"non-positive edge weight {wts[bad[0]]}")
    bad = np.flatnonzero(nbr == src)
    if len(bad):
        fail_at(bad[0], "self-loop")

    if len(values) // stride != 2 * header.m:
        raise MetisError(
            f"header declares {header.m} edges, found {len(values) // stride} adjacency "
            f"entries ({len(values) // stride / 2:g} edges)"
        )

    key = src * n + nbr
    order = np.argsort(key, kind="stable")
    sk = key[order]
    dup = np.flatnonzero(sk[1:] == sk[:-1])
    if len(dup):
        fail_at(order[dup[0]], f"duplicate neighbor {nbr[order[dup[0]]] + 1}")
    rev = nbr * n + src
    pos = np.searchsorted(sk, rev)
    pos = np.minimum(pos, len(sk) - 1) if len(sk) else pos
    ok = (sk[pos] == rev) & (wts[order[pos]] == wts) if len(sk) else np.ones(0, bool)
    bad = np.flatnonzero(~ok)
    if len(bad):
        i = bad[0]
        fail_at(
            i,
            f"edge {src[i] + 1}-{nbr[i] + 1} (weight {wts[i]}) has no matching "
            f"reverse entry",
        )

    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return Graph(indptr, nbr, wts)


def write_metis(g: Graph) -> str:
    """Serialise ``g`` as weighted METIS (``fmt=1``), preserving adjacency order."""
    out = io.StringIO()
    out.write(f"{g.n} {g.m} 1\n")
    ind = (g.indices.astype(np.int64) + 1).tolist()
    wts = g.weights.tolist()
    ptr = g.indptr.tolist()
    for v in range(g.n):
        lo, hi = ptr[v], ptr[v + 1]
        out.write(" ".join(f"{a} {b}" for a, b in zip(ind[lo:hi], wts[lo:hi])))
        out.write("\n")
    return out.getvalue()


def _open_text(path: Path, mode: str):
    if path.suffix == ".gz":
        return gzip.open(path, mode + "t", encoding="ascii")
    return open(path, mode, encoding="ascii")


def read_graph(path: str | Path) -> Graph:
    """Read a METIS file; ``.gz`` files are decompressed transparently."""
    path = Path(path)
    with _open_text(path, "r") as fh:
        return parse_metis(fh)


def write_graph(g: Graph, path: str | Path) -> None:
    path = Path(path)
    with _open_text(path, "w") as fh:
        fh.write(write_metis(g))


@njit(cache=True)
def _kcore_mask(indptr, indices, k):
    n = len(indptr) - 1
    deg = np.empty(n, np.int64)
    alive = np.ones(n, np.bool_)
    queue = np.empty(n, np.int64)
    head = 0
    tail = 0
    for v in range(n):
        deg[v] = indptr[v + 1] - indptr[v]
        if deg[v] < k:
            alive[v] = False
            queue[tail] = v
            tail += 1
    while head < tail:
        v = queue[head]
        head += 1
        for e in range(indptr[v], indptr[v + 1]):
            u = indices[e]
            if alive[u]:
                deg[u] -= 1
                if deg[u] < k:
                    alive[u] = False
                    queue[tail] = u
                    tail += 1
    return alive


def kcore(g: Graph, k: int) -> tuple[Graph, np.ndarray]:
    """Maximum subgraph where every vertex has at least ``k`` neighbors.

    Degree counts neighbors, not weight. Returns the core (possibly with zero
    vertices) and the new-to-old vertex id map.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return induced_subgraph(g, _kcore_mask(g.indptr, g.indices, k))


@dataclass
class ResultRecord:
    """One solver run. Field order is the JSON field order."""

    algorithm: str
    graph: str
    seed: int | None
    threads: int
    cut: int
    n: int
    m: int
    time_total: float
    time_lpa: float = 0.0
    time_correcting: float = 0.0
    time_contraction: float = 0.0
    time_pr: float = 0.0
    time_final: float = 0.0
    repetition: int = 0
    side_size: int | None = None

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), separators=(",", ":"))


def emit_results(records: Iterable[ResultRecord]) -> str:
    """JSON lines, one object per record (empty string for no records)."""
    return "".join(r.to_json() + "\n" for r in records)
