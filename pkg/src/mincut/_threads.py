from __future__ import annotations

import contextlib
import logging
import os

import numba

log = logging.getLogger(__name__)


def default_threads() -> int:
    """Thread count from ``MINCUT_THREADS`` (falls back to 1)."""
    raw = os.environ.get("MINCUT_THREADS", "").strip()
    if not raw:
        return 1
    value = int(raw)
    if value < 1:
        raise ValueError(f"MINCUT_THREADS must be >= 1, got {value}")
    return value


@contextlib.contextmanager
def numba_threads(threads: int):
    """Temporarily run numba parallel regions with ``threads`` workers."""
    limit = numba.config.NUMBA_NUM_THREADS
    if threads > limit:
        log.warning("requested %d threads, numba pool has %d; clamping", threads, limit)
        threads = limit
    previous = numba.get_num_threads()
    numba.set_num_threads(max(1, threads))
    try:
        yield threads
    finally:
        numba.set_num_threads(previous)
