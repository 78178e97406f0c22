"""Multilevel minimum cut toolkit.

Label-propagation cluster contraction, Padberg-Rinaldi reductions and a
Nagamochi-Ono-Ibaraki finish, plus exact/approximate baselines, generators,
METIS I/O and a benchmark harness.
"""

import os
import warnings

# numba sizes its thread pool at import time; allow oversubscription so that
# ``threads=4`` really launches four workers even on small machines.
os.environ.setdefault("NUMBA_NUM_THREADS", str(max(os.cpu_count() or 1, 4)))
# an outdated system TBB only means numba falls back to OpenMP or its own pool
warnings.filterwarnings("ignore", message="The TBB threading layer requires")

from .graph import (  # noqa: E402
    ContractionMap,
    CutResult,
    DegenerateCutError,
    Graph,
    UnionFind,
    build_graph,
    connected_components,
    contract_clustering,
    contract_marked,
    cut_capacity,
    largest_component,
    min_degree,
)
from .exact import brute_force_mincut, matula_approx, noi_mincut, stoer_wagner  # noqa: E402
from .generators import ClusteredErParams, generate_clustered_er  # noqa: E402
from .lpa import Clustering, LpaConfig, block_shuffled_order, fix_misplaced, label_propagation  # noqa: E402
from .pipeline import PipelineConfig, PipelineTrace, solution_transfer, viecut, viecut_parallel  # noqa: E402
from .reductions import pr_pass_12, pr_pass_34, pr_run  # noqa: E402

__version__ = "0.1.0"

__all__ = [
    "Clustering",
    "ClusteredErParams",
    "ContractionMap",
    "CutResult",
    "DegenerateCutError",
    "Graph",
    "LpaConfig",
    "PipelineConfig",
    "PipelineTrace",
    "UnionFind",
    "block_shuffled_order",
    "brute_force_mincut",
    "build_graph",
    "connected_components",
    "contract_clustering",
    "contract_marked",
    "cut_capacity",
    "fix_misplaced",
    "generate_clustered_er",
    "label_propagation",
    "largest_component",
    "matula_approx",
    "min_degree",
    "noi_mincut",
    "pr_pass_12",
    "pr_pass_34",
    "pr_run",
    "solution_transfer",
    "stoer_wagner",
    "viecut",
    "viecut_parallel",
]
