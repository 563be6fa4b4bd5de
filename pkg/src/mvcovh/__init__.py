"""Multi-view clustering with cooperating visible and hidden views."""
from .clustering import (
    ClusterState,
    HyperParams,
    fit_pipeline,
    kmeans_fit,
    mvcovh_fit,
)
from .factorization import HiddenSpaceModel, nmf_factorize, shd_nmf
from .harness import GridSpec, RunReport, grid_search, repeat_runs, synth_multiview
from .metrics import evaluate, nmi, pair_counts, precision_pairs, rand_index
from .mvdata import MultiViewDataset, ViewMatrix, load_manifest, normalize_view

__all__ = [
    "ClusterState", "GridSpec", "HiddenSpaceModel", "HyperParams", "MultiViewDataset",
    "RunReport", "ViewMatrix", "evaluate", "fit_pipeline", "grid_search", "kmeans_fit",
    "load_manifest", "mvcovh_fit", "nmf_factorize", "nmi", "normalize_view", "pair_counts",
    "precision_pairs", "rand_index", "repeat_runs", "shd_nmf", "synth_multiview",
]
__version__ = "0.1.0"
