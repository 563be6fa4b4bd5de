"""K-means and MV-Co-VH: hard clustering over visible views plus a shared hidden view.

MV-Co-VH minimizes

    J = beta * sum_j ||h_j - vh_{a_j}||^2
        + (1 - beta) * sum_k w_k sum_j ||x^k_j - v^k_{a_j}||^2
        + eta * sum_k w_k ln w_k

by cycling assignment, visible centers, hidden centers and view weights, each
of which is the exact minimizer of its block. H is held fixed throughout.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .factorization import (
    HiddenSpaceModel,
    NumericalError,
    ParameterError,
    _entropy_term,
    rel_change,
    shd_nmf,
    softmin_weights,
)
from .mvdata import MultiViewDataset, normalize_dataset

INIT_METHODS = ("kmeans++", "random")


@dataclass(frozen=True)
class HyperParams:
    C: int
    beta: float = 0.5
    eta: float = 1.0
    r: int = 2
    lam: float = 1.0
    epsilon: float = 1e-6
    max_iter: int = 100
    seed: int = 0
    nmf_epsilon: float = 1e-6
    nmf_max_iter: int = 200
    init: str = "kmeans++"

    def __post_init__(self):
        if self.C < 2:
            raise ParameterError(f"C must be >= 2, got {self.C}")
        if not 0.0 <= self.beta <= 1.0:
            raise ParameterError(f"beta must be in [0, 1], got {self.beta}")
        if not (np.isfinite(self.eta) and self.eta > 0):
            raise ParameterError(f"eta must be finite and > 0, got {self.eta}")
        if not self.lam > 0:
            raise ParameterError(f"lambda must be > 0, got {self.lam}")
        if self.r < 1:
            raise ParameterError(f"r must be >= 1, got {self.r}")
        if self.max_iter < 0 or self.nmf_max_iter < 0:
            raise ParameterError("iteration limits must be >= 0")
        if self.init not in INIT_METHODS:
            raise ParameterError(f"init must be one of {INIT_METHODS}, got {self.init!r}")

    def replace(self, **kw) -> "HyperParams":
        d = asdict(self)
        d.update(kw)
        return HyperParams(**d)

    def to_json(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        return d


@dataclass(frozen=True)
class ClusterState:
    assignment: np.ndarray          # length N, values in [0, C)
    V: tuple[np.ndarray, ...]       # m_k x C visible centers
    V_hidden: np.ndarray            # r x C hidden centers
    w: np.ndarray                   # view weights
    objective_trace: tuple[float, ...] = field(default=())
    per_view_dispersions: tuple[float, ...] = field(default=())

    @property
    def iterations(self) -> int:
        return max(len(self.objective_trace) - 1, 0)

    def to_report(self, params: HyperParams | None = None) -> dict:
        return {
            "params": None if params is None else params.to_json(),
            "iterations": self.iterations,
            "objective_trace": [float(v) for v in self.objective_trace],
            "w": [float(v) for v in self.w],
            "assignment": [int(a) for a in self.assignment],
            "per_view_dispersions": [float(v) for v in self.per_view_dispersions],
        }


# --- shared numerics -------------------------------------------------------

def sq_dists(X: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """N x C matrix of squared Euclidean distances between columns of X and Z."""
    if X.shape[0] != Z.shape[0]:
        raise ValueError(f"dimension mismatch: X {X.shape}, centers {Z.shape}")
    out = np.empty((X.shape[1], Z.shape[1]))
    for s in range(Z.shape[1]):
        diff = X - Z[:, s:s + 1]
        out[:, s] = np.sum(diff * diff, axis=0)
    return out


def _onehot(assignment: np.ndarray, C: int) -> np.ndarray:
    M = np.zeros((assignment.shape[0], C))
    M[np.arange(assignment.shape[0]), assignment] = 1.0
    return M


def _means(X: np.ndarray, assignment: np.ndarray, C: int) -> np.ndarray:
    M = _onehot(assignment, C)
    counts = M.sum(axis=0)
    return (X @ M) / np.where(counts > 0, counts, 1.0)


def _own_dist(X: np.ndarray, centers: np.ndarray, assignment: np.ndarray) -> np.ndarray:
    diff = X - centers[:, assignment]
    return np.sum(diff * diff, axis=0)


def repair_empty(assignment: np.ndarray, C: int,
                 own_dist: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Give every empty cluster one member.

    For each empty cluster (ascending), the sample farthest from its own
    cluster mean, among clusters with at least two members, is moved into it.
    ``own_dist(assignment)`` returns each sample's distance to its cluster mean.
    Never increases the within-cluster dispersion.
    """
    a = np.array(assignment, dtype=np.int64)
    for e in range(C):
        counts = np.bincount(a, minlength=C)
        if counts[e] > 0:
            continue
        d = own_dist(a)
        d = np.where(counts[a] >= 2, d, -np.inf)
        a[int(np.argmax(d))] = e
    return a


def _check_C(C: int, N: int) -> None:
    if not 2 <= C <= N:
        raise ParameterError(f"number of clusters C={C} must be in [2, N={N}]")


def init_indices(rng: np.random.Generator, N: int, C: int,
                 dist_to: Callable[[int], np.ndarray], method: str = "kmeans++") -> np.ndarray:
    """Draw C distinct sample indices to seed the centers.

    ``random`` draws uniformly without replacement. ``kmeans++`` is the greedy
    variant: the first index is uniform; at each later step ``2 + ln C``
    candidates are drawn with probability proportional to the squared distance
    to the nearest index already chosen, and the candidate giving the lowest
    total potential is kept. ``dist_to(j)`` gives the distances of all samples
    to sample j.
    """
    if method == "random":
        return np.sort(rng.choice(N, size=C, replace=False))
    if method != "kmeans++":
        raise ParameterError(f"unknown init method {method!r}")
    # greedy variant: several D^2-sampled candidates per step, keep the one
    # that lowers the potential most
    trials = 2 + int(np.log(C))
    chosen = [int(rng.integers(N))]
    nearest = np.array(dist_to(chosen[0]), dtype=np.float64)
    for _ in range(1, C):
        p = nearest.copy()
        p[chosen] = 0.0
        total = p.sum()
        if not total > 0:
            # all remaining samples coincide with a chosen one
            p = np.ones(N)
            p[chosen] = 0.0
            total = p.sum()
        cands = rng.choice(N, size=trials, p=p / total)
        best, best_pot, best_near = -1, np.inf, None
        for j in cands:
            near = np.minimum(nearest, dist_to(int(j)))
            pot = float(near.sum())
            if pot < best_pot:
                best, best_pot, best_near = int(j), pot, near
        chosen.append(best)
        nearest = best_near
    return np.array(chosen, dtype=np.int64)


# --- K-means ---------------------------------------------------------------

def kmeans_assign(X, Z) -> np.ndarray:
    # np.argmin returns the first minimum: ties go to the lowest index
    return np.argmin(sq_dists(np.asarray(X, float), np.asarray(Z, float)), axis=1)


def _kmeans_repair(X, assignment, C):
    return repair_empty(assignment, C, lambda a: _own_dist(X, _means(X, a, C), a))


def kmeans_centers(X, assignment, C: int) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    a = _kmeans_repair(X, np.asarray(assignment), C)
    return _means(X, a, C)


def kmeans_objective(X, assignment, Z) -> float:
    return float(np.sum(_own_dist(X, Z, assignment)))


def kmeans_fit(X, C: int, epsilon: float = 1e-6, max_iter: int = 100, seed: int = 0,
               init: str = "kmeans++", return_trace: bool = False):
    """Lloyd iterations from C distinct seeded sample columns.

    Returns ``(assignment, Z)``, plus the objective trace if ``return_trace``.
    """
    X = np.asarray(X, dtype=np.float64)
    N = X.shape[1]
    _check_C(C, N)
    rng = np.random.default_rng(seed)
    idx = init_indices(rng, N, C, lambda j: sq_dists(X, X[:, j:j + 1])[:, 0], init)
    Z = X[:, idx].copy()
    a = kmeans_assign(X, Z)
    trace = [kmeans_objective(X, a, Z)]
    for _ in range(max_iter):
        a = _kmeans_repair(X, kmeans_assign(X, Z), C)
        Z = _means(X, a, C)
        obj = kmeans_objective(X, a, Z)
        if not np.isfinite(obj):
            raise NumericalError("K-means objective became non-finite")
        trace.append(obj)
        if rel_change(trace[-2], obj) < epsilon:
            break
    if return_trace:
        return a, Z, tuple(trace)
    return a, Z


# --- MV-Co-VH --------------------------------------------------------------

def composite_dists(mats: Sequence[np.ndarray], H: np.ndarray, V: Sequence[np.ndarray],
                    V_hidden: np.ndarray, w, beta: float) -> np.ndarray:
    """N x C matrix of beta * hidden + (1 - beta) * weighted visible distances."""
    visible = np.zeros((H.shape[1], V_hidden.shape[1]))
    for wk, X, Vk in zip(w, mats, V):
        visible = visible + wk * sq_dists(X, Vk)
    return beta * sq_dists(H, V_hidden) + (1.0 - beta) * visible


def _own_composite(mats, H, a, C, w, beta):
    V = [_means(X, a, C) for X in mats]
    Vh = _means(H, a, C)
    own = np.zeros(H.shape[1])
    for wk, X, Vk in zip(w, mats, V):
        own = own + wk * _own_dist(X, Vk, a)
    return beta * _own_dist(H, Vh, a) + (1.0 - beta) * own


def dispersions(mats: Sequence[np.ndarray], assignment, V) -> np.ndarray:
    return np.array([float(np.sum(_own_dist(X, Vk, assignment))) for X, Vk in zip(mats, V)])


def _check_hidden(dataset: MultiViewDataset, H: np.ndarray) -> None:
    if H.ndim != 2 or H.shape[1] != dataset.N:
        raise ValueError(f"hidden view has shape {H.shape}, expected r x {dataset.N}")


def mvcovh_objective(dataset: MultiViewDataset, H, state: ClusterState,
                     beta: float, eta: float) -> float:
    H = np.asarray(H, dtype=np.float64)
    _check_hidden(dataset, H)
    a = state.assignment
    hidden = float(np.sum(_own_dist(H, state.V_hidden, a)))
    D = dispersions(dataset.matrices, a, state.V)
    w = np.asarray(state.w, dtype=np.float64)
    return beta * hidden + (1.0 - beta) * float(w @ D) + eta * _entropy_term(w)


def mvcovh_assign(dataset: MultiViewDataset, H, state: ClusterState, beta: float) -> np.ndarray:
    H = np.asarray(H, dtype=np.float64)
    _check_hidden(dataset, H)
    D = composite_dists(dataset.matrices, H, state.V, state.V_hidden, state.w, beta)
    return np.argmin(D, axis=1)


def mvcovh_visible_centers(dataset: MultiViewDataset, assignment, C: int) -> list[np.ndarray]:
    """Per-view cluster means. Empty clusters are repaired using the unweighted
    sum of visible-view distances."""
    mats = dataset.matrices
    a = np.asarray(assignment)

    def own(a):
        return sum(_own_dist(X, _means(X, a, C), a) for X in mats)

    a = repair_empty(a, C, own)
    return [_means(X, a, C) for X in mats]


def mvcovh_hidden_centers(H, assignment, C: int) -> np.ndarray:
    return kmeans_centers(H, assignment, C)


def mvcovh_weights(dataset: MultiViewDataset, state: ClusterState, beta: float,
                   eta: float) -> np.ndarray:
    if not eta > 0:
        raise ParameterError(f"eta must be > 0, got {eta}")
    D = dispersions(dataset.matrices, state.assignment, state.V)
    return softmin_weights((1.0 - beta) * D, eta)


def mvcovh_fit(dataset: MultiViewDataset, hidden: HiddenSpaceModel | np.ndarray,
               params: HyperParams, callback=None) -> ClusterState:
    """Alternate assignment / visible centers / hidden centers / weights.

    ``hidden`` may be a fitted model or a bare r x N matrix. ``callback(t, state)``
    is invoked after initialization and after every iteration.
    """
    H = np.asarray(hidden.H if isinstance(hidden, HiddenSpaceModel) else hidden,
                   dtype=np.float64)
    _check_hidden(dataset, H)
    N, K, C = dataset.N, dataset.K, params.C
    _check_C(C, N)
    mats = dataset.matrices
    beta, eta = params.beta, params.eta
    w = np.full(K, 1.0 / K)

    def dist_to(j):
        return composite_dists(mats, H, [X[:, j:j + 1] for X in mats],
                               H[:, j:j + 1], w, beta)[:, 0]

    rng = np.random.default_rng(params.seed)
    idx = init_indices(rng, N, C, dist_to, params.init)
    state = ClusterState(np.zeros(N, dtype=np.int64),
                         tuple(X[:, idx].copy() for X in mats), H[:, idx].copy(), w)
    state = _with(state, assignment=mvcovh_assign(dataset, H, state, beta))
    trace = [mvcovh_objective(dataset, H, state, beta, eta)]
    if callback is not None:
        callback(0, state)

    for t in range(1, params.max_iter + 1):
        a = mvcovh_assign(dataset, H, state, beta)
        a = repair_empty(a, C, lambda a: _own_composite(mats, H, a, C, state.w, beta))
        state = _with(state, assignment=a,
                      V=tuple(_means(X, a, C) for X in mats),
                      V_hidden=_means(H, a, C))
        state = _with(state, w=mvcovh_weights(dataset, state, beta, eta))
        obj = mvcovh_objective(dataset, H, state, beta, eta)
        if not np.isfinite(obj):
            raise NumericalError("MV-Co-VH objective became non-finite")
        trace.append(obj)
        if callback is not None:
            callback(t, state)
        if rel_change(trace[-2], obj) < params.epsilon:
            break

    D = dispersions(mats, state.assignment, state.V)
    return _with(state, objective_trace=tuple(trace),
                 per_view_dispersions=tuple(float(d) for d in D))


def _with(state: ClusterState, **kw) -> ClusterState:
    d = dict(assignment=state.assignment, V=state.V, V_hidden=state.V_hidden, w=state.w,
             objective_trace=state.objective_trace,
             per_view_dispersions=state.per_view_dispersions)
    d.update(kw)
    return ClusterState(**d)


def stage_seeds(seed: int) -> tuple[int, int]:
    """Derive the (SHD-NMF, clustering) seeds from one master seed."""
    children = np.random.SeedSequence(seed).spawn(2)
    return tuple(int(c.generate_state(1, dtype=np.uint64)[0]) for c in children)


def fit_hidden(dataset: MultiViewDataset, params: HyperParams) -> HiddenSpaceModel:
    """Normalize and run SHD-NMF with the stage seed derived from ``params.seed``."""
    nmf_seed, _ = stage_seeds(params.seed)
    return shd_nmf(normalize_dataset(dataset), params.r, params.lam,
                   params.nmf_epsilon, params.nmf_max_iter, nmf_seed)


def fit_pipeline(dataset: MultiViewDataset, params: HyperParams,
                 hidden: HiddenSpaceModel | None = None):
    """normalize -> SHD-NMF -> MV-Co-VH. Returns ``(hidden_model, state)``.

    A precomputed ``hidden`` model (from :func:`fit_hidden` with the same
    r, lambda and seed) skips the factorization stage.
    """
    norm = normalize_dataset(dataset)
    if hidden is None:
        hidden = fit_hidden(norm, params)
    _, cluster_seed = stage_seeds(params.seed)
    state = mvcovh_fit(norm, hidden, params.replace(seed=cluster_seed))
    return hidden, state
