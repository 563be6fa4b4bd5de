"""Experiment harness: synthetic data, seeded repeats, grid search, beta sweeps,
with/without-hidden ablation and trace export.

Every run's seed is a pure function of (master seed, repeat index). All grid
cells use the same repeat seeds, so cells that differ only in beta or eta share
one SHD-NMF fit per repeat. Work is spread over a thread pool and results are
assembled in task order, so reports do not depend on the worker count.
"""
from __future__ import annotations

import csv
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .clustering import HyperParams, fit_hidden, fit_pipeline
from .factorization import HiddenSpaceModel, ParameterError
from .metrics import evaluate
from .mvdata import MultiViewDataset, format_float, normalize_dataset, normalize_view

METRICS = ("nmi", "rand_index", "precision")
POW2_GRID = tuple(2.0 ** e for e in range(-6, 7))
BETA_GRID = tuple(round(0.1 * i, 1) for i in range(11))


def default_r_grid(d: int) -> list[int]:
    if d <= 10:
        return list(range(1, d + 1))
    return sorted({-(-i * d // 10) for i in range(1, 11)})


@dataclass(frozen=True)
class GridSpec:
    eta_grid: tuple[float, ...] = POW2_GRID
    beta_grid: tuple[float, ...] = BETA_GRID
    r_grid: tuple[int, ...] | None = None  # None: derived from the dataset
    lambda_grid: tuple[float, ...] = POW2_GRID
    repeats: int = 10

    def __post_init__(self):
        for name in ("eta_grid", "beta_grid", "lambda_grid", "r_grid"):
            vals = getattr(self, name)
            if vals is None:
                continue
            if len(vals) == 0:
                raise ParameterError(f"{name} is empty")
            # sorted so the tie rule (lowest index) is independent of input order
            object.__setattr__(self, name, tuple(sorted(set(vals))))
        if self.repeats < 1:
            raise ParameterError("repeats must be >= 1")

    def resolved_r_grid(self, dataset: MultiViewDataset) -> tuple[int, ...]:
        if self.r_grid is not None:
            return self.r_grid
        return tuple(default_r_grid(dataset.min_dim()))


@dataclass
class RunReport:
    params: dict | None
    seeds: list[int]
    metrics: dict            # metric -> {"mean", "sd"}
    runs: list[dict]
    best_cell: dict | None = None
    cells: list[dict] = field(default_factory=list)
    wall_clock: float = 0.0

    def to_json(self, include_timing: bool = False) -> dict:
        d = {
            "params": self.params,
            "repeats": len(self.seeds),
            "seeds": self.seeds,
            "metrics": self.metrics,
            "runs": self.runs,
        }
        if self.best_cell is not None:
            d["best_cell"] = self.best_cell
        if self.cells:
            d["cells"] = self.cells
        if include_timing:
            d["wall_clock"] = self.wall_clock
        return d


def child_seed(master: int, index: int) -> int:
    ss = np.random.SeedSequence(master, spawn_key=(index,))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def mean_sd(values: Sequence[float]) -> dict:
    """Mean and population SD."""
    a = np.asarray(values, dtype=np.float64)
    return {"mean": float(np.mean(a)), "sd": float(np.std(a))}


# --- synthetic data ----------------------------------------------------------

def synth_multiview(C_true: int, N: int, K: int, dims: Sequence[int], separation: float,
                    noise: float | Sequence[float], seed: int = 0,
                    latent_dim: int | None = None, name: str = "synthetic") -> MultiViewDataset:
    """Planted Gaussian clusters seen through K random non-negative linear maps.

    Cluster centers are ``separation`` times orthonormal directions (the Q factor
    of a Gaussian matrix), so every pair of centers is ``separation * sqrt(2)``
    apart; points get unit Gaussian spread. The latent cloud is shifted into the
    non-negative orthant, mapped to each view by a uniform [0, 1) matrix, hit with
    Gaussian noise and min-max normalized. ``noise`` may be a scalar or one
    standard deviation per view.
    """
    if C_true < 1 or N < C_true or K < 1 or not separation > 0:
        raise ParameterError("need C_true >= 1, N >= C_true, K >= 1 and separation > 0")
    if len(dims) != K or min(dims) < 1:
        raise ParameterError(f"dims must list {K} positive feature counts")
    noises = [float(noise)] * K if np.isscalar(noise) else [float(s) for s in noise]
    if len(noises) != K or min(noises) < 0:
        raise ParameterError(f"noise must be a non-negative scalar or {K} values")
    L = latent_dim or max(C_true, 2)
    if L < C_true:
        raise ParameterError(f"latent_dim must be >= C_true={C_true}")
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.standard_normal((L, C_true)))
    centers = separation * Q
    labels = rng.permutation(np.arange(N) % C_true)
    Z = centers[:, labels] + rng.standard_normal((L, N))
    Z = Z - Z.min(axis=1, keepdims=True)
    views = []
    for k in range(K):
        A = rng.random((dims[k], L))
        X = A @ Z + noises[k] * rng.standard_normal((dims[k], N))
        views.append(normalize_view(X, f"view{k}"))
    # relabel in first-occurrence order so labels are contiguous from 0
    _, first = np.unique(labels, return_index=True)
    order = np.argsort(first)
    remap = np.empty(C_true, dtype=np.int64)
    remap[order] = np.arange(C_true)
    return MultiViewDataset(tuple(views), labels=remap[labels], name=name)


# --- evaluation engine ---------------------------------------------------------

def _hidden_key(p: HyperParams):
    return (p.r, p.lam, p.nmf_epsilon, p.nmf_max_iter, p.seed)


def _run_cells(dataset: MultiViewDataset, cells: Sequence[HyperParams], repeats: int,
               master_seed: int, workers: int = 1, keep_traces: bool = True):
    """Evaluate every cell over ``repeats`` seeded runs.

    Returns (seeds, per-cell list of run dicts, number of SHD-NMF fits).
    """
    if dataset.labels is None:
        raise ParameterError("dataset has no labels; metrics cannot be computed")
    if repeats < 1:
        raise ParameterError("repeats must be >= 1")
    norm = normalize_dataset(dataset)
    seeds = [child_seed(master_seed, i) for i in range(repeats)]
    tasks = [(c, i, cell.replace(seed=s)) for c, cell in enumerate(cells)
             for i, s in enumerate(seeds)]

    hidden_jobs: dict = {}
    for _, _, p in tasks:
        hidden_jobs.setdefault(_hidden_key(p), p)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        keys = list(hidden_jobs)
        models = list(pool.map(lambda k: fit_hidden(norm, hidden_jobs[k]), keys))
        cache: dict[tuple, HiddenSpaceModel] = dict(zip(keys, models))

        def run(task):
            _, _, p = task
            _, state = fit_pipeline(norm, p, hidden=cache[_hidden_key(p)])
            row = {"seed": p.seed, **evaluate(norm.labels, state.assignment),
                   "iterations": state.iterations,
                   "objective": state.objective_trace[-1],
                   "w": [float(v) for v in state.w]}
            if keep_traces:
                row["objective_trace"] = [float(v) for v in state.objective_trace]
            return row

        rows = list(pool.map(run, tasks))

    per_cell = [rows[c * repeats:(c + 1) * repeats] for c in range(len(cells))]
    return seeds, per_cell, len(hidden_jobs)


def _summary(runs: list[dict]) -> dict:
    return {m: mean_sd([r[m] for r in runs]) for m in METRICS}


def repeat_runs(dataset: MultiViewDataset, params: HyperParams, repeats: int = 10,
                workers: int = 1) -> RunReport:
    t0 = time.perf_counter()
    seeds, (runs,), _ = _run_cells(dataset, [params], repeats, params.seed, workers)
    return RunReport(params=params.to_json(), seeds=seeds, metrics=_summary(runs),
                     runs=runs, wall_clock=time.perf_counter() - t0)


def grid_search(dataset: MultiViewDataset, grid: GridSpec, base: HyperParams,
                workers: int = 1) -> RunReport:
    """Evaluate every (eta, beta, r, lambda) cell; pick the highest mean NMI.

    Ties go to the lexicographically lowest (eta, beta, r, lambda) index.
    """
    t0 = time.perf_counter()
    r_grid = grid.resolved_r_grid(dataset)
    index, cells = [], []
    for a, eta in enumerate(grid.eta_grid):
        for b, beta in enumerate(grid.beta_grid):
            for c, r in enumerate(r_grid):
                for d, lam in enumerate(grid.lambda_grid):
                    index.append((a, b, c, d))
                    cells.append(base.replace(eta=eta, beta=beta, r=r, lam=lam))
    seeds, per_cell, n_hidden = _run_cells(dataset, cells, grid.repeats, base.seed,
                                           workers, keep_traces=False)
    summaries = []
    for cell, idx, runs in zip(cells, index, per_cell):
        summaries.append({"index": list(idx), "eta": cell.eta, "beta": cell.beta,
                          "r": cell.r, "lambda": cell.lam, "metrics": _summary(runs),
                          "runs": runs})
    best = max(range(len(cells)),
               key=lambda i: (summaries[i]["metrics"]["nmi"]["mean"],
                              tuple(-v for v in index[i])))
    best_params = cells[best].replace(seed=base.seed)
    return RunReport(
        params=best_params.to_json(), seeds=seeds, metrics=summaries[best]["metrics"],
        runs=summaries[best]["runs"],
        best_cell={k: summaries[best][k] for k in ("index", "eta", "beta", "r", "lambda")}
        | {"hidden_fits": n_hidden},
        cells=[{k: v for k, v in s.items() if k != "runs"} for s in summaries],
        wall_clock=time.perf_counter() - t0)


def beta_sweep(dataset: MultiViewDataset, params: HyperParams,
               beta_grid: Sequence[float] = BETA_GRID, repeats: int = 10,
               workers: int = 1) -> list[dict]:
    """One row per beta: mean/SD of each metric over seeded repeats."""
    cells = [params.replace(beta=float(b)) for b in beta_grid]
    _, per_cell, _ = _run_cells(dataset, cells, repeats, params.seed, workers,
                                keep_traces=False)
    rows = []
    for cell, runs in zip(cells, per_cell):
        summ = _summary(runs)
        rows.append({"beta": cell.beta,
                     **{f"{m}_{s}": summ[m][s] for m in METRICS for s in ("mean", "sd")}})
    return rows


def ablation_hidden(dataset: MultiViewDataset, params: HyperParams, repeats: int = 10,
                    workers: int = 1) -> dict:
    """Same seeds, beta=0 (visible views only) against the given beta > 0."""
    if not params.beta > 0:
        raise ParameterError("the with-hidden arm needs beta > 0")
    arms = [params.replace(beta=0.0), params]
    seeds, (without, with_), n_hidden = _run_cells(dataset, arms, repeats, params.seed,
                                                  workers, keep_traces=False)
    return {
        "params": params.to_json(),
        "seeds": seeds,
        "hidden_fits": n_hidden,
        "without_hidden": {"beta": 0.0, "metrics": _summary(without), "runs": without},
        "with_hidden": {"beta": params.beta, "metrics": _summary(with_), "runs": with_},
    }


# --- trace I/O -----------------------------------------------------------------

def export_trace(source, path) -> Path:
    """Write ``iteration,objective`` rows. ``source`` is a ClusterState,
    HiddenSpaceModel or a plain sequence of objective values."""
    trace = getattr(source, "objective_trace", source)
    trace = list(trace)
    if not trace:
        raise ValueError("objective trace is empty")
    path = Path(path)
    with open(path, "w", newline="") as fh:
        fh.write("iteration,objective\n")
        for i, v in enumerate(trace):
            fh.write(f"{i},{format_float(v)}\n")
    return path


def read_trace(path) -> list[float]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        return [float(row[1]) for row in reader if row]
