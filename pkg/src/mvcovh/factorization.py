"""Multiplicative-update NMF and shared-hidden-view extraction (SHD-NMF).

SHD-NMF minimizes

    O = sum_k q_k ||X^k - W^k H||_F^2 + lam * sum_k q_k ln q_k

over non-negative W^k, H and simplex weights q, cycling W-updates, the H-update
and the closed-form q-update.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .mvdata import MultiViewDataset, write_matrix_csv

EPS_DIV = 1e-12


class ParameterError(ValueError):
    pass


class NumericalError(ArithmeticError):
    pass


@dataclass(frozen=True)
class NmfFactors:
    W: np.ndarray  # m x r
    H: np.ndarray  # r x N
    objective_trace: tuple[float, ...] = ()


@dataclass(frozen=True)
class HiddenSpaceModel:
    H: np.ndarray              # r x N shared hidden view
    W: tuple[np.ndarray, ...]  # m_k x r mapping matrices
    q: np.ndarray              # view weights
    lam: float
    objective_trace: tuple[float, ...] = field(default=())

    @property
    def r(self) -> int:
        return self.H.shape[0]

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "lambda": self.lam,
            "q": [float(v) for v in self.q],
            "objective_trace": [float(v) for v in self.objective_trace],
        }

    def export(self, out_dir) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "model.json").write_text(json.dumps(self.to_json(), indent=2) + "\n")
        write_matrix_csv(out / "hidden_H.csv", self.H)
        for k, w in enumerate(self.W):
            write_matrix_csv(out / f"W_{k}.csv", w)


def _check_conform(X, W, H):
    if W.shape[0] != X.shape[0] or H.shape[1] != X.shape[1] or W.shape[1] != H.shape[0]:
        raise ValueError(
            f"shape mismatch: X {X.shape}, W {W.shape}, H {H.shape}")


def nmf_update_h(X, W, H):
    _check_conform(X, W, H)
    return H * (W.T @ X) / (W.T @ W @ H + EPS_DIV)


def nmf_update_w(X, W, H):
    _check_conform(X, W, H)
    return W * (X @ H.T) / (W @ (H @ H.T) + EPS_DIV)


def reconstruction_error(X, W, H) -> float:
    R = X - W @ H
    return float(np.sum(R * R))


def _uniform_init(rng: np.random.Generator, shape) -> np.ndarray:
    # 1 - U[0, 1) * 0.99 lies in (0.01, 1]
    return 1.0 - rng.random(shape) * 0.99


def rel_change(prev: float, cur: float) -> float:
    return abs(cur - prev) / max(abs(prev), 1e-12)


def nmf_factorize(X, r: int, epsilon: float = 1e-6, max_iter: int = 200,
                  seed: int = 0) -> NmfFactors:
    """Plain Frobenius NMF ``X ~ W H``.

    Each sweep updates W then H, the same order SHD-NMF uses, so that a
    single-view SHD-NMF fit reproduces this one exactly.
    """
    X = np.asarray(X, dtype=np.float64)
    m, n = X.shape
    if not 1 <= r <= min(m, n):
        raise ParameterError(f"rank r={r} must be in [1, {min(m, n)}]")
    if np.any(X < 0):
        raise ParameterError("NMF input must be non-negative")
    rng = np.random.default_rng(seed)
    W = _uniform_init(rng, (m, r))
    H = _uniform_init(rng, (r, n))
    trace = [reconstruction_error(X, W, H)]
    for _ in range(max_iter):
        W = nmf_update_w(X, W, H)
        H = nmf_update_h(X, W, H)
        obj = reconstruction_error(X, W, H)
        if not np.isfinite(obj):
            raise NumericalError("NMF objective became non-finite")
        trace.append(obj)
        if rel_change(trace[-2], obj) < epsilon:
            break
    return NmfFactors(W, H, tuple(trace))


def _entropy_term(p: np.ndarray) -> float:
    p = np.asarray(p, dtype=np.float64)
    nz = p > 0
    return float(np.sum(p[nz] * np.log(p[nz])))


def softmin_weights(costs, temperature: float) -> np.ndarray:
    """exp(-c_k / t) / sum_h exp(-c_h / t), evaluated with max-subtraction."""
    z = -np.asarray(costs, dtype=np.float64) / temperature
    z = z - z.max()
    e = np.exp(z)
    return e / e.sum()


def view_errors(dataset: MultiViewDataset, model: HiddenSpaceModel) -> np.ndarray:
    return np.array([reconstruction_error(X, W, model.H)
                     for X, W in zip(dataset.matrices, model.W)])


def _check_model(dataset: MultiViewDataset, model: HiddenSpaceModel) -> None:
    if len(model.W) != dataset.K or len(model.q) != dataset.K:
        raise ValueError(f"model has {len(model.W)} views, dataset has {dataset.K}")
    for X, W in zip(dataset.matrices, model.W):
        _check_conform(X, W, model.H)


def shd_objective(dataset: MultiViewDataset, model: HiddenSpaceModel) -> float:
    _check_model(dataset, model)
    q = np.asarray(model.q, dtype=np.float64)
    return float(q @ view_errors(dataset, model)) + model.lam * _entropy_term(q)


def shd_update_wk(Xk, Wk, H):
    # q_k scales numerator and denominator alike, so it drops out
    return nmf_update_w(Xk, Wk, H)


def shd_update_h(dataset: MultiViewDataset, model: HiddenSpaceModel) -> np.ndarray:
    _check_model(dataset, model)
    H = model.H
    num = np.zeros_like(H)
    den = np.zeros_like(H)
    for qk, X, W in zip(model.q, dataset.matrices, model.W):
        num += qk * (W.T @ X)
        den += qk * (W.T @ W @ H)
    return H * num / (den + EPS_DIV)


def shd_update_q(dataset: MultiViewDataset, model: HiddenSpaceModel) -> np.ndarray:
    if not model.lam > 0:
        raise ParameterError(f"lambda must be > 0 for the weight update, got {model.lam}")
    _check_model(dataset, model)
    return softmin_weights(view_errors(dataset, model), model.lam)


def _replace(model: HiddenSpaceModel, **kw) -> HiddenSpaceModel:
    d = dict(H=model.H, W=model.W, q=model.q, lam=model.lam,
             objective_trace=model.objective_trace)
    d.update(kw)
    return HiddenSpaceModel(**d)


def shd_nmf(dataset: MultiViewDataset, r: int, lam: float = 1.0,
            epsilon: float = 1e-6, max_iter: int = 200, seed: int = 0,
            callback=None) -> HiddenSpaceModel:
    """Extract the shared hidden view H from a (normalized) multi-view dataset.

    ``callback(t, model)`` is invoked after the initialization (t=0) and after
    every sweep; the tests use it to check constraints iteration by iteration.
    """
    if not lam > 0:
        raise ParameterError(f"lambda must be > 0, got {lam}")
    d = dataset.min_dim()
    if not 1 <= r <= min(d, dataset.N):
        raise ParameterError(f"hidden dimension r={r} must be in [1, {min(d, dataset.N)}]")
    mats = dataset.matrices
    if any(np.any(X < 0) for X in mats):
        raise ParameterError("views must be non-negative; normalize first")

    rng = np.random.default_rng(seed)
    W = [_uniform_init(rng, (X.shape[0], r)) for X in mats]
    H = _uniform_init(rng, (r, dataset.N))
    q = np.full(dataset.K, 1.0 / dataset.K)
    model = HiddenSpaceModel(H, tuple(W), q, float(lam))
    trace = [shd_objective(dataset, model)]
    if callback is not None:
        callback(0, model)

    for t in range(1, max_iter + 1):
        W = tuple(shd_update_wk(X, Wk, model.H) for X, Wk in zip(mats, model.W))
        model = _replace(model, W=W)
        model = _replace(model, H=shd_update_h(dataset, model))
        model = _replace(model, q=shd_update_q(dataset, model))
        obj = shd_objective(dataset, model)
        if not np.isfinite(obj):
            raise NumericalError("SHD-NMF objective became non-finite")
        trace.append(obj)
        if callback is not None:
            callback(t, model)
        if rel_change(trace[-2], obj) < epsilon:
            break

    for a in (model.H, *model.W, model.q):
        a.setflags(write=False)
    return _replace(model, objective_trace=tuple(trace))
