"""External clustering indices: NMI, Rand index and the pairwise precision
f11 / (f00 + f11).

f11 counts pairs placed together in both partitions, f00 pairs separated in
both. Logs are natural; NMI does not depend on the base.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np


class UndefinedMetricError(ValueError):
    pass


class DegenerateMetricWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ContingencyTable:
    counts: np.ndarray  # classes x clusters

    @property
    def class_sizes(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def cluster_sizes(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    @property
    def N(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class PairCounts:
    f00: int
    f11: int
    total_pairs: int
    # same cluster, different class; only used by precision_conventional
    f10: int = 0


def _as_labels(x, name) -> np.ndarray:
    a = np.asarray(x)
    if a.ndim != 1:
        raise ValueError(f"{name} must be 1-D")
    if a.size and (not np.issubdtype(a.dtype, np.integer) or a.min() < 0):
        raise ValueError(f"{name} must hold non-negative integers")
    return a.astype(np.int64)


def contingency(labels, assignment) -> ContingencyTable:
    y = _as_labels(labels, "labels")
    a = _as_labels(assignment, "assignment")
    if y.shape != a.shape:
        raise ValueError(f"length mismatch: {y.shape[0]} labels vs {a.shape[0]} assignments")
    counts = np.zeros((y.max() + 1, a.max() + 1), dtype=np.int64)
    np.add.at(counts, (y, a), 1)
    return ContingencyTable(counts)


def _comb2(n) -> int:
    return sum(int(v) * (int(v) - 1) // 2 for v in np.ravel(n))


def pair_counts(labels, assignment) -> PairCounts:
    table = contingency(labels, assignment)
    N = table.N
    if N < 2:
        raise UndefinedMetricError("pair counts need at least two samples")
    total = N * (N - 1) // 2
    f11 = _comb2(table.counts)
    same_class = _comb2(table.class_sizes)
    same_cluster = _comb2(table.cluster_sizes)
    f00 = total - same_class - same_cluster + f11
    return PairCounts(f00=f00, f11=f11, total_pairs=total, f10=same_cluster - f11)


def nmi(table: ContingencyTable) -> float:
    """Normalized mutual information, geometric-mean normalization.

    Returns 0.0 with a :class:`DegenerateMetricWarning` when either partition
    has a single group (zero entropy).
    """
    n = table.counts.astype(np.float64)
    N = n.sum()
    ni = n.sum(axis=1)
    nj = n.sum(axis=0)
    ni, nj = ni[ni > 0], nj[nj > 0]
    hi = float(np.sum(ni * np.log(ni / N)))
    hj = float(np.sum(nj * np.log(nj / N)))
    if hi == 0.0 or hj == 0.0:
        warnings.warn("NMI undefined for a single class or single cluster; returning 0",
                      DegenerateMetricWarning, stacklevel=2)
        return 0.0
    rows, cols = np.nonzero(n)
    nij = n[rows, cols]
    row_tot = n.sum(axis=1)[rows]
    col_tot = n.sum(axis=0)[cols]
    mi = float(np.sum(nij * np.log(N * nij / (row_tot * col_tot))))
    return min(max(mi / math.sqrt(hi * hj), 0.0), 1.0)


def rand_index(pairs: PairCounts) -> float:
    if pairs.total_pairs < 1:
        raise UndefinedMetricError("Rand index needs at least two samples")
    return (pairs.f00 + pairs.f11) / pairs.total_pairs


def precision_pairs(pairs: PairCounts) -> float:
    denom = pairs.f00 + pairs.f11
    if denom == 0:
        raise UndefinedMetricError("precision undefined: f00 + f11 = 0")
    return pairs.f11 / denom


def precision_conventional(pairs: PairCounts) -> float:
    """Standard pairwise precision f11 / (f11 + f10). Not used in reports."""
    denom = pairs.f11 + pairs.f10
    if denom == 0:
        raise UndefinedMetricError("precision undefined: no same-cluster pairs")
    return pairs.f11 / denom


def evaluate(labels, assignment) -> dict:
    """Metric report ``{nmi, rand_index, precision}``."""
    pairs = pair_counts(labels, assignment)
    return {
        "nmi": nmi(contingency(labels, assignment)),
        "rand_index": rand_index(pairs),
        "precision": precision_pairs(pairs),
    }
