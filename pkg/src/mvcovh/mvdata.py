"""Multi-view dataset container, manifest loading and per-feature normalization.

Views are stored feature-major: each matrix is ``m_k x N`` with one column per
sample. CSV files on disk are sample-major and are transposed on load.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np


class DataError(ValueError):
    """Base class for dataset loading / validation failures."""


class ManifestNotFoundError(DataError, FileNotFoundError):
    pass


class RowCountMismatchError(DataError):
    pass


class NonNumericCellError(DataError):
    pass


class EmptyViewError(DataError):
    pass


class NonFiniteValueError(DataError):
    pass


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ViewMatrix:
    name: str
    data: np.ndarray  # m_k x N

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 2:
            raise DataError(f"view {self.name!r} must be 2-D, got shape {data.shape}")
        if data.size == 0:
            raise EmptyViewError(f"view {self.name!r} is empty")
        object.__setattr__(self, "data", _frozen(data))

    @property
    def n_features(self) -> int:
        return self.data.shape[0]

    @property
    def n_samples(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class MultiViewDataset:
    views: tuple[ViewMatrix, ...]
    labels: np.ndarray | None = None
    name: str = "dataset"

    def __post_init__(self):
        views = tuple(self.views)
        if not views:
            raise DataError("a dataset needs at least one view")
        n = views[0].n_samples
        for v in views:
            if v.n_samples != n:
                raise RowCountMismatchError(
                    f"view {v.name!r} has {v.n_samples} samples, expected {n}"
                )
        object.__setattr__(self, "views", views)
        if self.labels is not None:
            labels = np.asarray(self.labels)
            if labels.ndim != 1 or labels.shape[0] != n:
                raise DataError(f"labels must have length {n}, got shape {labels.shape}")
            if not np.issubdtype(labels.dtype, np.integer):
                raise DataError("labels must be integers; use remap_labels first")
            if labels.min() < 0 or np.any(np.bincount(labels) == 0):
                raise DataError("labels must be contiguous integers 0..C-1")
            labels = np.array(labels, dtype=np.int64)
            labels.setflags(write=False)
            object.__setattr__(self, "labels", labels)

    @property
    def N(self) -> int:
        return self.views[0].n_samples

    @property
    def K(self) -> int:
        return len(self.views)

    @property
    def matrices(self) -> list[np.ndarray]:
        return [v.data for v in self.views]

    @property
    def n_classes(self) -> int | None:
        return None if self.labels is None else int(self.labels.max()) + 1

    def min_dim(self) -> int:
        return min(v.n_features for v in self.views)

    @classmethod
    def from_arrays(cls, arrays: Sequence[np.ndarray], labels=None, name="dataset",
                    view_names: Sequence[str] | None = None) -> "MultiViewDataset":
        """Build from feature-major arrays (``m_k x N``)."""
        names = view_names or [f"view{k}" for k in range(len(arrays))]
        return cls(tuple(ViewMatrix(nm, a) for nm, a in zip(names, arrays)),
                   labels=labels, name=name)


def normalize_view(raw, name: str = "view") -> ViewMatrix:
    """Min-max scale each feature (row) to [0, 1]; constant rows become 0."""
    x = np.asarray(raw, dtype=np.float64)
    if x.ndim != 2:
        raise DataError(f"expected a 2-D matrix, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise NonFiniteValueError(f"view {name!r} contains NaN or Inf")
    lo = x.min(axis=1, keepdims=True)
    span = x.max(axis=1, keepdims=True) - lo
    const = span == 0
    out = (x - lo) / np.where(const, 1.0, span)
    out = np.where(const, 0.0, out)
    # rounding can leave a value a hair outside [0, 1]
    return ViewMatrix(name, np.clip(out, 0.0, 1.0))


def normalize_dataset(ds: MultiViewDataset) -> MultiViewDataset:
    return MultiViewDataset(tuple(normalize_view(v.data, v.name) for v in ds.views),
                            labels=ds.labels, name=ds.name)


def remap_labels(tokens: Sequence) -> np.ndarray:
    """Map arbitrary class tokens to 0..C-1 in first-occurrence order."""
    index: dict = {}
    return np.array([index.setdefault(t, len(index)) for t in tokens], dtype=np.int64)


def _read_rows(path: Path) -> list[list[str]]:
    if not path.is_file():
        raise ManifestNotFoundError(f"file not found: {path}")
    with open(path, newline="") as fh:
        return [row for row in csv.reader(fh) if row and any(c.strip() for c in row)]


def read_view_csv(path, has_header: bool = False) -> np.ndarray:
    """Read a sample-major CSV and return the feature-major ``m x N`` matrix."""
    path = Path(path)
    rows = _read_rows(path)
    if has_header:
        rows = rows[1:]
    if not rows or not rows[0]:
        raise EmptyViewError(f"view file {path} has no data rows")
    width = len(rows[0])
    out = np.empty((len(rows), width), dtype=np.float64)
    for i, row in enumerate(rows):
        if len(row) != width:
            raise NonNumericCellError(
                f"{path}: row {i} has {len(row)} cells, expected {width}")
        for j, cell in enumerate(row):
            try:
                out[i, j] = float(cell)
            except ValueError:
                raise NonNumericCellError(
                    f"{path}: non-numeric cell {cell!r} at row {i}, column {j}") from None
    return out.T


def read_labels_csv(path) -> np.ndarray:
    rows = _read_rows(Path(path))
    return remap_labels([row[0].strip() for row in rows])


def load_manifest(path) -> MultiViewDataset:
    """Load a dataset described by a JSON manifest (paths relative to the manifest).

    The returned views are *not* normalized.
    """
    path = Path(path)
    if not path.is_file():
        raise ManifestNotFoundError(f"manifest not found: {path}")
    meta = json.loads(path.read_text())
    base = path.parent
    views = []
    n_rows = None
    for entry in meta["views"]:
        data = read_view_csv(base / entry["path"], bool(entry.get("has_header", False)))
        if n_rows is not None and data.shape[1] != n_rows:
            raise RowCountMismatchError(
                f"view {entry['name']!r} has {data.shape[1]} rows, expected {n_rows}")
        n_rows = data.shape[1]
        views.append(ViewMatrix(entry["name"], data))
    if not views:
        raise EmptyViewError("manifest lists no views")
    labels = None
    if meta.get("labels"):
        labels = read_labels_csv(base / meta["labels"])
        if labels.shape[0] != n_rows:
            raise RowCountMismatchError(
                f"labels have {labels.shape[0]} rows, expected {n_rows}")
    return MultiViewDataset(tuple(views), labels=labels, name=meta.get("name", path.stem))


def format_float(x: float) -> str:
    # repr is the shortest string that round-trips exactly
    return repr(float(x))


def write_matrix_csv(path, matrix) -> None:
    m = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
    with open(path, "w", newline="") as fh:
        for row in m:
            fh.write(",".join(format_float(v) for v in row) + "\n")


def read_matrix_csv(path) -> np.ndarray:
    rows = _read_rows(Path(path))
    return np.array([[float(c) for c in row] for row in rows], dtype=np.float64)


def save_dataset(ds: MultiViewDataset, out_dir) -> Path:
    """Write views (sample-major CSV), labels and a manifest; return the manifest path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for v in ds.views:
        fname = f"{v.name}.csv"
        write_matrix_csv(out / fname, v.data.T)
        entries.append({"name": v.name, "path": fname, "has_header": False})
    labels_name = None
    if ds.labels is not None:
        labels_name = "labels.csv"
        (out / labels_name).write_text("".join(f"{int(c)}\n" for c in ds.labels))
    manifest = {"name": ds.name, "views": entries, "labels": labels_name}
    mpath = out / "manifest.json"
    mpath.write_text(json.dumps(manifest, indent=2) + "\n")
    return mpath
