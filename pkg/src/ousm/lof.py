"""Local Outlier Factor scoring and its probabilistic (pLOF) normalization.

The dense O(n^2) kernel lives in the compiled ``_lof_core`` extension; when it
has not been built the numpy implementation in ``_lof_py`` is used instead.
Set ``OUSM_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import csv
import os
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erf

from .errors import InvalidArgument, InvalidData
from . import _lof_py

if os.environ.get("OUSM_PURE_PYTHON"):
    _core = _lof_py
else:
    try:
        from . import _lof_core as _core
    except ImportError:  # extension not compiled
        _core = _lof_py

BACKEND = "compiled" if _core is not _lof_py else "python"


@dataclass
class Neighborhoods:
    """k-distances and tie-inclusive neighbor sets in CSR layout."""

    k: int
    kdist: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    distances: np.ndarray  # full pairwise matrix, kept for reach-distances

    def neighbors(self, i):
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def neighbor_distances(self, i):
        return self.distances[i, self.neighbors(i)]


@dataclass
class LofScores:
    lof: np.ndarray
    plof: np.ndarray
    k: int
    warnings: list = field(default_factory=list)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["sample_index", "lof", "plof"])
            for i, (a, b) in enumerate(zip(self.lof, self.plof)):
                w.writerow([i, repr(float(a)), repr(float(b))])


def _check(features, k, backend=None):
    X = np.ascontiguousarray(features, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise InvalidArgument(f"features must be 2-D, got shape {X.shape}")
    if int(k) != k or k < 1:
        raise InvalidArgument(f"k must be a positive integer, got {k}")
    if X.shape[0] <= k:
        raise InvalidArgument(f"need more than k={k} rows, got {X.shape[0]}")
    if not np.all(np.isfinite(X)):
        raise InvalidData("features contain non-finite values")
    return X, int(k)


def _kernel(backend):
    if backend is None:
        return _core
    if backend == "python":
        return _lof_py
    if backend == "compiled":
        if _core is _lof_py:
            raise InvalidArgument("compiled LOF extension is not available")
        return _core
    raise InvalidArgument(f"unknown backend {backend!r}")


def knn_neighborhoods(features, k, backend=None) -> Neighborhoods:
    """Exhaustive Euclidean k-NN; every point tied with the k-th distance is kept."""
    X, k = _check(features, k)
    core = _kernel(backend)
    D = core.pairwise_distances(X)
    kdist, indptr, indices = core.knn_core(D, k)
    return Neighborhoods(k, np.asarray(kdist), np.asarray(indptr), np.asarray(indices), D)


def lof_scores(features, k, backend=None) -> np.ndarray:
    """LOF_k for every row of ``features``.

    Samples whose whole neighborhood sits at distance zero (duplicates) score
    exactly 1. Infinite neighbor densities are capped at the largest finite
    density of the round so every score stays finite.
    """
    nb = knn_neighborhoods(features, k, backend=backend)
    core = _kernel(backend)
    _, lof = core.lof_core(nb.distances, nb.kdist, nb.indptr, nb.indices)
    return np.asarray(lof)


def plof_normalize(lof) -> np.ndarray:
    """Gaussian-erf scaling of LOF values into outlier probabilities in [0, 1]."""
    lof = np.asarray(lof, dtype=np.float64)
    if lof.size == 0:
        raise InvalidArgument("empty LOF vector")
    if lof.size < 2:
        raise InvalidArgument("pLOF needs at least 2 samples")
    if not np.all(np.isfinite(lof)) or np.any(lof < 0):
        raise InvalidData("LOF values must be finite and non-negative")
    if np.ptp(lof) == 0.0:
        return np.zeros_like(lof)
    mu = lof.mean()
    sigma = lof.std()
    return np.clip(erf((lof - mu) / (sigma * np.sqrt(2.0))), 0.0, 1.0)


def _score_all(features, k, backend):
    lof = lof_scores(features, k, backend=backend)
    return lof, plof_normalize(lof)


def score_global(features, k, backend=None) -> LofScores:
    lof, plof = _score_all(features, k, backend)
    return LofScores(lof, plof, int(k))


def score_by_class(features, labels, k, backend=None) -> LofScores:
    """Score each observed class separately and reassemble in input order.

    A class with at most ``k`` members cannot be scored on its own; its members
    take their scores from one global round instead and a warning is recorded.
    """
    X, k = _check(features, k)
    labels = np.asarray(labels)
    if labels.shape != (X.shape[0],):
        raise InvalidArgument("labels must have one entry per feature row")
    lof = np.empty(X.shape[0])
    plof = np.empty(X.shape[0])
    notes = []
    small = []
    for c in np.unique(labels):
        idx = np.flatnonzero(labels == c)
        if idx.size <= k:
            small.append(idx)
            msg = f"class {c} has {idx.size} members (<= k={k}); using global scores"
            notes.append(msg)
            warnings.warn(msg, RuntimeWarning, stacklevel=2)
            continue
        lof[idx], plof[idx] = _score_all(X[idx], k, backend)
    if small:
        glof, gplof = _score_all(X, k, backend)
        for idx in small:
            lof[idx], plof[idx] = glof[idx], gplof[idx]
    return LofScores(lof, plof, k, notes)
