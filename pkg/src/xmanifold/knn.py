"""Exact brute-force k-nearest-neighbour search.

Distances are accumulated in float64 regardless of the float32 storage
of the inputs; ties are broken toward the lower index.  Brute force is
the production path, not a fallback: at the point-set sizes this tool
targets it is fast enough, and exactness removes a nondeterminism
source from the embedding stage built on top of it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core_data import FeatureMatrix
from .errors import DimensionError, InputError

METRICS = ("euclidean", "cosine")


@dataclass
class KnnGraph:
    """Per-row neighbour ids and ascending distances.

    ``indices`` refers to rows of the searched set: the same matrix for
    :func:`knn_fit` (self excluded), the reference matrix for
    :func:`knn_query` (self not excluded; queries are a different set).
    """

    k: int
    indices: np.ndarray
    distances: np.ndarray
    metric: str


def _pairwise_to(reference: np.ndarray, query_row: np.ndarray, metric: str) -> np.ndarray:
    """Distances from one query row to every reference row, in float64."""
    if metric == "euclidean":
        diff = reference - query_row
        return np.sqrt(np.sum(diff * diff, axis=1))
    if metric == "cosine":
        ref_norms = np.sqrt(np.sum(reference * reference, axis=1))
        q_norm = np.sqrt(np.sum(query_row * query_row))
        dots = reference @ query_row
        with np.errstate(invalid="ignore", divide="ignore"):
            sims = dots / (ref_norms * q_norm)
        dist = 1.0 - sims
        # zero vectors are defined to be at distance 1 from everything
        dist[ref_norms == 0.0] = 1.0
        if q_norm == 0.0:
            dist[:] = 1.0
        return np.maximum(dist, 0.0)
    raise InputError(f"unknown metric {metric!r}; expected one of {METRICS}")


def _rank_row(dist: np.ndarray, k: int) -> np.ndarray:
    # stable sort: equal distances resolve to the lower index
    return np.argsort(dist, kind="stable")[:k]


def knn_fit(m: FeatureMatrix, k: int, metric: str = "euclidean") -> KnnGraph:
    """Exact k nearest neighbours of every row within ``m``, self excluded."""
    n = m.rows
    if not 1 <= k < n:
        raise InputError(f"k must satisfy 1 <= k < N (got k={k}, N={n})")
    data = m.values.astype(np.float64)
    indices = np.empty((n, k), dtype=np.int64)
    distances = np.empty((n, k), dtype=np.float64)
    for i in range(n):
        dist = _pairwise_to(data, data[i], metric)
        dist[i] = np.inf
        order = _rank_row(dist, k)
        indices[i] = order
        distances[i] = dist[order]
    return KnnGraph(k=k, indices=indices, distances=distances, metric=metric)


def knn_query(
    reference: FeatureMatrix,
    queries: FeatureMatrix,
    k: int,
    metric: str = "euclidean",
) -> KnnGraph:
    """Exact k nearest reference rows for every query row.

    Unlike :func:`knn_fit` the query set is distinct from the reference
    set, so a query identical to a reference point legitimately finds it
    at distance zero.
    """
    if reference.cols != queries.cols:
        raise DimensionError(
            f"reference has {reference.cols} columns but queries have "
            f"{queries.cols}; zero_pad both sets to a common width first"
        )
    if not 1 <= k <= reference.rows:
        raise InputError(
            f"k must satisfy 1 <= k <= reference rows (got k={k}, M={reference.rows})"
        )
    ref = reference.values.astype(np.float64)
    qry = queries.values.astype(np.float64)
    n = queries.rows
    indices = np.empty((n, k), dtype=np.int64)
    distances = np.empty((n, k), dtype=np.float64)
    for i in range(n):
        dist = _pairwise_to(ref, qry[i], metric)
        order = _rank_row(dist, k)
        indices[i] = order
        distances[i] = dist[order]
    return KnnGraph(k=k, indices=indices, distances=distances, metric=metric)
