"""Manifold embedding: fit a 2-D layout on one feature set and
cross-project another feature set onto it.

The construction is the usual fuzzy-neighbourhood one: exact kNN, a
per-point (rho, sigma) calibration so each point's membership mass hits
log2(k), probabilistic-union symmetrization, then a negative-sampling
SGD layout of the graph.  Projection of a second feature set reuses the
fitted calibration machinery against the frozen training embedding, so
new points can only land where the training manifold gives them
neighbours; points whose total membership underflows are flagged rather
than dropped.

Everything downstream of the seed is deterministic: fitting twice with
the same parameters reproduces the coordinates bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .core_data import FeatureMatrix
from .errors import DimensionError, InputError
from .knn import KnnGraph, knn_fit, knn_query

SIGMA_LOWER = 1e-8
SIGMA_UPPER = 1e8
MEMBERSHIP_FLOOR = 1e-12

INITS = ("spectral", "seeded_random")


@dataclass(frozen=True)
class EmbedParams:
    n_neighbors: int = 15
    min_dist: float = 0.1
    n_epochs: int = 200
    metric: str = "euclidean"
    seed: int = 42
    init: str = "spectral"
    negative_sample_rate: int = 5
    learning_rate: float = 1.0

    def __post_init__(self):
        if self.n_neighbors < 2:
            raise InputError("n_neighbors must be >= 2")
        if self.n_epochs < 1:
            raise InputError("n_epochs must be >= 1")
        if not 0.0 < self.min_dist <= 1.0:
            raise InputError("min_dist must be in (0, 1]")
        if self.init not in INITS:
            raise InputError(f"init must be one of {INITS}")


@dataclass
class Embedding2D:
    """N x 2 coordinates plus provenance.

    ``flagged`` marks projected points whose total membership weight
    underflowed (no usable neighbours); it is None for fitted embeddings.
    """

    coords: np.ndarray
    source_tag: str = ""
    flagged: np.ndarray | None = None

    def __post_init__(self):
        coords = np.ascontiguousarray(self.coords, dtype=np.float64)
        if coords.ndim != 2 or coords.shape[1] != 2:
            raise InputError(f"embedding must be N x 2, got {coords.shape}")
        if not np.all(np.isfinite(coords)):
            raise InputError("embedding contains NaN or Inf")
        self.coords = coords

    @property
    def rows(self) -> int:
        return self.coords.shape[0]


@dataclass
class EmbeddingModel:
    """Fitted embedding state, sufficient to cross-project new data."""

    training_data: FeatureMatrix
    knn: KnnGraph
    rho: np.ndarray
    sigma: np.ndarray
    fuzzy_graph: sp.csr_matrix
    curve_a: float
    curve_b: float
    coords: Embedding2D
    params: EmbedParams


def smooth_knn_calibrate(distances: np.ndarray, k: int) -> tuple[float, float]:
    """Per-point calibration of the membership kernel.

    rho is the smallest positive neighbour distance (0 if all are zero).
    sigma solves sum_j exp(-max(0, d_j - rho)/sigma) = log2(k) by 64
    bisection steps on [1e-8, 1e8]; when the target is unreachable the
    binding bound is returned.
    """
    d = np.asarray(distances, dtype=np.float64)
    positive = d[d > 0.0]
    rho = float(positive.min()) if positive.size else 0.0
    target = math.log2(k)
    shifted = np.maximum(d - rho, 0.0)

    def mass(s: float) -> float:
        return float(np.exp(-shifted / s).sum())

    if mass(SIGMA_LOWER) >= target:
        return rho, SIGMA_LOWER
    if mass(SIGMA_UPPER) <= target:
        return rho, SIGMA_UPPER
    lo, hi = SIGMA_LOWER, SIGMA_UPPER
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        if mass(mid) > target:
            hi = mid
        else:
            lo = mid
    return rho, 0.5 * (lo + hi)


def fit_curve(min_dist: float) -> tuple[float, float]:
    """Least-squares (a, b) for the low-dimensional kernel 1/(1+a*x^(2b)).

    The target is 1 for x <= min_dist and exp(-(x - min_dist)) beyond,
    sampled at 300 points on [0, 3].  Solved by a coarse grid followed
    by alternating golden-section descent on each parameter until the
    objective stops improving by more than 1e-6.
    """
    if not 0.0 < min_dist <= 1.0:
        raise InputError("min_dist must be in (0, 1]")
    xs = np.linspace(0.0, 3.0, 300)
    target = np.where(xs <= min_dist, 1.0, np.exp(-(xs - min_dist)))
    x2 = xs * xs

    def objective(a: float, b: float) -> float:
        curve = 1.0 / (1.0 + a * np.power(x2, b))
        resid = curve - target
        return float(resid @ resid)

    grid_a = np.geomspace(1e-2, 1e2, 81)
    grid_b = np.linspace(0.1, 3.0, 59)
    best = (math.inf, 1.0, 1.0)
    for ga in grid_a:
        for gb in grid_b:
            val = objective(ga, gb)
            if val < best[0]:
                best = (val, float(ga), float(gb))
    obj, a, b = best

    invphi = (math.sqrt(5.0) - 1.0) / 2.0

    def golden(fun, lo, hi):
        x1 = hi - invphi * (hi - lo)
        x2_ = lo + invphi * (hi - lo)
        f1, f2 = fun(x1), fun(x2_)
        for _ in range(80):
            if f1 < f2:
                hi, x2_, f2 = x2_, x1, f1
                x1 = hi - invphi * (hi - lo)
                f1 = fun(x1)
            else:
                lo, x1, f1 = x1, x2_, f2
                x2_ = lo + invphi * (hi - lo)
                f2 = fun(x2_)
        return 0.5 * (lo + hi)

    for _ in range(60):
        a = math.exp(golden(lambda t: objective(math.exp(t), b), math.log(a / 4), math.log(a * 4)))
        b = golden(lambda t: objective(a, t), max(b - 0.5, 0.05), b + 0.5)
        new_obj = objective(a, b)
        if obj - new_obj < 1e-6:
            obj = new_obj
            break
        obj = new_obj
    return a, b


def _membership_weights(
    distances: np.ndarray, k: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Row-wise (rho, sigma, weights) for a (n, k) distance matrix."""
    n = distances.shape[0]
    rho = np.empty(n)
    sigma = np.empty(n)
    weights = np.empty_like(distances)
    for i in range(n):
        rho[i], sigma[i] = smooth_knn_calibrate(distances[i], k)
        weights[i] = np.exp(-np.maximum(distances[i] - rho[i], 0.0) / sigma[i])
    return rho, sigma, weights


def _fuzzy_union(
    indices: np.ndarray, weights: np.ndarray, n: int
) -> sp.csr_matrix:
    """Symmetrize directed memberships: B = W + W^T - W o W^T."""
    rows = np.repeat(np.arange(n, dtype=np.int64), indices.shape[1])
    w = sp.coo_matrix(
        (weights.ravel(), (rows, indices.ravel())), shape=(n, n)
    ).tocsr()
    w.sum_duplicates()
    wt = w.T.tocsr()
    graph = w + wt - w.multiply(wt)
    graph = graph.tocsr()
    graph.eliminate_zeros()
    graph.sort_indices()
    return graph


def _spectral_coords(graph: sp.csr_matrix, rng: np.random.Generator) -> np.ndarray:
    """Eigenvectors 2 and 3 of the symmetric-normalized Laplacian of B,
    scaled to a max absolute coordinate of 10 with a whisper of seeded
    noise to break exact degeneracies."""
    n = graph.shape[0]
    deg = np.asarray(graph.sum(axis=1)).ravel()
    inv_sqrt = 1.0 / np.sqrt(deg)
    if n <= 4096:
        lap = np.eye(n) - (inv_sqrt[:, None] * graph.toarray()) * inv_sqrt[None, :]
        _vals, vecs = np.linalg.eigh(lap)
        coords = vecs[:, 1:3]
    else:
        from scipy.sparse.linalg import eigsh

        scaled = sp.diags(inv_sqrt) @ graph @ sp.diags(inv_sqrt)
        lap = sp.identity(n, format="csr") - scaled
        v0 = np.full(n, 1.0 / math.sqrt(n))
        _vals, vecs = eigsh(lap, k=3, which="SA", v0=v0, maxiter=1000, tol=1e-8)
        coords = vecs[:, 1:3]
    peak = np.abs(coords).max()
    if peak == 0.0:
        raise ArithmeticError("degenerate spectral coordinates")
    coords = coords * (10.0 / peak)
    coords = coords + rng.normal(0.0, 1e-4, size=coords.shape)
    return np.ascontiguousarray(coords, dtype=np.float64)


def _epoch_steps(weights: np.ndarray, n_epochs: int) -> np.ndarray:
    """Due-time increment per edge: edge with weight w fires
    ceil(n_epochs * w / w_max) times, spread evenly."""
    counts = np.ceil(n_epochs * weights / weights.max())
    return n_epochs / counts


def fit(data: FeatureMatrix, params: EmbedParams = EmbedParams()) -> EmbeddingModel:
    """Fit a 2-D embedding of ``data``; deterministic for a fixed seed."""
    if data.rows <= params.n_neighbors:
        raise InputError(
            f"need more points than n_neighbors (N={data.rows}, "
            f"n_neighbors={params.n_neighbors})"
        )
    knn = knn_fit(data, params.n_neighbors, params.metric)
    rho, sigma, weights = _membership_weights(knn.distances, params.n_neighbors)
    graph = _fuzzy_union(knn.indices, weights, data.rows)
    curve_a, curve_b = fit_curve(params.min_dist)

    rng = np.random.default_rng(params.seed)
    if params.init == "spectral":
        try:
            coords = _spectral_coords(graph, rng)
        except Exception:
            coords = rng.uniform(-10.0, 10.0, size=(data.rows, 2))
    else:
        coords = rng.uniform(-10.0, 10.0, size=(data.rows, 2))
    coords = np.ascontiguousarray(coords, dtype=np.float64)

    from ._layout import optimize_layout  # deferred: numba is slow to import

    coo = graph.tocoo()
    order = np.lexsort((coo.col, coo.row))
    heads = coo.row[order].astype(np.int64)
    tails = coo.col[order].astype(np.int64)
    edge_w = coo.data[order]

    optimize_layout(
        coords,
        coords,
        heads,
        tails,
        _epoch_steps(edge_w, params.n_epochs),
        float(curve_a),
        float(curve_b),
        float(params.learning_rate),
        int(params.n_epochs),
        int(params.negative_sample_rate),
        np.uint64(params.seed ^ 0xD1B54A32D192ED03),
        True,
        True,
    )
    if not np.all(np.isfinite(coords)):
        raise ArithmeticError("layout produced non-finite coordinates")

    return EmbeddingModel(
        training_data=data,
        knn=knn,
        rho=rho,
        sigma=sigma,
        fuzzy_graph=graph,
        curve_a=float(curve_a),
        curve_b=float(curve_b),
        coords=Embedding2D(coords, source_tag=data.source_tag or "fit"),
        params=params,
    )


def transform(model: EmbeddingModel, new_data: FeatureMatrix) -> Embedding2D:
    """Cross-project ``new_data`` onto the fitted manifold.

    New points are initialized at the membership-weighted mean of their
    nearest training points' embedded coordinates and then optimized for
    max(30, n_epochs // 3) epochs against the frozen reference layout.
    The reference coordinates are never modified.  Points whose total
    membership weight falls below 1e-12 are flagged in the result.
    """
    train = model.training_data
    if new_data.cols != train.cols:
        raise DimensionError(
            f"projected data has {new_data.cols} columns but the model was "
            f"fitted on {train.cols}; zero_pad to the model width first"
        )
    params = model.params
    k = params.n_neighbors
    query = knn_query(train, new_data, k, params.metric)
    _rho, _sigma, weights = _membership_weights(query.distances, k)

    totals = weights.sum(axis=1)
    flagged = totals < MEMBERSHIP_FLOOR
    ref_coords = model.coords.coords
    n_new = new_data.rows
    coords = np.empty((n_new, 2), dtype=np.float64)
    for i in range(n_new):
        neighbor_coords = ref_coords[query.indices[i]]
        if flagged[i]:
            coords[i] = neighbor_coords.mean(axis=0)
        else:
            coords[i] = (weights[i] @ neighbor_coords) / totals[i]

    from ._layout import optimize_layout  # deferred: numba is slow to import

    n_epochs = max(30, params.n_epochs // 3)
    heads = np.repeat(np.arange(n_new, dtype=np.int64), k)
    tails = query.indices.ravel().astype(np.int64)
    edge_w = weights.ravel()

    optimize_layout(
        coords,
        ref_coords,
        heads,
        tails,
        _epoch_steps(edge_w, n_epochs),
        float(model.curve_a),
        float(model.curve_b),
        float(params.learning_rate),
        int(n_epochs),
        int(params.negative_sample_rate),
        np.uint64(params.seed ^ 0x9E6C63D0876A9A47),
        False,
        False,
    )
    if not np.all(np.isfinite(coords)):
        raise ArithmeticError("projection produced non-finite coordinates")

    tag = new_data.source_tag or "projected"
    return Embedding2D(coords, source_tag=tag, flagged=flagged)
