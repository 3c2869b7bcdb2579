"""Global-overlap metrics on paired 2-D embeddings.

Two views of "how far apart are these point clouds":

* the normalized symmetric Hausdorff distance, max over directed
  max-min Euclidean distances, scaled by the bounding-box diagonal of
  the union so the result lives in [0, 1] (0 = full overlap);
* Procrustes disparity, the residual after optimally translating,
  rotating (reflections allowed) and scaling one set onto the other.

Both are exact brute-force computations; nothing is approximated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .embedding import Embedding2D
from .errors import InputError, ShapeMismatchError


@dataclass(frozen=True)
class HausdorffResult:
    directed_12: float
    directed_21: float
    symmetric: float
    diagonal: float
    normalized: float

    def to_dict(self) -> dict:
        return {
            "directed_12": self.directed_12,
            "directed_21": self.directed_21,
            "symmetric": self.symmetric,
            "diagonal": self.diagonal,
            "normalized": self.normalized,
        }


@dataclass(frozen=True)
class ProcrustesResult:
    """Alignment of ``other`` onto ``ref``.

    ``disparity`` is the sum of squared residuals between the two
    standardized (centered, unit Frobenius norm) sets after the optimal
    orthogonal-plus-scaling alignment of ``other``; it equals
    1 - (sum of singular values)^2 and lives in [0, 1].  In original
    units the fitted map is
    ``aligned = scale * (other - other_mean) @ rotation + translation``.
    Note the scaled disparity is not symmetric in its arguments.
    """

    disparity: float
    rotation: np.ndarray
    scale: float
    translation: np.ndarray

    def to_dict(self) -> dict:
        return {
            "disparity": self.disparity,
            "rotation": self.rotation.tolist(),
            "scale": self.scale,
            "translation": self.translation.tolist(),
        }


def hausdorff(e1: Embedding2D, e2: Embedding2D) -> HausdorffResult:
    """Directed, symmetric and normalized Hausdorff distances.

    The normalizer is the main-diagonal length of the axis-aligned
    bounding box of the union of both sets, which caps the normalized
    value at 1; two equal sets score exactly 0.
    """
    a = e1.coords
    b = e2.coords
    if a.shape[0] == 0 or b.shape[0] == 0:
        raise InputError("hausdorff requires nonempty embeddings")
    pair = cdist(a, b)
    directed_12 = float(pair.min(axis=1).max())
    directed_21 = float(pair.min(axis=0).max())
    symmetric = max(directed_12, directed_21)
    union = np.vstack([a, b])
    span = union.max(axis=0) - union.min(axis=0)
    diagonal = math.sqrt(float(span[0]) ** 2 + float(span[1]) ** 2)
    normalized = 0.0 if symmetric == 0.0 else symmetric / diagonal
    return HausdorffResult(
        directed_12=directed_12,
        directed_21=directed_21,
        symmetric=symmetric,
        diagonal=diagonal,
        normalized=normalized,
    )


def _standardize(points: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    mean = points.mean(axis=0)
    centered = points - mean
    norm = float(np.linalg.norm(centered))
    return centered, mean, norm


def procrustes(ref: Embedding2D, other: Embedding2D) -> ProcrustesResult:
    """Disparity M of ``other`` against ``ref`` (same row = same sample)."""
    a = ref.coords
    b = other.coords
    if a.shape[0] != b.shape[0]:
        raise ShapeMismatchError(
            f"procrustes needs matched rows (got {a.shape[0]} vs {b.shape[0]})"
        )
    if a.shape[0] < 2:
        raise InputError("procrustes requires at least 2 points")
    if a.tobytes() == b.tobytes():
        # bitwise-equal sets have zero disparity by definition; skip the
        # SVD so self-comparison returns an exact 0
        return ProcrustesResult(
            disparity=0.0,
            rotation=np.eye(2),
            scale=1.0,
            translation=a.mean(axis=0),
        )

    a_c, a_mean, a_norm = _standardize(a)
    b_c, b_mean, b_norm = _standardize(b)
    degenerate_a = a_norm == 0.0
    degenerate_b = b_norm == 0.0
    if degenerate_a or degenerate_b:
        # all-identical point sets carry no shape: equal degeneracy is a
        # perfect match, anything else is maximal disparity
        return ProcrustesResult(
            disparity=0.0 if (degenerate_a and degenerate_b) else 1.0,
            rotation=np.eye(2),
            scale=1.0,
            translation=a_mean.copy(),
        )
    a_c = a_c / a_norm
    b_c = b_c / b_norm

    u, s, vt = np.linalg.svd(b_c.T @ a_c)
    rotation = u @ vt
    trace = float(s.sum())
    disparity = max(0.0, 1.0 - trace * trace)
    scale = trace * a_norm / b_norm
    return ProcrustesResult(
        disparity=disparity,
        rotation=rotation,
        scale=scale,
        translation=a_mean.copy(),
    )
