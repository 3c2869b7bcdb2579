import numpy as np
import pytest
import scipy.spatial

from xmanifold import Embedding2D, hausdorff, procrustes
from xmanifold.errors import InputError, ShapeMismatchError


def oracle_directed(a, b):
    """Exhaustive max-min loop, kept deliberately simple."""
    worst = 0.0
    for p in a:
        best = np.inf
        for q in b:
            d = np.sqrt(np.sum((p - q) ** 2))
            if d < best:
                best = d
        if best > worst:
            worst = best
    return worst


def emb(points):
    return Embedding2D(np.asarray(points, dtype=np.float64))


def rotation(deg):
    t = np.deg2rad(deg)
    return np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])


# --- hausdorff -------------------------------------------------------------


def test_hausdorff_identity(rng):
    a = emb(rng.normal(size=(30, 2)))
    res = hausdorff(a, a)
    assert res.symmetric == 0.0
    assert res.normalized == 0.0


def test_hausdorff_unit_vectors():
    a = emb([[0.0, 0.0], [1.0, 0.0]])
    b = emb([[0.0, 0.0], [0.0, 1.0]])
    res = hausdorff(a, b)
    assert res.directed_12 == 1.0
    assert res.directed_21 == 1.0
    assert res.symmetric == 1.0
    assert res.diagonal == pytest.approx(np.sqrt(2.0))
    assert res.normalized == pytest.approx(0.70711, abs=1e-5)


def test_hausdorff_matches_oracle(rng):
    for _ in range(40):
        a = rng.normal(size=(rng.integers(2, 40), 2)) * rng.uniform(0.5, 5)
        b = rng.normal(size=(rng.integers(2, 40), 2)) * rng.uniform(0.5, 5)
        res = hausdorff(emb(a), emb(b))
        assert res.directed_12 == oracle_directed(a, b)
        assert res.directed_21 == oracle_directed(b, a)
        assert res.symmetric == max(res.directed_12, res.directed_21)


def test_hausdorff_symmetric_exchange(rng):
    a = emb(rng.normal(size=(25, 2)))
    b = emb(rng.normal(size=(18, 2)))
    ab = hausdorff(a, b)
    ba = hausdorff(b, a)
    assert ab.symmetric == ba.symmetric
    assert ab.normalized == ba.normalized
    assert ab.directed_12 == ba.directed_21


def test_hausdorff_metric_properties(rng):
    for _ in range(40):
        sets = [emb(rng.normal(size=(rng.integers(2, 20), 2))) for _ in range(3)]
        a, b, c = sets
        d_ab = hausdorff(a, b).symmetric
        d_bc = hausdorff(b, c).symmetric
        d_ac = hausdorff(a, c).symmetric
        assert d_ac <= d_ab + d_bc + 1e-9
        assert d_ab >= 0.0


def test_hausdorff_normalized_range(rng):
    for _ in range(30):
        a = emb(rng.normal(size=(rng.integers(2, 25), 2)) * 3)
        b = emb(rng.normal(size=(rng.integers(2, 25), 2)) * 3 + rng.normal(size=2) * 5)
        res = hausdorff(a, b)
        assert 0.0 <= res.normalized <= 1.0


def test_hausdorff_zero_iff_equal_sets(rng):
    pts = rng.normal(size=(10, 2))
    shuffled = pts[rng.permutation(10)]
    assert hausdorff(emb(pts), emb(shuffled)).normalized == 0.0
    nudged = pts.copy()
    nudged[0] += 0.5
    assert hausdorff(emb(pts), emb(nudged)).normalized > 0.0


def test_hausdorff_empty_rejected():
    with pytest.raises(InputError):
        hausdorff(emb(np.zeros((0, 2))), emb([[0.0, 0.0]]))


# --- procrustes ------------------------------------------------------------


def test_procrustes_self_is_exact_zero(rng):
    a = emb(rng.normal(size=(40, 2)))
    assert procrustes(a, a).disparity == 0.0


def test_procrustes_similarity_transform_invisible(rng):
    a = rng.normal(size=(25, 2))
    b = 2.0 * a @ rotation(37.0).T + np.array([5.0, -3.0])
    assert procrustes(emb(a), emb(b)).disparity < 1e-10


def test_procrustes_reflected_square_corner():
    square = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    reflected = square.copy()
    reflected[0] = [1.0, 1.0]  # corner reflected across the square's center
    got = procrustes(emb(square), emb(reflected)).disparity

    # closed-form oracle: best orthogonal Q and scale s minimize
    # |A - s*B@Q|^2 = 1 - (sum of singular values of B^T A)^2
    a = square - square.mean(axis=0)
    b = reflected - reflected.mean(axis=0)
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    s = np.linalg.svd(b.T @ a, compute_uv=False).sum()
    assert got == pytest.approx(1.0 - s * s, abs=1e-12)


def test_procrustes_matches_scipy(rng):
    for _ in range(20):
        a = rng.normal(size=(12, 2))
        b = rng.normal(size=(12, 2))
        _, _, expected = scipy.spatial.procrustes(a, b)
        assert procrustes(emb(a), emb(b)).disparity == pytest.approx(expected, rel=1e-12)


def test_procrustes_invariant_under_common_transform(rng):
    a = rng.normal(size=(20, 2))
    b = rng.normal(size=(20, 2))
    base = procrustes(emb(a), emb(b)).disparity
    q = rotation(-63.0)
    a2 = 0.7 * a @ q.T + np.array([-2.0, 11.0])
    b2 = 0.7 * b @ q.T + np.array([-2.0, 11.0])
    assert procrustes(emb(a2), emb(b2)).disparity == pytest.approx(base, abs=1e-10)


def test_procrustes_rotation_is_orthogonal(rng):
    a = rng.normal(size=(15, 2))
    b = rng.normal(size=(15, 2))
    res = procrustes(emb(a), emb(b))
    assert np.max(np.abs(res.rotation.T @ res.rotation - np.eye(2))) < 1e-10
    assert res.scale > 0


def test_procrustes_alignment_reconstructs(rng):
    a = rng.normal(size=(15, 2))
    b = 1.6 * a @ rotation(20.0).T + np.array([3.0, 4.0])
    res = procrustes(emb(a), emb(b))
    aligned = res.scale * (b - b.mean(axis=0)) @ res.rotation + res.translation
    assert np.max(np.abs(aligned - a)) < 1e-9


def test_procrustes_asymmetry_tolerated(rng):
    a = emb(rng.normal(size=(10, 2)))
    b = emb(rng.normal(size=(10, 2)) * 3.0)
    m_ab = procrustes(a, b).disparity
    m_ba = procrustes(b, a).disparity
    assert 0.0 <= m_ab <= 1.0 and 0.0 <= m_ba <= 1.0


def test_procrustes_degenerate_rules():
    flat = emb(np.ones((5, 2)))
    other = emb(np.random.default_rng(1).normal(size=(5, 2)))
    assert procrustes(flat, emb(np.ones((5, 2)) * 7)).disparity == 0.0
    assert procrustes(flat, other).disparity == 1.0
    assert procrustes(other, flat).disparity == 1.0


def test_procrustes_shape_mismatch():
    a = emb(np.zeros((3, 2)))
    b = emb(np.zeros((4, 2)))
    with pytest.raises(ShapeMismatchError):
        procrustes(a, b)
