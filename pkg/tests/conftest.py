import numpy as np
import pytest

from xmanifold import FeatureMatrix


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def make_blobs(seed=7, n_per=100, dim=4, spread=0.1, sep=10.0):
    """Three well-separated Gaussian blobs plus integer labels."""
    gen = np.random.default_rng(seed)
    centers = np.zeros((3, dim))
    centers[1, 0] = sep
    centers[2, 1] = sep
    points = np.vstack(
        [gen.normal(0.0, spread, size=(n_per, dim)) + c for c in centers]
    )
    labels = np.repeat(np.arange(3), n_per)
    return (
        FeatureMatrix(points.astype(np.float32), labels=labels, source_tag="blobs"),
        labels,
    )


def make_two_cluster_surrogate(seed, dim=16, n_per=80, spread=0.5, sep=50.0):
    """Structured surrogate cloud: two tight Gaussian clusters."""
    gen = np.random.default_rng(seed)
    c2 = np.zeros(dim)
    c2[0] = sep
    points = np.vstack(
        [
            gen.normal(0.0, spread, size=(n_per, dim)),
            gen.normal(0.0, spread, size=(n_per, dim)) + c2,
        ]
    )
    return FeatureMatrix(points.astype(np.float32), source_tag="surrogate")


def make_disjoint_cloud(seed, dim=16, n=120, spread=0.5, offset=300.0):
    """Gaussian cloud whose support is far from the surrogate's."""
    gen = np.random.default_rng(seed)
    center = np.zeros(dim)
    center[1] = offset
    points = gen.normal(0.0, spread, size=(n, dim)) + center
    return FeatureMatrix(points.astype(np.float32), source_tag="target")
