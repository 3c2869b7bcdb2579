"""XMEM v1: the single-file container for a fitted embedding model.

Bundles everything :func:`xmanifold.embedding.transform` needs --
hyperparameters, the padded training matrix, the kNN graph, per-point
calibration, the fuzzy graph as COO triplets and the 2-D coordinates.
Layout is documented field by field in ``docs/FORMATS.md``.  A model
written and read back transforms new data bit-identically.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .core_data import FeatureMatrix
from .embedding import EmbedParams, Embedding2D, EmbeddingModel
from .errors import (
    BadMagicError,
    InputError,
    TruncatedFileError,
    UnsupportedDtypeError,
)
from .knn import KnnGraph, METRICS

XMEM_MAGIC = b"XMEM"
XMEM_VERSION = 1

_INITS = ("spectral", "seeded_random")


class _Writer:
    def __init__(self, fh):
        self.fh = fh

    def pack(self, fmt: str, *values) -> None:
        self.fh.write(struct.pack("<" + fmt, *values))

    def array(self, arr: np.ndarray, dtype: str) -> None:
        self.fh.write(np.ascontiguousarray(arr, dtype=dtype).tobytes())

    def text(self, s: str) -> None:
        raw = s.encode("utf-8")
        self.pack("I", len(raw))
        self.fh.write(raw)


class _Reader:
    def __init__(self, raw: bytes, origin: str):
        self.raw = raw
        self.origin = origin
        self.offset = 0

    def pack(self, fmt: str):
        fmt = "<" + fmt
        size = struct.calcsize(fmt)
        if self.offset + size > len(self.raw):
            raise TruncatedFileError(f"{self.origin}: truncated model file")
        values = struct.unpack_from(fmt, self.raw, self.offset)
        self.offset += size
        return values if len(values) > 1 else values[0]

    def array(self, count: int, dtype: str) -> np.ndarray:
        size = count * np.dtype(dtype).itemsize
        if self.offset + size > len(self.raw):
            raise TruncatedFileError(f"{self.origin}: truncated model file")
        arr = np.frombuffer(self.raw, dtype=dtype, count=count, offset=self.offset)
        self.offset += size
        return arr.copy()

    def text(self) -> str:
        length = self.pack("I")
        if self.offset + length > len(self.raw):
            raise TruncatedFileError(f"{self.origin}: truncated model file")
        raw = self.raw[self.offset : self.offset + length]
        self.offset += length
        return raw.decode("utf-8")


def save_model(model: EmbeddingModel, path: str | Path) -> None:
    """Write ``model`` to ``path`` as an XMEM v1 container."""
    p = model.params
    train = model.training_data
    coo = model.fuzzy_graph.tocoo()
    order = np.lexsort((coo.col, coo.row))
    with open(path, "wb") as fh:
        w = _Writer(fh)
        w.pack("4sBBBB", XMEM_MAGIC, XMEM_VERSION, _INITS.index(p.init),
               METRICS.index(p.metric), 0)
        w.pack("IIi", p.n_neighbors, p.n_epochs, p.negative_sample_rate)
        w.pack("ddQ", p.min_dist, p.learning_rate, p.seed)
        w.pack("dd", model.curve_a, model.curve_b)
        w.pack("QQ", train.rows, train.cols)
        w.array(train.values, "<f4")
        if train.labels is None:
            w.pack("Q", 0)
        else:
            w.pack("Q", train.rows)
            w.array(train.labels, "<u4")
        w.pack("Q", model.knn.k)
        w.array(model.knn.indices, "<i8")
        w.array(model.knn.distances, "<f8")
        w.array(model.rho, "<f8")
        w.array(model.sigma, "<f8")
        w.pack("Q", coo.nnz)
        w.array(coo.row[order], "<u4")
        w.array(coo.col[order], "<u4")
        w.array(coo.data[order], "<f8")
        w.array(model.coords.coords, "<f8")
        w.text(train.source_tag)
        w.text(model.coords.source_tag)


def load_model(path: str | Path) -> EmbeddingModel:
    """Read an XMEM v1 container back into a fitted model."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"input path does not exist: {path}")
    r = _Reader(path.read_bytes(), str(path))
    magic, version, init_code, metric_code, _reserved = r.pack("4sBBBB")
    if magic != XMEM_MAGIC:
        raise BadMagicError(f"{path}: bad magic {magic!r}, expected {XMEM_MAGIC!r}")
    if version != XMEM_VERSION:
        raise UnsupportedDtypeError(f"{path}: unsupported XMEM version {version}")
    n_neighbors, n_epochs, negative_sample_rate = r.pack("IIi")
    min_dist, learning_rate, seed = r.pack("ddQ")
    curve_a, curve_b = r.pack("dd")
    rows, cols = r.pack("QQ")
    values = r.array(rows * cols, "<f4").reshape(rows, cols)
    label_count = r.pack("Q")
    labels = r.array(label_count, "<u4") if label_count else None
    k = r.pack("Q")
    knn_indices = r.array(rows * k, "<i8").reshape(rows, k)
    knn_distances = r.array(rows * k, "<f8").reshape(rows, k)
    rho = r.array(rows, "<f8")
    sigma = r.array(rows, "<f8")
    nnz = r.pack("Q")
    coo_rows = r.array(nnz, "<u4")
    coo_cols = r.array(nnz, "<u4")
    coo_vals = r.array(nnz, "<f8")
    coords = r.array(rows * 2, "<f8").reshape(rows, 2)
    train_tag = r.text()
    coords_tag = r.text()

    params = EmbedParams(
        n_neighbors=int(n_neighbors),
        min_dist=float(min_dist),
        n_epochs=int(n_epochs),
        metric=METRICS[metric_code],
        seed=int(seed),
        init=_INITS[init_code],
        negative_sample_rate=int(negative_sample_rate),
        learning_rate=float(learning_rate),
    )
    graph = sp.coo_matrix(
        (coo_vals, (coo_rows.astype(np.int64), coo_cols.astype(np.int64))),
        shape=(rows, rows),
    ).tocsr()
    graph.sort_indices()
    return EmbeddingModel(
        training_data=FeatureMatrix(values=values, labels=labels, source_tag=train_tag),
        knn=KnnGraph(
            k=int(k),
            indices=knn_indices,
            distances=knn_distances,
            metric=METRICS[metric_code],
        ),
        rho=rho,
        sigma=sigma,
        fuzzy_graph=graph,
        curve_a=float(curve_a),
        curve_b=float(curve_b),
        coords=Embedding2D(coords, source_tag=coords_tag),
        params=params,
    )
