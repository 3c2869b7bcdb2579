"""Feature-vector matrices, the FVEC/CSV file formats and zero-padding.

A :class:`FeatureMatrix` holds one extracted feature set (one model, one
dataset): an N x D array of 32-bit floats plus optional integer class
labels.  Matrices travel between tools in the FVEC v1 binary container
(see ``docs/FORMATS.md``) or as plain CSV.  Feature sets of different
dimensionality are aligned by appending zeros at the tail, which keeps
all pairwise distances of the wider set intact and never shrinks a
cross-set distance.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    BadMagicError,
    FormatError,
    DimensionError,
    InputError,
    NonFiniteValueError,
    TruncatedFileError,
    UnsupportedDtypeError,
)

FVEC_MAGIC = b"XMFV"
FVEC_VERSION = 1
_FVEC_DTYPE_F32 = 1
# magic(4) | version u8 | dtype u8 | reserved u16 | rows u64 | cols u64
_HEADER = struct.Struct("<4sBBHQQ")


@dataclass
class FeatureMatrix:
    """N x D feature vectors with optional per-row integer labels.

    ``values`` is float32, C-contiguous and free of NaN/Inf.  ``labels``,
    when present, has exactly one entry per row.  Instances are treated
    as immutable after construction.
    """

    values: np.ndarray
    labels: np.ndarray | None = None
    source_tag: str = ""

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.float32)
        if values.ndim != 2:
            raise InputError(f"expected a 2-D matrix, got ndim={values.ndim}")
        if values.shape[0] < 1 or values.shape[1] < 1:
            raise InputError("empty matrix")
        if not np.all(np.isfinite(values)):
            raise NonFiniteValueError("matrix contains NaN or Inf values")
        self.values = values
        if self.labels is not None:
            labels = np.ascontiguousarray(self.labels, dtype=np.uint32)
            if labels.shape != (values.shape[0],):
                raise InputError(
                    f"labels shape {labels.shape} does not match {values.shape[0]} rows"
                )
            self.labels = labels

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]

    def equals(self, other: "FeatureMatrix") -> bool:
        """Bitwise equality of values and labels (source_tag ignored)."""
        if self.values.shape != other.values.shape:
            return False
        if self.values.tobytes() != other.values.tobytes():
            return False
        if (self.labels is None) != (other.labels is None):
            return False
        if self.labels is not None and self.labels.tobytes() != other.labels.tobytes():
            return False
        return True


@dataclass(frozen=True)
class PaddingPolicy:
    """Tail zero-padding up to ``target_dim`` (default 2048)."""

    target_dim: int = 2048
    mode: str = "zero_pad_tail"


def write_fvec(m: FeatureMatrix, path: str | Path) -> None:
    """Write ``m`` to ``path`` in the FVEC v1 binary format.

    Layout (little-endian): magic ``XMFV`` | version u8=1 | dtype u8=1
    (f32) | reserved u16=0 | rows u64 | cols u64 | rows*cols f32
    row-major | label_count u64 (0 or rows) | label_count u32 entries.
    Invariants are validated before any byte is emitted.
    """
    if not np.all(np.isfinite(m.values)):
        raise NonFiniteValueError("matrix contains NaN or Inf values")
    path = Path(path)
    header = _HEADER.pack(
        FVEC_MAGIC, FVEC_VERSION, _FVEC_DTYPE_F32, 0, m.rows, m.cols
    )
    labels = m.labels
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(m.values.astype("<f4", copy=False).tobytes())
        if labels is None:
            fh.write(struct.pack("<Q", 0))
        else:
            fh.write(struct.pack("<Q", labels.shape[0]))
            fh.write(labels.astype("<u4", copy=False).tobytes())


def read_fvec(path: str | Path, source_tag: str | None = None) -> FeatureMatrix:
    """Read an FVEC v1 file; the exact inverse of :func:`write_fvec`."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"input path does not exist: {path}")
    raw = path.read_bytes()
    if len(raw) < _HEADER.size:
        raise TruncatedFileError(f"{path}: file shorter than the FVEC header")
    magic, version, dtype, _reserved, rows, cols = _HEADER.unpack_from(raw, 0)
    if magic != FVEC_MAGIC:
        raise BadMagicError(f"{path}: bad magic {magic!r}, expected {FVEC_MAGIC!r}")
    if version != FVEC_VERSION:
        raise UnsupportedDtypeError(f"{path}: unsupported FVEC version {version}")
    if dtype != _FVEC_DTYPE_F32:
        raise UnsupportedDtypeError(f"{path}: dtype code {dtype}, only f32 (1) supported")
    if rows == 0 or cols == 0:
        raise InputError(f"{path}: empty matrix (rows={rows}, cols={cols})")
    offset = _HEADER.size
    payload_bytes = rows * cols * 4
    if len(raw) < offset + payload_bytes + 8:
        raise TruncatedFileError(f"{path}: payload truncated")
    values = np.frombuffer(raw, dtype="<f4", count=rows * cols, offset=offset)
    values = values.reshape(rows, cols).copy()
    if not np.all(np.isfinite(values)):
        raise NonFiniteValueError(f"{path}: payload contains NaN or Inf")
    offset += payload_bytes
    (label_count,) = struct.unpack_from("<Q", raw, offset)
    offset += 8
    labels = None
    if label_count:
        if label_count != rows:
            raise FormatError(
                f"{path}: label_count {label_count} must be 0 or rows ({rows})"
            )
        if len(raw) < offset + label_count * 4:
            raise TruncatedFileError(f"{path}: label block truncated")
        labels = np.frombuffer(raw, dtype="<u4", count=label_count, offset=offset).copy()
    tag = source_tag if source_tag is not None else path.stem
    return FeatureMatrix(values=values, labels=labels, source_tag=tag)


def write_csv(m: FeatureMatrix, path: str | Path) -> None:
    """Write ``m`` as CSV with header ``f0..f{D-1}[,label]``.

    Values are printed with 9 significant digits, enough for a float32
    round trip within 1e-6 per element.
    """
    path = Path(path)
    cols = [f"f{i}" for i in range(m.cols)]
    if m.labels is not None:
        cols.append("label")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(cols) + "\n")
        for i in range(m.rows):
            cells = [format(float(v), ".9g") for v in m.values[i]]
            if m.labels is not None:
                cells.append(str(int(m.labels[i])))
            fh.write(",".join(cells) + "\n")


def read_csv(path: str | Path, source_tag: str | None = None) -> FeatureMatrix:
    """Read a feature CSV written by :func:`write_csv`."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"input path does not exist: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if not header:
            raise FormatError(f"{path}: missing header line")
        names = header.split(",")
        has_labels = names[-1] == "label"
        feat_names = names[:-1] if has_labels else names
        expected = [f"f{i}" for i in range(len(feat_names))]
        if feat_names != expected:
            raise FormatError(f"{path}: header must be f0..f{{D-1}}[,label]")
        width = len(names)
        rows: list[list[float]] = []
        labels: list[int] = []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            cells = line.split(",")
            if len(cells) != width:
                raise FormatError(
                    f"{path}:{lineno}: expected {width} fields, got {len(cells)}"
                )
            try:
                if has_labels:
                    rows.append([float(c) for c in cells[:-1]])
                    labels.append(int(cells[-1]))
                else:
                    rows.append([float(c) for c in cells])
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: non-numeric cell ({exc})") from exc
    if not rows:
        raise InputError(f"{path}: empty matrix")
    values = np.asarray(rows, dtype=np.float32)
    tag = source_tag if source_tag is not None else path.stem
    return FeatureMatrix(
        values=values,
        labels=np.asarray(labels, dtype=np.uint32) if has_labels else None,
        source_tag=tag,
    )


def zero_pad(m: FeatureMatrix, policy: PaddingPolicy = PaddingPolicy()) -> FeatureMatrix:
    """Append zero columns to bring ``m`` up to ``policy.target_dim``.

    The first ``m.cols`` entries of every row are unchanged and labels
    are preserved.  Truncation is rejected: a matrix wider than the
    target is an error, never silently cropped.
    """
    if m.cols > policy.target_dim:
        raise DimensionError(
            f"matrix has {m.cols} columns, wider than target_dim "
            f"{policy.target_dim}; truncation is not supported"
        )
    if m.cols == policy.target_dim:
        return m
    padded = np.zeros((m.rows, policy.target_dim), dtype=np.float32)
    padded[:, : m.cols] = m.values
    return FeatureMatrix(values=padded, labels=m.labels, source_tag=m.source_tag)
