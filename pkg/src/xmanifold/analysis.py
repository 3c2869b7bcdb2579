"""Correlating embedding overlap with attack success.

An :class:`AnalysisRecord` is one (target, surrogate, dataset) cell: the
average accuracy AA of the transferred attack at the evaluation
threshold and, when it could be computed, the normalized Hausdorff
distance H between the cross-projected embeddings.  The module computes
the population Pearson correlation of (H, AA), the PCA eigenvalues of
the joint distribution (both covariance and raw scatter normalisations,
since they answer different questions), and a threshold split into
attack-robust and attack-vulnerable models.

The bundled study table ships as a checksummed CSV asset; analyses over
it are bit-reproducible.
"""

from __future__ import annotations

import csv
import hashlib
import io
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import FormatError, InputError, InsufficientDataError

TABLE3_SHA256 = "5a2344b979181b892401811a0f6c76662df555bb68b489d5cb15c0a82e831940"
TABLE3_ROWS = 60

FLAG_SUPPRESSED_AA = "suppressed_AA"
FLAG_MISSING_H = "missing_H"
_KNOWN_FLAGS = {FLAG_SUPPRESSED_AA, FLAG_MISSING_H}

RECORD_FIELDS = ["target", "surrogate", "dataset", "AA", "H", "flags"]

# §4.1 reference overlaps for the ResNetv2 -> MobileNetv3 pairs; kept as
# context for reports, never used as a numeric gate.
REFERENCE_H = {
    ("MobileNet", "ResNet", "SISCORE"): 0.09,
    ("MobileNet", "ResNet", "Fashion-MNIST"): 0.12,
    ("MobileNet", "ResNet", "RESISC"): 0.22,
}
REFERENCE_PCA_EIGENVALUES = (7.13, 0.00)


@dataclass(frozen=True)
class AnalysisRecord:
    target: str
    surrogate: str
    dataset: str
    AA: float
    H: float | None = None
    flags: frozenset[str] = frozenset()

    def __post_init__(self):
        if not 0.0 <= self.AA <= 1.0:
            raise InputError(f"AA must be in [0, 1], got {self.AA}")
        if self.H is not None and not 0.0 <= self.H <= 1.0:
            raise InputError(f"H must be in [0, 1], got {self.H}")
        unknown = set(self.flags) - _KNOWN_FLAGS
        if unknown:
            raise InputError(f"unknown flags {sorted(unknown)}")
        if (self.H is None) != (FLAG_MISSING_H in self.flags):
            raise InputError("missing_H flag must match an absent H value")


@dataclass(frozen=True)
class CorrelationReport:
    rho: float
    n_used: int
    n_excluded: int
    eigenvalues_covariance: tuple[float, float]
    eigenvalues_scatter: tuple[float, float]
    mean_H: float
    mean_AA: float
    std_H: float
    std_AA: float

    def to_dict(self) -> dict:
        return {
            "rho": self.rho,
            "n_used": self.n_used,
            "n_excluded": self.n_excluded,
            "eigenvalues": {
                "covariance": list(self.eigenvalues_covariance),
                "scatter": list(self.eigenvalues_scatter),
            },
            "mean_H": self.mean_H,
            "mean_AA": self.mean_AA,
            "std_H": self.std_H,
            "std_AA": self.std_AA,
        }


@dataclass(frozen=True)
class SeparabilitySummary:
    threshold: float
    robust_count: int
    vulnerable_count: int
    robust_mean_H: float | None
    vulnerable_mean_H: float | None

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "robust_count": self.robust_count,
            "vulnerable_count": self.vulnerable_count,
            "robust_mean_H": self.robust_mean_H,
            "vulnerable_mean_H": self.vulnerable_mean_H,
        }


def usable(records: list[AnalysisRecord]) -> list[AnalysisRecord]:
    """Records that carry an H value."""
    return [r for r in records if r.H is not None]


def _joint(records: list[AnalysisRecord]) -> np.ndarray:
    rows = usable(records)
    return np.array([[r.H, r.AA] for r in rows], dtype=np.float64)


def correlation(records: list[AnalysisRecord]) -> float:
    """Population-moment Pearson correlation of (H, AA).

    Records without H are excluded; at least two usable records with
    nonzero variance on both axes are required.
    """
    joint = _joint(records)
    if joint.shape[0] < 2:
        raise InsufficientDataError(
            f"correlation needs >= 2 records with H (got {joint.shape[0]})"
        )
    h = joint[:, 0]
    aa = joint[:, 1]
    std_h = h.std()
    std_aa = aa.std()
    if std_h == 0.0 or std_aa == 0.0:
        raise InsufficientDataError("zero variance in H or AA")
    return float(np.mean((h - h.mean()) * (aa - aa.mean())) / (std_h * std_aa))


def pca_eigen(records: list[AnalysisRecord], mode: str = "covariance") -> tuple[float, float]:
    """Descending eigenvalues of the centered (H, AA) second-moment matrix.

    ``covariance`` divides the scatter by N (population convention);
    ``scatter`` leaves it unnormalized.
    """
    if mode not in ("covariance", "scatter"):
        raise InputError(f"mode must be 'covariance' or 'scatter', got {mode!r}")
    joint = _joint(records)
    if joint.shape[0] < 2:
        raise InsufficientDataError(
            f"pca_eigen needs >= 2 records with H (got {joint.shape[0]})"
        )
    centered = joint - joint.mean(axis=0)
    matrix = centered.T @ centered
    if mode == "covariance":
        matrix = matrix / joint.shape[0]
    values = np.linalg.eigvalsh(matrix)
    values = np.maximum(values, 0.0)
    return float(values[1]), float(values[0])


def correlation_report(records: list[AnalysisRecord]) -> CorrelationReport:
    joint = _joint(records)
    rho = correlation(records)
    return CorrelationReport(
        rho=rho,
        n_used=joint.shape[0],
        n_excluded=len(records) - joint.shape[0],
        eigenvalues_covariance=pca_eigen(records, "covariance"),
        eigenvalues_scatter=pca_eigen(records, "scatter"),
        mean_H=float(joint[:, 0].mean()),
        mean_AA=float(joint[:, 1].mean()),
        std_H=float(joint[:, 0].std()),
        std_AA=float(joint[:, 1].std()),
    )


def linear_separability_check(
    records: list[AnalysisRecord], threshold: float = 0.4
) -> SeparabilitySummary:
    """Split records at the AA threshold (ties count as robust)."""
    if not records:
        raise InputError("no records to partition")
    robust = [r for r in records if r.AA >= threshold]
    vulnerable = [r for r in records if r.AA < threshold]

    def mean_h(group):
        hs = [r.H for r in group if r.H is not None]
        return float(np.mean(hs)) if hs else None

    return SeparabilitySummary(
        threshold=threshold,
        robust_count=len(robust),
        vulnerable_count=len(vulnerable),
        robust_mean_H=mean_h(robust),
        vulnerable_mean_H=mean_h(vulnerable),
    )


def _parse_records(text: str, origin: str) -> list[AnalysisRecord]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != RECORD_FIELDS:
        raise FormatError(
            f"{origin}: expected header {','.join(RECORD_FIELDS)}, "
            f"got {reader.fieldnames}"
        )
    records = []
    for lineno, row in enumerate(reader, start=2):
        if any(v is None for v in row.values()):
            raise FormatError(f"{origin}:{lineno}: short row")
        flags = frozenset(f for f in row["flags"].split(";") if f)
        h_text = row["H"].strip()
        try:
            record = AnalysisRecord(
                target=row["target"],
                surrogate=row["surrogate"],
                dataset=row["dataset"],
                AA=float(row["AA"]),
                H=float(h_text) if h_text else None,
                flags=flags,
            )
        except (ValueError, InputError) as exc:
            raise FormatError(f"{origin}:{lineno}: {exc}") from exc
        records.append(record)
    return records


def read_records_csv(path: str | Path) -> list[AnalysisRecord]:
    path = Path(path)
    if not path.exists():
        raise InputError(f"input path does not exist: {path}")
    return _parse_records(path.read_text(encoding="utf-8"), str(path))


def write_records_csv(records: list[AnalysisRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RECORD_FIELDS)
        for r in records:
            writer.writerow(
                [
                    r.target,
                    r.surrogate,
                    r.dataset,
                    repr(float(r.AA)),
                    "" if r.H is None else repr(float(r.H)),
                    ";".join(sorted(r.flags)),
                ]
            )


def load_table3() -> list[AnalysisRecord]:
    """Load the bundled study table (60 records).

    The asset's SHA-256 is pinned; a mismatch means the install is
    corrupted and analyses over it would not be reproducible.
    """
    text = (
        resources.files("xmanifold").joinpath("data/table3.csv").read_text("utf-8")
    )
    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
    if digest != TABLE3_SHA256:
        raise InputError(
            f"bundled table3.csv checksum mismatch (got {digest}, "
            f"expected {TABLE3_SHA256})"
        )
    records = _parse_records(text, "table3.csv")
    if len(records) != TABLE3_ROWS:
        raise FormatError(f"table3.csv must have {TABLE3_ROWS} rows, got {len(records)}")
    return records
