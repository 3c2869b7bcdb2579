"""Cross-manifold embedding overlap analysis.

Fit a 2-D embedding on one model's feature vectors, cross-project a
second model's feature vectors onto it, and quantify how much the two
projections overlap (Hausdorff, Procrustes, persistent homology); the
overlap correlates with how well attacks transfer between the models.
"""

from .analysis import (
    AnalysisRecord,
    CorrelationReport,
    SeparabilitySummary,
    correlation,
    correlation_report,
    linear_separability_check,
    load_table3,
    pca_eigen,
    read_records_csv,
    write_records_csv,
)
from .core_data import (
    FeatureMatrix,
    PaddingPolicy,
    read_csv,
    read_fvec,
    write_csv,
    write_fvec,
    zero_pad,
)
from .embedding import (
    EmbedParams,
    Embedding2D,
    EmbeddingModel,
    fit,
    fit_curve,
    smooth_knn_calibrate,
    transform,
)
from .errors import (
    DimensionError,
    InputError,
    InsufficientDataError,
    ShapeMismatchError,
    XManifoldError,
)
from .knn import KnnGraph, knn_fit, knn_query
from .metrics import HausdorffResult, ProcrustesResult, hausdorff, procrustes
from .topology import (
    PersistenceDiagram,
    RipsParams,
    bottleneck,
    export_diagrams_csv,
    rips_persistence,
)
from .xmem import load_model, save_model

__version__ = "0.1.0"

__all__ = [
    "AnalysisRecord",
    "CorrelationReport",
    "DimensionError",
    "EmbedParams",
    "Embedding2D",
    "EmbeddingModel",
    "FeatureMatrix",
    "HausdorffResult",
    "InputError",
    "InsufficientDataError",
    "KnnGraph",
    "PaddingPolicy",
    "PersistenceDiagram",
    "ProcrustesResult",
    "RipsParams",
    "SeparabilitySummary",
    "ShapeMismatchError",
    "XManifoldError",
    "bottleneck",
    "correlation",
    "correlation_report",
    "export_diagrams_csv",
    "fit",
    "fit_curve",
    "hausdorff",
    "knn_fit",
    "knn_query",
    "linear_separability_check",
    "load_model",
    "load_table3",
    "pca_eigen",
    "procrustes",
    "read_csv",
    "read_fvec",
    "read_records_csv",
    "rips_persistence",
    "save_model",
    "smooth_knn_calibrate",
    "transform",
    "write_csv",
    "write_fvec",
    "write_records_csv",
    "zero_pad",
]
