"""Command-line pipeline: fit, project, metrics, analyze, repro-fig4.

The subcommands chain through files: ``fit`` turns a surrogate FVEC into
an XMEM model plus its 2-D coordinates, ``project`` drops a target FVEC
onto that model, ``metrics`` compares two coordinate files, ``analyze``
correlates a records CSV (or the bundled study table) and emits the
scatter points for plotting.  Reports print to stdout as JSON (or
flattened CSV) and are also written into the output directory.

Defaults may come from a flat ``key = value`` config file with one
section per subcommand; explicit flags win over the config.  Exit codes
are stable per error class: 2 bad input, 3 dimensionality, 4 paired
shape mismatch, 5 not enough usable records.
"""

from __future__ import annotations

import argparse
import configparser
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import analysis as ana
from . import core_data, embedding, metrics, topology, xmem
from .errors import InputError, XManifoldError

SPEC_VERSION = "1"
PROG = "xmanifold"

_DEFAULTS = {
    "pad_dim": 0,
    "n_neighbors": 15,
    "min_dist": 0.1,
    "n_epochs": 200,
    "metric": "euclidean",
    "init": "spectral",
    "negative_sample_rate": 5,
    "learning_rate": 1.0,
    "seed": 42,
    "metrics": "hausdorff",
    "max_points": topology.DEFAULT_MAX_POINTS,
    "max_radius": 0.0,
    "threshold": 0.4,
}


def _thread_cap() -> int | None:
    raw = os.environ.get("XMANIFOLD_THREADS")
    if not raw:
        return None
    try:
        cap = int(raw)
    except ValueError as exc:
        raise InputError(f"XMANIFOLD_THREADS must be an integer, got {raw!r}") from exc
    if cap < 1:
        raise InputError("XMANIFOLD_THREADS must be >= 1")
    try:
        import numba

        numba.set_num_threads(min(cap, numba.config.NUMBA_NUM_THREADS))
    except ImportError:
        pass
    return cap


def _load_config(path: str | None, section: str) -> dict:
    if not path:
        return {}
    p = Path(path)
    if not p.exists():
        raise InputError(f"config file does not exist: {p}")
    parser = configparser.ConfigParser()
    try:
        parser.read_string(p.read_text(encoding="utf-8"))
    except configparser.Error as exc:
        raise InputError(f"{p}: malformed config ({exc})") from exc
    if not parser.has_section(section):
        return {}
    return dict(parser.items(section))


def _setting(args, config: dict, name: str, cast):
    value = getattr(args, name, None)
    if value is not None:
        return value
    if name in config:
        return cast(config[name])
    return _DEFAULTS[name]


def _flatten(prefix: str, obj, out: list[tuple[str, str]]) -> None:
    if isinstance(obj, dict):
        for key in sorted(obj):
            _flatten(f"{prefix}{key}." if prefix else f"{key}.", obj[key], out)
        return
    if isinstance(obj, (list, tuple)):
        for idx, item in enumerate(obj):
            _flatten(f"{prefix}{idx}.", item, out)
        return
    out.append((prefix[:-1], "" if obj is None else str(obj)))


def _emit_report(report: dict, fmt: str, out_path: Path) -> None:
    report = {"spec_version": SPEC_VERSION, **report}
    text = json.dumps(report, indent=2, sort_keys=True)
    out_path.write_text(text + "\n", encoding="utf-8")
    if fmt == "json":
        print(text)
    else:
        rows: list[tuple[str, str]] = []
        _flatten("", report, rows)
        print("key,value")
        for key, value in rows:
            print(f"{key},{value}")


def _load_matrix(path: str | Path) -> core_data.FeatureMatrix:
    path = Path(path)
    if path.suffix == ".csv":
        return core_data.read_csv(path)
    return core_data.read_fvec(path)


def _embedding_from_file(path: str | Path) -> embedding.Embedding2D:
    m = _load_matrix(path)
    if m.cols != 2:
        raise InputError(f"{path}: expected 2-column coordinates, got {m.cols}")
    return embedding.Embedding2D(m.values.astype(np.float64), source_tag=m.source_tag)


def _coords_to_matrix(emb: embedding.Embedding2D) -> core_data.FeatureMatrix:
    return core_data.FeatureMatrix(
        values=emb.coords.astype(np.float32), source_tag=emb.source_tag
    )


def _embed_params(args, config) -> embedding.EmbedParams:
    return embedding.EmbedParams(
        n_neighbors=_setting(args, config, "n_neighbors", int),
        min_dist=_setting(args, config, "min_dist", float),
        n_epochs=_setting(args, config, "n_epochs", int),
        metric=_setting(args, config, "metric", str),
        seed=_setting(args, config, "seed", int),
        init=_setting(args, config, "init", str),
        negative_sample_rate=_setting(args, config, "negative_sample_rate", int),
        learning_rate=_setting(args, config, "learning_rate", float),
    )


def cmd_fit(args) -> int:
    config = _load_config(args.config, "fit")
    out_dir = Path(args.output_dir or config.get("output_dir", "."))
    out_dir.mkdir(parents=True, exist_ok=True)
    data = core_data.read_fvec(args.input)
    pad_dim = _setting(args, config, "pad_dim", int)
    if pad_dim:
        data = core_data.zero_pad(data, core_data.PaddingPolicy(target_dim=pad_dim))
    params = _embed_params(args, config)
    model = embedding.fit(data, params)
    model_path = out_dir / "model.xmem"
    coords_path = out_dir / "surrogate_coords.fvec"
    xmem.save_model(model, model_path)
    core_data.write_fvec(_coords_to_matrix(model.coords), coords_path)
    _emit_report(
        {
            "command": "fit",
            "input": str(args.input),
            "rows": data.rows,
            "cols": data.cols,
            "params": {
                "n_neighbors": params.n_neighbors,
                "min_dist": params.min_dist,
                "n_epochs": params.n_epochs,
                "metric": params.metric,
                "init": params.init,
                "negative_sample_rate": params.negative_sample_rate,
                "learning_rate": params.learning_rate,
            },
            "seed": params.seed,
            "curve": {"a": model.curve_a, "b": model.curve_b},
            "model_file": str(model_path),
            "coords_file": str(coords_path),
        },
        args.format,
        out_dir / "fit_report.json",
    )
    return 0


def cmd_project(args) -> int:
    config = _load_config(args.config, "project")
    out_dir = Path(args.output_dir or config.get("output_dir", "."))
    out_dir.mkdir(parents=True, exist_ok=True)
    model = xmem.load_model(args.model)
    target = core_data.read_fvec(args.input)
    if target.cols < model.training_data.cols:
        target = core_data.zero_pad(
            target, core_data.PaddingPolicy(target_dim=model.training_data.cols)
        )
    projected = embedding.transform(model, target)
    coords_path = out_dir / "projected_coords.fvec"
    core_data.write_fvec(_coords_to_matrix(projected), coords_path)
    flagged = int(projected.flagged.sum()) if projected.flagged is not None else 0
    _emit_report(
        {
            "command": "project",
            "model_file": str(args.model),
            "input": str(args.input),
            "rows": target.rows,
            "flagged_points": flagged,
            "coords_file": str(coords_path),
        },
        args.format,
        out_dir / "project_report.json",
    )
    return 0


def cmd_metrics(args) -> int:
    config = _load_config(args.config, "metrics")
    out_dir = Path(args.output_dir or config.get("output_dir", "."))
    out_dir.mkdir(parents=True, exist_ok=True)
    selected = [
        name.strip()
        for name in _setting(args, config, "metrics", str).split(",")
        if name.strip()
    ]
    known = {"hausdorff", "procrustes", "persistence", "bottleneck"}
    unknown = set(selected) - known
    if unknown:
        raise InputError(f"unknown metrics {sorted(unknown)}; choose from {sorted(known)}")
    emb_a = _embedding_from_file(args.a)
    emb_b = _embedding_from_file(args.b)

    report: dict = {
        "command": "metrics",
        "a": str(args.a),
        "b": str(args.b),
        "rows_a": emb_a.rows,
        "rows_b": emb_b.rows,
    }
    haus = metrics.hausdorff(emb_a, emb_b)
    report["hausdorff"] = haus.to_dict()

    if "procrustes" in selected:
        report["procrustes"] = metrics.procrustes(emb_a, emb_b).to_dict()

    if "persistence" in selected or "bottleneck" in selected:
        seed = _setting(args, config, "seed", int)
        max_points = _setting(args, config, "max_points", int)
        max_radius = _setting(args, config, "max_radius", float)
        if max_radius <= 0.0:
            # appendix convention: compare topology at the scale set by the
            # normalized overlap between the two embeddings
            max_radius = haus.normalized if haus.normalized > 0.0 else haus.diagonal
        params = topology.RipsParams(
            max_radius=max_radius, max_points=max_points, subsample_seed=seed
        )
        dgm_a0, dgm_a1 = topology.rips_persistence(emb_a, params)
        dgm_b0, dgm_b1 = topology.rips_persistence(emb_b, params)
        diag_a = out_dir / "diagram_a.csv"
        diag_b = out_dir / "diagram_b.csv"
        topology.export_diagrams_csv(diag_a, [dgm_a0, dgm_a1])
        topology.export_diagrams_csv(diag_b, [dgm_b0, dgm_b1])
        report["persistence"] = {
            "max_radius": max_radius,
            "max_points": max_points,
            "subsampled_a": emb_a.rows > max_points,
            "subsampled_b": emb_b.rows > max_points,
            "h0_bars_a": int(dgm_a0.pairs.shape[0] + dgm_a0.essential),
            "h0_bars_b": int(dgm_b0.pairs.shape[0] + dgm_b0.essential),
            "h1_pairs_a": int(dgm_a1.pairs.shape[0]),
            "h1_pairs_b": int(dgm_b1.pairs.shape[0]),
            "h1_essential_a": dgm_a1.essential,
            "h1_essential_b": dgm_b1.essential,
            "diagram_a_file": str(diag_a),
            "diagram_b_file": str(diag_b),
        }
        if "bottleneck" in selected:
            # H0 is omitted from bottleneck comparisons by convention
            report["bottleneck"] = {"h1": topology.bottleneck(dgm_a1, dgm_b1)}

    _emit_report(report, args.format, out_dir / "metrics_report.json")
    return 0


def cmd_analyze(args) -> int:
    config = _load_config(args.config, "analyze")
    out_dir = Path(args.output_dir or config.get("output_dir", "."))
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.table3:
        records = ana.load_table3()
        source = "table3"
    else:
        if not args.records:
            raise InputError("analyze needs a records CSV (or --table3)")
        records = ana.read_records_csv(args.records)
        source = str(args.records)
    report_obj = ana.correlation_report(records)
    threshold = _setting(args, config, "threshold", float)
    separability = ana.linear_separability_check(records, threshold)

    points_path = out_dir / "fig4_points.csv"
    with open(points_path, "w", encoding="utf-8") as fh:
        fh.write("H,AA,target,surrogate,dataset\n")
        for r in ana.usable(records):
            fh.write(f"{r.H!r},{r.AA!r},{r.target},{r.surrogate},{r.dataset}\n")

    _emit_report(
        {
            "command": "analyze",
            "source": source,
            "n_records": len(records),
            "correlation": report_obj.to_dict(),
            "separability": separability.to_dict(),
            "reference": {
                "pca_eigenvalues_reported": list(ana.REFERENCE_PCA_EIGENVALUES),
            },
            "points_file": str(points_path),
        },
        args.format,
        out_dir / "correlation_report.json",
    )
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None, help="RNG seed")
    parser.add_argument("--output-dir", default=None, help="directory for outputs")
    parser.add_argument(
        "--format", choices=("json", "csv"), default="json", help="report format"
    )
    parser.add_argument("--config", default=None, help="key = value config file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=PROG,
        description="cross-manifold embedding overlap analysis",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit a 2-D embedding on a surrogate FVEC")
    p_fit.add_argument("input", help="surrogate feature FVEC file")
    p_fit.add_argument("--pad-dim", dest="pad_dim", type=int, default=None)
    p_fit.add_argument("--n-neighbors", dest="n_neighbors", type=int, default=None)
    p_fit.add_argument("--min-dist", dest="min_dist", type=float, default=None)
    p_fit.add_argument("--n-epochs", dest="n_epochs", type=int, default=None)
    p_fit.add_argument("--metric", choices=("euclidean", "cosine"), default=None)
    p_fit.add_argument("--init", choices=("spectral", "seeded_random"), default=None)
    p_fit.add_argument(
        "--negative-sample-rate", dest="negative_sample_rate", type=int, default=None
    )
    p_fit.add_argument(
        "--learning-rate", dest="learning_rate", type=float, default=None
    )
    _add_common(p_fit)
    p_fit.set_defaults(func=cmd_fit)

    p_project = sub.add_parser("project", help="cross-project a target FVEC")
    p_project.add_argument("--model", required=True, help="XMEM model file")
    p_project.add_argument("input", help="target feature FVEC file")
    _add_common(p_project)
    p_project.set_defaults(func=cmd_project)

    p_metrics = sub.add_parser("metrics", help="compare two coordinate files")
    p_metrics.add_argument("a", help="first coordinates file (.fvec or .csv)")
    p_metrics.add_argument("b", help="second coordinates file (.fvec or .csv)")
    p_metrics.add_argument(
        "--metrics",
        dest="metrics",
        default=None,
        help="comma list: hausdorff,procrustes,persistence,bottleneck",
    )
    p_metrics.add_argument("--max-radius", dest="max_radius", type=float, default=None)
    p_metrics.add_argument("--max-points", dest="max_points", type=int, default=None)
    _add_common(p_metrics)
    p_metrics.set_defaults(func=cmd_metrics)

    p_analyze = sub.add_parser("analyze", help="correlate records with overlap")
    p_analyze.add_argument("records", nargs="?", default=None, help="records CSV")
    p_analyze.add_argument(
        "--table3", action="store_true", help="use the bundled study table"
    )
    p_analyze.add_argument("--threshold", type=float, default=None)
    _add_common(p_analyze)
    p_analyze.set_defaults(func=cmd_analyze)

    p_repro = sub.add_parser("repro-fig4", help="alias for analyze --table3")
    p_repro.add_argument("--threshold", type=float, default=None)
    _add_common(p_repro)
    p_repro.set_defaults(func=cmd_analyze, table3=True, records=None)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _thread_cap()
        return args.func(args)
    except XManifoldError as exc:
        print(f"{PROG}: error [{exc.code}]: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
