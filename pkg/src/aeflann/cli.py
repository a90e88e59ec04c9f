"""Command-line interface.

Subcommands: ``cv`` (k-fold cross-validation), ``train``, ``predict``,
``ttest``, and ``expand`` (debug view of the functional expansion).

Exit codes are stable for scripting: 0 success, 2 user/config/data
error, 3 numerical divergence during training.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from .classifier import (
    LabelMode,
    load_model,
    predict_class,
    predict_labels,
    predict_scores,
    save_model,
    train,
)
from .config import RunConfig, load_dataset, parse_run_config
from .datasets import MultiLabelDataset, one_hot
from .errors import AeflannError, ConfigError, DataError, DivergenceError, ParseError
from .evaluation import cross_validate, paired_t_test, render_report, write_fold_csv, write_manifest
from .expansion import ExpansionConfig, expand
from .linalg import as_matrix

EXIT_OK = 0
EXIT_USER_ERROR = 2
EXIT_DIVERGED = 3


def _overrides(args) -> dict:
    out = {}
    if args.seed is not None:
        out["seed"] = args.seed
    if getattr(args, "out", None):
        out["out_dir"] = args.out
    return out


def _load_run_config(args) -> RunConfig:
    return parse_run_config(args.config, _overrides(args))


def _read_feature_csv(path) -> np.ndarray:
    path = Path(path)
    with path.open(newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise DataError(f"{path}: no data rows")
    width = len(rows[0])
    matrix = np.empty((len(rows), width), dtype=np.float64)
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ParseError(f"{path}:{i + 1}: expected {width} fields, got {len(row)}")
        try:
            matrix[i] = [float(tok) for tok in row]
        except ValueError as exc:
            raise DataError(f"{path}:{i + 1}: non-numeric value: {exc}") from None
    return matrix


def _read_metric_column(path, column: str) -> np.ndarray:
    """One numeric series per file: a bare column, or a named CSV column.

    Rows labelled 'mean' in the first field are skipped so per-fold
    result files can be fed in directly.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise DataError(f"{path}: no rows")
    try:
        return np.array([float(row[0]) for row in rows], dtype=np.float64)
    except ValueError:
        pass
    header = rows[0]
    if column not in header:
        raise DataError(f"{path}: no column named {column!r} and not a bare numeric column")
    idx = header.index(column)
    values = [row[idx] for row in rows[1:] if row and row[0] != "mean"]
    try:
        return np.array([float(v) for v in values], dtype=np.float64)
    except ValueError as exc:
        raise DataError(f"{path}: non-numeric value in column {column!r}: {exc}") from None


def cmd_cv(args) -> int:
    cfg = _load_run_config(args)
    if cfg.mode != LabelMode.MULTI_LABEL.value:
        raise ConfigError("cv runs on multi-label datasets; set mode = multi_label")
    data = load_dataset(cfg)
    result = cross_validate(
        data,
        cfg.k,
        cfg.expansion(),
        cfg.train_config(),
        use_autoencoder=cfg.use_autoencoder,
        seed=cfg.seed,
        dataset_name=cfg.resolved_dataset_name(),
        threshold=cfg.threshold,
        jobs=args.jobs,
    )
    csv_path = write_fold_csv(result, cfg.out_dir)
    write_manifest(result, cfg.out_dir)
    print(render_report([result], args.format), end="")
    print(f"wrote {csv_path}", file=sys.stderr)
    return EXIT_OK


def cmd_train(args) -> int:
    cfg = _load_run_config(args)
    data = load_dataset(cfg)
    mode = LabelMode(cfg.mode)
    if isinstance(data, MultiLabelDataset):
        train_data = data
    else:
        if mode is not LabelMode.SINGLE_LABEL:
            raise ConfigError("csv datasets are single-label; set mode = single_label")
        train_data = one_hot(data)
    model = train(
        train_data,
        cfg.expansion(),
        cfg.train_config(),
        use_autoencoder=cfg.use_autoencoder,
        mode=mode,
        threshold=cfg.threshold,
    )
    save_model(model, args.model_out)
    print(f"wrote {args.model_out}", file=sys.stderr)
    return EXIT_OK


def cmd_predict(args) -> int:
    model = load_model(args.model)
    features = _read_feature_csv(args.data)
    scores = predict_scores(model, features)
    out = Path(args.out_file)
    with out.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if model.mode is LabelMode.MULTI_LABEL:
            c = model.n_classes
            writer.writerow([f"score_{j}" for j in range(c)] + [f"label_{j}" for j in range(c)])
            hard = predict_labels(model, features)
            for i in range(len(scores)):
                writer.writerow(
                    [f"{v:.4f}" for v in scores[i]] + [str(int(v)) for v in hard[i]]
                )
        else:
            writer.writerow([f"score_{j}" for j in range(model.n_classes)] + ["class"])
            classes = predict_class(model, features)
            for i in range(len(scores)):
                writer.writerow([f"{v:.4f}" for v in scores[i]] + [str(int(classes[i]))])
    print(f"wrote {out}", file=sys.stderr)
    return EXIT_OK


def cmd_ttest(args) -> int:
    a = _read_metric_column(args.results_a, args.column)
    b = _read_metric_column(args.results_b, args.column)
    result = paired_t_test(a, b, args.critical)
    verdict = "significant" if result.significant else "not significant"
    print(f"t = {result.t_value:.4f}")
    print(f"df = {result.degrees_of_freedom}")
    print(f"{verdict} at critical value {result.critical_value:.4f}")
    return EXIT_OK


def cmd_expand(args) -> int:
    features = as_matrix(_read_feature_csv(args.data))
    expanded = expand(features, ExpansionConfig(p=args.p))
    writer = csv.writer(sys.stdout, lineterminator="\n")
    for row in expanded:
        writer.writerow([f"{v:.4f}" for v in row])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aeflann",
        description="Functional-link networks with autoencoder feature reduction",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    cv = sub.add_parser("cv", help="k-fold cross-validation from a config file")
    cv.add_argument("--config", required=True, help="key=value run configuration")
    cv.add_argument("--seed", type=int, default=None, help="override the config seed")
    cv.add_argument("--out", default=None, help="override the output directory")
    cv.add_argument("--jobs", type=int, default=1, help="parallel fold workers")
    cv.add_argument("--format", choices=["csv", "markdown"], default="csv")
    cv.set_defaults(func=cmd_cv)

    tr = sub.add_parser("train", help="train on the full dataset and save the model")
    tr.add_argument("--config", required=True)
    tr.add_argument("--model-out", required=True, help="where to write the model file")
    tr.add_argument("--seed", type=int, default=None)
    tr.set_defaults(func=cmd_train)

    pr = sub.add_parser("predict", help="score a feature CSV with a saved model")
    pr.add_argument("--model", required=True)
    pr.add_argument("--data", required=True, help="headerless numeric feature CSV")
    pr.add_argument("--out-file", required=True, help="where to write scores and labels")
    pr.set_defaults(func=cmd_predict)

    tt = sub.add_parser("ttest", help="paired t-test between two result columns")
    tt.add_argument("results_a")
    tt.add_argument("results_b")
    tt.add_argument("--critical", type=float, default=1.533,
                    help="one-tailed critical value (default: 90%% level at df=4)")
    tt.add_argument("--column", default="avg_precision",
                    help="column to read from headered CSVs")
    tt.set_defaults(func=cmd_ttest)

    ex = sub.add_parser("expand", help="print the expanded form of a small feature CSV")
    ex.add_argument("--data", required=True, help="headerless numeric CSV with values in [0,1]")
    ex.add_argument("--p", type=int, default=5)
    ex.set_defaults(func=cmd_expand)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except (AeflannError, FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USER_ERROR


def run() -> None:
    raise SystemExit(main())
