"""Cross-validation harness, paired t-test, and result rendering.

Every fold refits the normalizer (and the autoencoder, when enabled) on
its training split only, so no test-fold information leaks into any
fitting stage.  Per-fold seeds are derived from the run seed, making a
whole run bit-reproducible from (dataset, k, seed, config).
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .classifier import TrainConfig, labels_from_scores, predict_scores, train
from .datasets import MultiLabelDataset, make_folds
from .errors import ConfigError, DataError, DegenerateStatisticError, ShapeError
from .expansion import ExpansionConfig
from .linalg import derive_seed
from .metrics import METRIC_NAMES, MetricsReport, compute_report, mean_report


@dataclass
class CvResult:
    """Per-fold metric reports plus their mean for one k-fold run."""

    k: int
    fold_reports: list[MetricsReport]
    mean_report: MetricsReport
    seed: int
    config_snapshot: dict


@dataclass
class TTestResult:
    t_value: float
    degrees_of_freedom: int
    critical_value: float
    significant: bool


def _fold_train_config(cfg: TrainConfig, seed: int, fold: int) -> TrainConfig:
    """Give each fold its own reproducible classifier and autoencoder streams."""
    return replace(
        cfg,
        seed=derive_seed(seed, cfg.seed, fold, 0),
        ae=replace(cfg.ae, seed=derive_seed(seed, cfg.ae.seed, fold, 1)),
    )


def _run_fold(args) -> MetricsReport:
    data, train_idx, test_idx, expansion, fold_cfg, use_autoencoder, threshold = args
    model = train(
        data.subset(train_idx),
        expansion,
        fold_cfg,
        use_autoencoder=use_autoencoder,
        threshold=threshold,
    )
    scores = predict_scores(model, data.features[test_idx])
    predictions = labels_from_scores(scores, model.threshold)
    return compute_report(data.labels[test_idx], scores, predictions)


def config_snapshot(
    dataset_name: str,
    k: int,
    seed: int,
    expansion: ExpansionConfig,
    cfg: TrainConfig,
    use_autoencoder: bool,
    threshold: float,
) -> dict:
    return {
        "dataset": dataset_name,
        "method": "ae-mlflann" if use_autoencoder else "mlflann",
        "k": k,
        "seed": seed,
        "threshold": threshold,
        "use_autoencoder": bool(use_autoencoder),
        "expansion": {"p": expansion.p, "basis": expansion.basis},
        "output_layer": {
            "mu": cfg.mu,
            "epochs": cfg.epochs,
            "seed": cfg.seed,
            "init_scale": cfg.init_scale,
        },
        "autoencoder": {
            "learning_rate": cfg.ae.learning_rate,
            "epochs": cfg.ae.epochs,
            "hidden_fraction": cfg.ae.hidden_fraction,
            "init_scale": cfg.ae.init_scale,
            "seed": cfg.ae.seed,
            "act_encode": cfg.ae.act_encode.value,
            "act_decode": cfg.ae.act_decode.value,
        },
    }


def cross_validate(
    data: MultiLabelDataset,
    k: int,
    expansion: ExpansionConfig,
    cfg: TrainConfig,
    use_autoencoder: bool = True,
    seed: int = 0,
    dataset_name: str = "",
    threshold: float = 0.5,
    jobs: int = 1,
) -> CvResult:
    """k-fold cross-validation of the full training pipeline.

    Folds are independent and may run in parallel (``jobs`` > 1);
    aggregation always happens in fold order, so results do not depend
    on completion order.
    """
    plan = make_folds(data.n_instances, k, seed)
    fold_args = [
        (
            data,
            plan.train_indices(f),
            plan.test_indices(f),
            expansion,
            _fold_train_config(cfg, seed, f),
            use_autoencoder,
            threshold,
        )
        for f in range(k)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_run_fold, fold_args))
    else:
        reports = [_run_fold(args) for args in fold_args]
    return CvResult(
        k=k,
        fold_reports=reports,
        mean_report=mean_report(reports),
        seed=seed,
        config_snapshot=config_snapshot(
            dataset_name, k, seed, expansion, cfg, use_autoencoder, threshold
        ),
    )


def paired_t_test(a, b, alpha_critical: float) -> TTestResult:
    """One-tailed paired t statistic for matched samples a and b.

    t = mean(d) / (sd(d) / sqrt(n)) with d = a - b and sd the
    (n-1)-denominator standard deviation; significant when t exceeds the
    supplied critical value.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ShapeError(f"paired samples must share one 1-D shape, got {a.shape} and {b.shape}")
    n = len(a)
    if n < 2:
        raise DataError(f"paired t-test needs at least 2 pairs, got {n}")
    d = a - b
    sd = float(d.std(ddof=1))
    if sd == 0.0:
        raise DegenerateStatisticError("differences have zero variance; t is undefined")
    t = float(d.mean()) / (sd / math.sqrt(n))
    return TTestResult(
        t_value=t,
        degrees_of_freedom=n - 1,
        critical_value=alpha_critical,
        significant=t > alpha_critical,
    )


# ---------------------------------------------------------------------------
# Rendering and result files
# ---------------------------------------------------------------------------

_HEADER = ["dataset", "method", *METRIC_NAMES]


def _result_row(result: CvResult) -> list[str]:
    snap = result.config_snapshot
    values = [f"{getattr(result.mean_report, name):.4f}" for name in METRIC_NAMES]
    return [str(snap.get("dataset", "")), str(snap.get("method", "")), *values]


def render_report(results: list[CvResult], format: str = "csv") -> str:
    """One row per run, one column per metric, 4-decimal formatting."""
    if not results:
        raise ConfigError("no results to render")
    rows = [_result_row(r) for r in results]
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(_HEADER)
        writer.writerows(rows)
        return buf.getvalue()
    if format == "markdown":
        lines = [
            "| " + " | ".join(_HEADER) + " |",
            "|" + "|".join("---" for _ in _HEADER) + "|",
        ]
        lines.extend("| " + " | ".join(row) + " |" for row in rows)
        return "\n".join(lines) + "\n"
    raise ConfigError(f"unknown report format {format!r}")


def snapshot_hash(snapshot: dict) -> str:
    canon = json.dumps(snapshot, sort_keys=True).encode()
    return hashlib.sha256(canon).hexdigest()[:10]


def result_stem(result: CvResult) -> str:
    dataset = result.config_snapshot.get("dataset") or "dataset"
    safe = "".join(ch if ch.isalnum() or ch in "-_" else "-" for ch in dataset)
    return f"{safe}_{result.k}fold_{snapshot_hash(result.config_snapshot)}"


def write_fold_csv(result: CvResult, out_dir) -> str:
    """Per-fold metric rows plus a mean row, full float precision."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{result_stem(result)}.csv"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["fold", *METRIC_NAMES])
    for f, report in enumerate(result.fold_reports):
        writer.writerow([f, *(repr(getattr(report, name)) for name in METRIC_NAMES)])
    writer.writerow(["mean", *(repr(getattr(result.mean_report, name)) for name in METRIC_NAMES)])
    path.write_text(buf.getvalue())
    return str(path)


def _flatten(prefix: str, value, into: dict) -> None:
    if isinstance(value, dict):
        for key, sub in value.items():
            _flatten(f"{prefix}.{key}" if prefix else str(key), sub, into)
    else:
        into[prefix] = value


def write_manifest(result: CvResult, out_dir) -> str:
    """Plain-text run manifest: every config key and seed, one per line."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{result_stem(result)}.manifest.txt"
    flat: dict = {}
    _flatten("", result.config_snapshot, flat)
    flat["cv_seed"] = result.seed
    flat["folds"] = result.k
    lines = [f"{key} = {flat[key]}" for key in sorted(flat)]
    path.write_text("\n".join(lines) + "\n")
    return str(path)
