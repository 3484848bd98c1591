"""Command orchestration: single trainings, benchmark sweeps, and reports.

A bench run keeps a manifest next to its results CSV recording the
config hash and every completed (dataset, method) cell with its row, so
an interrupted run resumed with the same config reproduces the
uninterrupted CSV byte for byte (wall-clock time columns aside). All
file writes funnel through one lock.
"""

import csv
import hashlib
import json
import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .config import ConfigError
from .data import fit_apply_scaling, load_manifest
from .methods import get_method, hidden_nodes, predict_method, resolve_params, train_method
from .model_io import save_model
from .ranking import rank_report, rank_rows, report_markdown, significance_marks
from .selection import EvalResult, accuracy, auc, grid_search
from .synthetic import interleaved_arcs, separable_blobs

log = logging.getLogger("randnet")

RESULT_COLUMNS = ("dataset", "method", "params", "val_accuracy",
                  "test_accuracy", "auc", "hidden_nodes", "train_time_ms",
                  "error")
TIME_COLUMNS = ("train_time_ms",)

SWEEP_AXES = {"L": "layers", "N": "ae_width", "C": "C", "nu": "noise"}


def materialize_dataset(decl, cfg):
    """Load or generate one dataset and apply train-fitted scaling."""
    if decl.synthetic is not None:
        spec = dict(decl.synthetic)
        kind = spec.pop("kind")
        spec.setdefault("seed", 0)
        if kind == "blobs":
            ds = separable_blobs(
                n=spec.get("n_train", 200), n_val=spec.get("n_val", 0),
                n_test=spec.get("n_test", 0), gap=spec.get("gap", 4.0),
                seed=spec["seed"], name=decl.name)
        else:
            ds = interleaved_arcs(
                n_train=spec.get("n_train", 400), n_val=spec.get("n_val", 200),
                n_test=spec.get("n_test", 200), noise=spec.get("noise", 0.15),
                seed=spec["seed"], name=decl.name)
    else:
        ds = load_manifest(cfg.base_dir / decl.manifest)
        ds.name = decl.name
    if cfg.scaling != "none":
        ds, _ = fit_apply_scaling(ds, cfg.scaling)
    return ds


def _format_cell(value):
    if value is None or value == "":
        return ""
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, dict):
        return json.dumps(value, sort_keys=True)
    return str(value)


def result_row(res):
    return {col: _format_cell(getattr(res, col)) for col in RESULT_COLUMNS}


def write_results_csv(rows, path):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=RESULT_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def read_results_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def config_hash(cfg):
    doc = {
        "datasets": [(d.name, d.manifest, d.synthetic) for d in cfg.datasets],
        "methods": [(m.name, m.params, m.grid) for m in cfg.methods],
        "seeds": cfg.seeds,
        "scaling": cfg.scaling,
        "retrain_with_validation": cfg.retrain_with_validation,
    }
    blob = json.dumps(doc, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()


def evaluate_fixed(ds, method, params, seed):
    """Train at fixed hyperparameters; score validation (if any) and test."""
    params = resolve_params(method, params)
    Xtr, Ytr, _ = ds.part("train")
    t0 = time.perf_counter()
    model = train_method(method, params, Xtr, Ytr, seed)
    train_ms = (time.perf_counter() - t0) * 1000.0
    val_acc = float("nan")
    if "validation" in ds.partitions:
        Xva, _, yva = ds.part("validation")
        _, pred = predict_method(model, Xva)
        val_acc = accuracy(yva, pred)
    test_acc = float("nan")
    auc_value = None
    if "test" in ds.partitions:
        Xte, _, yte = ds.part("test")
        scores, pred = predict_method(model, Xte)
        test_acc = accuracy(yte, pred)
        if ds.n_classes == 2:
            auc_value = auc(scores[:, 1], yte)
    res = EvalResult(
        dataset=ds.name, method=method.name,
        params={k: params[k] for k in sorted(method.axes)},
        val_accuracy=val_acc, test_accuracy=test_acc, auc=auc_value,
        hidden_nodes=hidden_nodes(method, params), train_time_ms=train_ms)
    return model, res


def run_train(cfg, dataset_name, method_name, out_dir, seed=None):
    """Train one model at the configured fixed hyperparameters.

    Writes the model container and appends one metrics row; the model
    file bytes depend only on (config, seed).
    """
    decl = _find(cfg.datasets, dataset_name, "dataset")
    mdecl = _find(cfg.methods, method_name, "method")
    method = get_method(mdecl.name)
    ds = materialize_dataset(decl, cfg)
    seed = cfg.seeds[0] if seed is None else seed
    model, res = evaluate_fixed(ds, method, mdecl.params, seed)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    model_path = out_dir / f"{dataset_name}__{method_name}__seed{seed}.rnm"
    save_model(model, model_path)
    metrics_path = out_dir / "train_metrics.csv"
    rows = read_results_csv(metrics_path) if metrics_path.exists() else []
    rows.append(result_row(res))
    write_results_csv(rows, metrics_path)
    log.info("trained %s on %s: test accuracy %.4f",
             method_name, dataset_name, res.test_accuracy)
    return model_path, res


def _find(decls, name, what):
    for d in decls:
        if d.name == name:
            return d
    raise ConfigError(f"{what} {name!r} is not declared in the config")


def run_bench(cfg, out_dir, resume=False, _fail_after=None):
    """Grid search over every (dataset, method) cell; resumable.

    Failed cells are recorded with their error string and the run
    continues. With parallelism > 1 the independent cells run
    concurrently; the output order is canonical either way.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    results_path = out_dir / "results.csv"
    manifest_path = out_dir / "bench_manifest.json"
    digest = config_hash(cfg)
    completed = {}
    if resume and manifest_path.exists():
        manifest = json.loads(manifest_path.read_text())
        if manifest.get("config_hash") != digest:
            raise ConfigError(
                "bench manifest belongs to a different config; refusing to resume"
            )
        completed = manifest.get("cells", {})
        log.info("resuming: %d cells already complete", len(completed))

    datasets = {}
    for decl in cfg.datasets:
        datasets[decl.name] = materialize_dataset(decl, cfg)

    cells = [(d.name, m.name) for d in cfg.datasets for m in cfg.methods]
    lock = threading.Lock()
    done_counter = [len(completed)]

    def run_cell(cell):
        ds_name, m_name = cell
        mdecl = _find(cfg.methods, m_name, "method")
        method = get_method(m_name)
        try:
            res = grid_search(
                datasets[ds_name], method, cfg.grid_for(mdecl), cfg.seeds,
                base_params=mdecl.params,
                retrain_with_validation=cfg.retrain_with_validation)
            row = result_row(res)
        except Exception as exc:  # partial-failure policy: record and go on
            log.warning("cell %s/%s failed: %s", ds_name, m_name, exc)
            row = {col: "" for col in RESULT_COLUMNS}
            row.update(dataset=ds_name, method=m_name, error=str(exc))
        with lock:
            completed[f"{ds_name}::{m_name}"] = row
            manifest_path.write_text(json.dumps(
                {"config_hash": digest, "cells": completed}, sort_keys=True,
                indent=1))
            done_counter[0] += 1
            if _fail_after is not None and done_counter[0] >= _fail_after:
                raise KeyboardInterrupt("injected interruption")
        return row

    pending = [c for c in cells if f"{c[0]}::{c[1]}" not in completed]
    if cfg.parallelism > 1 and pending:
        with ThreadPoolExecutor(max_workers=cfg.parallelism) as pool:
            list(pool.map(run_cell, pending))
    else:
        for cell in pending:
            run_cell(cell)

    rows = [completed[f"{d}::{m}"] for d, m in cells]
    write_results_csv(rows, results_path)
    return results_path


def accuracy_matrix(rows):
    """(datasets, methods, M x m matrix) from results rows; missing cells raise."""
    datasets, methods = [], []
    for row in rows:
        if row["dataset"] not in datasets:
            datasets.append(row["dataset"])
        if row["method"] not in methods:
            methods.append(row["method"])
    cell = {}
    missing = []
    for row in rows:
        key = (row["dataset"], row["method"])
        if row.get("error") or row["test_accuracy"] == "":
            missing.append(key)
        else:
            cell[key] = float(row["test_accuracy"])
    for d in datasets:
        for m in methods:
            if (d, m) not in cell and (d, m) not in missing:
                missing.append((d, m))
    if missing:
        raise ValueError(
            "incomplete accuracy matrix; missing or failed cells: "
            + ", ".join(f"{d}/{m}" for d, m in sorted(missing))
        )
    matrix = np.array([[cell[(d, m)] for m in methods] for d in datasets])
    return datasets, methods, matrix


def run_stats(results_path, out_dir, alpha=0.05):
    """Rank report, test statistics, and the significance matrix as files."""
    rows = read_results_csv(results_path)
    if not rows:
        raise ValueError(f"{results_path} holds no result rows")
    datasets, methods, matrix = accuracy_matrix(rows)
    if len(methods) < 2:
        raise ValueError("need at least 2 methods for a rank comparison")
    if len(datasets) < 2:
        raise ValueError("need at least 2 datasets for a rank comparison")
    table = rank_rows(matrix, methods=tuple(methods), datasets=tuple(datasets))
    report = rank_report(table, alpha)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    ranks_path = out_dir / "ranks.csv"
    with open(ranks_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method", "mean_rank"])
        for i in np.argsort(table.mean_ranks):
            writer.writerow([methods[i], repr(float(table.mean_ranks[i]))])

    sig_path = out_dir / "significance.csv"
    marks = significance_marks(report["significance"])
    with open(sig_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([""] + methods)
        for i, name in enumerate(methods):
            writer.writerow([name] + list(marks[i]))

    md_path = out_dir / "report.md"
    md_path.write_text(report_markdown(table, report))
    return {"ranks": ranks_path, "significance": sig_path, "report": md_path,
            "stats": report, "table": table}


def run_sweep(cfg, dataset_name, method_name, axes, out_dir):
    """Sensitivity sweep: test accuracy at every point of the chosen axes.

    Axes come from {L, N, C, nu}; the remaining hyperparameters stay at
    the method's configured fixed values and training uses the first
    configured seed.
    """
    for axis in axes:
        if axis not in SWEEP_AXES:
            raise ConfigError(
                f"unknown sweep axis {axis!r}; expected a subset of "
                f"{sorted(SWEEP_AXES)}")
    decl = _find(cfg.datasets, dataset_name, "dataset")
    mdecl = _find(cfg.methods, method_name, "method")
    method = get_method(method_name)
    ds = materialize_dataset(decl, cfg)
    grid = cfg.grid_for(mdecl)
    axis_values = {
        "L": (1, 2, 3),
        "N": grid.ae_widths,
        "C": grid.C_values,
        "nu": grid.noise_values,
    }
    points = [{}]
    for axis in axes:
        points = [dict(p, **{axis: v}) for p in points for v in axis_values[axis]]
    Xtr, Ytr, _ = ds.part("train")
    Xte, _, yte = ds.part("test")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    sweep_path = out_dir / f"sweep_{dataset_name}__{method_name}.csv"
    with open(sweep_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(axes) + ["accuracy"])
        for point in points:
            params = dict(mdecl.params)
            params.update({SWEEP_AXES[a]: v for a, v in point.items()})
            model = train_method(method, params, Xtr, Ytr, cfg.seeds[0])
            _, pred = predict_method(model, Xte)
            acc = accuracy(yte, pred)
            writer.writerow([_format_cell(point[a]) for a in axes]
                            + [repr(acc)])
    return sweep_path
