"""Hyperparameter grids, validation-based selection, and evaluation metrics.

Selection never sees test rows: candidates are scored with the train
and validation partitions only, and the test slice is read strictly
after the winning configuration is fixed.
"""

import time
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .methods import hidden_nodes, predict_method, resolve_params, train_method

C_EXPONENTS = (-7, -5, -3, -1, 1, 3, 5, 7)


@dataclass
class GridSpec:
    """Default search axes.

    ae_widths 10..200 step 10, classifier widths 100..2000 step 100,
    C (and kernel sigma) on the 10^x grid for odd x in [-7, 7], noise
    levels for the denoising variants. search is "stagewise" (the
    default; autoencoder axes first with the classifier pinned at 500
    nodes and C = 1, then classifier axes) or "full" for the complete
    cartesian product.
    """

    ae_widths: tuple = tuple(range(10, 201, 10))
    clf_widths: tuple = tuple(range(100, 2001, 100))
    C_values: tuple = tuple(10.0 ** x for x in C_EXPONENTS)
    sigma_values: tuple = tuple(10.0 ** x for x in C_EXPONENTS)
    noise_values: tuple = (0.05, 0.1, 0.15, 0.3, 0.5, 0.75)
    search: str = "stagewise"

    def __post_init__(self):
        for name in ("ae_widths", "clf_widths", "C_values", "sigma_values",
                     "noise_values"):
            if not len(getattr(self, name)):
                raise ValueError(f"grid axis {name} is empty")
        if self.search not in ("stagewise", "full"):
            raise ValueError(f"unknown search policy {self.search!r}")

    def axis(self, name):
        return {
            "ae_width": self.ae_widths,
            "clf_width": self.clf_widths,
            "C": self.C_values,
            "sigma": self.sigma_values,
            "noise": self.noise_values,
        }[name]


@dataclass
class EvalResult:
    dataset: str
    method: str
    params: dict
    val_accuracy: float
    test_accuracy: float
    auc: float | None
    hidden_nodes: int
    train_time_ms: float
    error: str | None = None


def accuracy(labels_true, labels_pred):
    labels_true = np.asarray(labels_true)
    labels_pred = np.asarray(labels_pred)
    if labels_true.shape != labels_pred.shape:
        raise ValueError("label vectors differ in length")
    return float(np.mean(labels_true == labels_pred))


def auc(scores, labels):
    """Mann-Whitney AUC: P(score_pos > score_neg) + P(equal) / 2.

    Computed from average ranks, which handles ties exactly.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    n_pos = int(np.sum(labels == 1))
    n_neg = int(np.sum(labels == 0))
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs both classes present")
    ranks = rankdata(scores, method="average")
    pos_rank_sum = float(np.sum(ranks[labels == 1]))
    return (pos_rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def expand_grid(grid, method, base_params=None):
    """Full cartesian grid over the axes the method uses, deterministic order."""
    base = resolve_params(method, base_params)
    configs = [dict(base)]
    for axis in method.axes:
        configs = [dict(c, **{axis: v}) for c in configs for v in grid.axis(axis)]
    return configs


def _stage_configs(grid, method, base):
    """Stagewise candidate lists: (stage-1 axes, stage-2 axes)."""
    ae_axes = [a for a in method.axes if a in ("ae_width", "noise", "C", "sigma")]
    clf_axes = [a for a in method.axes if a in ("clf_width", "C")]
    if "ae_width" not in method.axes:
        # shallow and kernel methods have one stage
        return [(tuple(method.axes), base)], None
    stage1_base = dict(base, clf_width=500, C=1.0)
    return [(tuple(ae_axes), stage1_base)], tuple(clf_axes)


def _product(grid, axes, base):
    configs = [dict(base)]
    for axis in axes:
        configs = [dict(c, **{axis: v}) for c in configs for v in grid.axis(axis)]
    return configs


def grid_search(ds, method, grid, seeds, base_params=None,
                retrain_with_validation=False):
    """Pick hyperparameters on validation accuracy, then evaluate on test.

    Candidates are trained on the train split with seeds[0] and scored
    on validation; the winner (ties: fewer hidden nodes, then earlier
    grid order) is retrained once per seed (optionally on train plus
    validation) and the test accuracy is averaged over seeds.
    """
    for role in ("train", "validation", "test"):
        if role not in ds.partitions:
            raise ValueError(f"dataset {ds.name!r} has no {role!r} partition")
    base = resolve_params(method, base_params)
    Xtr, Ytr, _ = ds.part("train")
    Xva, _, yva = ds.part("validation")

    def validation_score(params):
        model = train_method(method, params, Xtr, Ytr, seeds[0])
        _, pred = predict_method(model, Xva)
        return accuracy(yva, pred)

    def node_budget(params):
        return hidden_nodes(method, params)

    if grid.search == "full":
        candidates = expand_grid(grid, method, base)
        best = _pick_best(candidates, validation_score, node_budget)
    else:
        stages, clf_axes = _stage_configs(grid, method, base)
        axes, stage_base = stages[0]
        best = _pick_best(_product(grid, axes, stage_base), validation_score,
                          node_budget)
        if clf_axes is not None:
            stage2 = _product(grid, clf_axes, best.params)
            best = _pick_best(stage2, validation_score, node_budget)
    chosen = best.params

    # selection is complete; only now may test rows be read
    Xte, _, yte = ds.part("test")
    if retrain_with_validation:
        idx = np.concatenate([ds.partitions["train"], ds.partitions["validation"]])
        X_fit, Y_fit = ds.X[idx], ds.Y[idx]
    else:
        X_fit, Y_fit = Xtr, Ytr
    accs, aucs, times = [], [], []
    binary = ds.n_classes == 2
    for seed in seeds:
        t0 = time.perf_counter()
        model = train_method(method, chosen, X_fit, Y_fit, seed)
        times.append((time.perf_counter() - t0) * 1000.0)
        scores, pred = predict_method(model, Xte)
        accs.append(accuracy(yte, pred))
        if binary:
            aucs.append(auc(scores[:, 1], yte))
    return EvalResult(
        dataset=ds.name,
        method=method.name,
        params={k: chosen[k] for k in sorted(method.axes)},
        val_accuracy=best.score,
        test_accuracy=float(np.mean(accs)),
        auc=float(np.mean(aucs)) if binary else None,
        hidden_nodes=hidden_nodes(method, chosen),
        train_time_ms=float(np.mean(times)),
    )


@dataclass
class _Candidate:
    params: dict
    score: float
    nodes: int


def _pick_best(candidates, score_fn, node_fn):
    # ties fall to fewer hidden nodes, then to earlier grid order
    best = None
    for params in candidates:
        cand = _Candidate(params, score_fn(params), node_fn(params))
        if best is None or (cand.score, -cand.nodes) > (best.score, -best.nodes):
            best = cand
    return best
