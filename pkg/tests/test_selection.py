import numpy as np
import pytest

from randnet.methods import METHODS, get_method, resolve_params, train_method
from randnet.selection import GridSpec, accuracy, auc, expand_grid, grid_search
from randnet.synthetic import interleaved_arcs, separable_blobs

from oracles import auc_brute_force


def small_grid(**overrides):
    base = dict(
        ae_widths=(10, 20),
        clf_widths=(50, 100),
        C_values=(0.1, 10.0),
        sigma_values=(1.0,),
        noise_values=(0.1,),
    )
    base.update(overrides)
    return GridSpec(**base)


def test_default_grid_sizes():
    g = GridSpec()
    assert len(g.C_values) == 8
    assert len(g.ae_widths) == 20
    assert len(g.clf_widths) == 20
    assert g.noise_values == (0.05, 0.1, 0.15, 0.3, 0.5, 0.75)


def test_expand_grid_restricts_to_method_axes():
    g = small_grid()
    no_noise = expand_grid(g, get_method("deep_rvfl_dense_l2"))
    with_noise = expand_grid(g, get_method("deep_rvfl_dense_denoise_l2"))
    assert len(no_noise) == 2 * 2 * 2
    assert len(with_noise) == 2 * 2 * 2 * 1
    assert all("noise" in c for c in with_noise)
    shallow = expand_grid(g, get_method("rvfl"))
    assert len(shallow) == 2 * 2


def test_expand_grid_deterministic_order():
    g = small_grid()
    a = expand_grid(g, get_method("rvfl"))
    b = expand_grid(g, get_method("rvfl"))
    assert a == b


def test_accuracy_values():
    assert accuracy([1, 2, 3], [1, 2, 3]) == 1.0
    assert accuracy([1, 2, 3], [3, 1, 2]) == 0.0
    assert accuracy([0, 1, 1, 0], [0, 1, 0, 0]) == 0.75


def test_auc_extremes_and_ties():
    assert auc([0.1, 0.2, 0.8, 0.9], [0, 0, 1, 1]) == 1.0
    assert auc([0.5, 0.5, 0.5, 0.5], [0, 1, 0, 1]) == 0.5


def test_auc_brute_force_example():
    scores = [0.1, 0.4, 0.35, 0.8]
    labels = [0, 0, 1, 1]
    assert auc(scores, labels) == 0.75
    assert auc(scores, labels) == auc_brute_force(scores, labels)


def test_auc_random_cases_match_brute_force():
    rng = np.random.Generator(np.random.PCG64(0))
    for _ in range(20):
        n = 30
        scores = np.round(rng.uniform(0, 1, n), 1)  # force ties
        labels = rng.integers(0, 2, n)
        if labels.min() == labels.max():
            continue
        assert auc(scores, labels) == pytest.approx(auc_brute_force(scores, labels))


def test_auc_affine_invariance():
    rng = np.random.Generator(np.random.PCG64(1))
    scores = rng.uniform(0, 1, 40)
    labels = rng.integers(0, 2, 40)
    a = auc(scores, labels)
    b = auc(3.0 * scores + 7.0, labels)
    assert a == pytest.approx(b)


def test_auc_single_class_rejected():
    with pytest.raises(ValueError):
        auc([0.1, 0.2], [1, 1])


def test_metrics_invariant_under_sample_permutation():
    rng = np.random.Generator(np.random.PCG64(2))
    scores = rng.uniform(0, 1, 50)
    labels = rng.integers(0, 2, 50)
    pred = rng.integers(0, 2, 50)
    perm = rng.permutation(50)
    assert accuracy(labels, pred) == accuracy(labels[perm], pred[perm])
    assert auc(scores, labels) == pytest.approx(auc(scores[perm], labels[perm]))


@pytest.fixture(scope="module")
def blobs_split():
    return separable_blobs(n=120, n_val=40, n_test=40, seed=2)


def test_grid_search_single_config(blobs_split):
    g = small_grid(clf_widths=(50,), C_values=(1.0,))
    res = grid_search(blobs_split, get_method("rvfl"), g, seeds=[0])
    assert res.params == {"C": 1.0, "clf_width": 50}
    assert res.hidden_nodes == 50
    assert 0.0 <= res.val_accuracy <= 1.0


def test_grid_search_tie_prefers_fewer_nodes(blobs_split):
    # blobs are separable: both widths reach 100% validation accuracy
    g = small_grid(clf_widths=(100, 200), C_values=(1e4,))
    res = grid_search(blobs_split, get_method("rvfl"), g, seeds=[0])
    assert res.val_accuracy == 1.0
    assert res.params["clf_width"] == 100


def test_grid_search_reports_auc_for_binary(blobs_split):
    g = small_grid(clf_widths=(50,), C_values=(1e4,))
    res = grid_search(blobs_split, get_method("rvfl"), g, seeds=[0, 1])
    assert res.auc is not None and res.auc > 0.95
    assert res.train_time_ms > 0


def test_grid_search_never_reads_test_before_selection(blobs_split):
    # canary: trash every test row; selection must be unaffected, and
    # only the final test accuracy may move
    from dataclasses import replace

    g = small_grid(clf_widths=(50, 100), C_values=(0.1, 10.0))
    method = get_method("rvfl")
    clean = grid_search(blobs_split, method, g, seeds=[0])
    X_bad = blobs_split.X.copy()
    X_bad[blobs_split.partitions["test"]] = 1e9
    poisoned = replace(blobs_split, X=X_bad)
    dirty = grid_search(poisoned, method, g, seeds=[0])
    assert dirty.params == clean.params
    assert dirty.val_accuracy == clean.val_accuracy
    assert dirty.test_accuracy != clean.test_accuracy


def test_grid_search_deep_capacity_on_arcs():
    ds = interleaved_arcs(n_train=150, n_val=75, n_test=75, noise=0.1, seed=4)
    g = small_grid(ae_widths=(20,), clf_widths=(200,), C_values=(1e4,))
    res = grid_search(ds, get_method("deep_rvfl_dense_l2"), g, seeds=[0],
                      base_params={"layers": 2})
    assert res.test_accuracy >= 0.9


def test_grid_search_deep_on_separable_reaches_99():
    ds = separable_blobs(n=150, n_val=50, n_test=50, seed=6)
    g = small_grid(ae_widths=(15,), clf_widths=(100,), C_values=(100.0,))
    res = grid_search(ds, get_method("deep_rvfl_dense_l2"), g, seeds=[0, 1],
                      base_params={"layers": 2})
    assert res.test_accuracy >= 0.99


def test_grid_search_retrain_with_validation_flag(blobs_split):
    g = small_grid(clf_widths=(50,), C_values=(1e4,))
    a = grid_search(blobs_split, get_method("rvfl"), g, seeds=[0])
    b = grid_search(blobs_split, get_method("rvfl"), g, seeds=[0],
                    retrain_with_validation=True)
    assert a.params == b.params


def test_resolve_params_rejects_unknown():
    with pytest.raises(ValueError, match="unknown params"):
        resolve_params(get_method("rvfl"), {"widht": 3})


def test_every_method_trains_on_tiny_data():
    ds = separable_blobs(n=60, seed=5)
    X, Y = ds.X, ds.Y
    fast = {"layers": 2, "ae_width": 10, "clf_width": 30, "solver_iters": 100}
    for name in sorted(METHODS):
        method = get_method(name)
        model = train_method(method, fast, X, Y, seed=0)
        from randnet.methods import predict_method

        scores, pred = predict_method(model, X)
        assert scores.shape == (60, 2)
        assert pred.shape == (60,)
