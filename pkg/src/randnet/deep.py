"""Stacked architectures: autoencoder feature pyramids with a shallow readout.

Connectivity modes govern what each layer and the final classifier see:

* plain:  layer i reads H_{i-1}; the classifier reads H_L
* direct: layers as plain; the classifier reads [H_L, X]
* dense:  layer i reads [X, H_1, ..., H_{i-1}]; the classifier reads
          [X, H_1, ..., H_L]

Each layer output is rescaled per feature to [-1, 1] with train-set
min/max (stored for inference) before anything downstream consumes it;
without this, saturating activations degrade stacking. The classifier
is an ordinary shallow net, so it applies its own fresh random map to
whatever concatenation it receives, with a seed split from the master
seed independently of the layer seeds.
"""

from dataclasses import dataclass, replace

import numpy as np

from .autoencoders import (
    AutoencoderSpec,
    CorruptionSpec,
    EncoderWeights,
    KernelDecoder,
    encode,
    rand_ae_train,
)
from .data import ScalingStats, fit_scaling
from .numerics import RngState, ShapeError, concat_cols, derive_seed
from .shallow import ShallowModel, elm_train, kelm_train, rvfl_train
from .shallow import predict as shallow_predict
from .solvers import KernelSpec

CONNECTIVITIES = ("plain", "direct", "dense")


class ResourceError(RuntimeError):
    """A guard against problem sizes the dense kernel path cannot afford."""


@dataclass
class DeepConfig:
    layers: list  # one AutoencoderSpec per layer
    connectivity: str = "dense"
    classifier: str = "rvfl"  # rvfl | elm | kelm
    clf_width: int = 500
    clf_lam: float = 1.0
    clf_activation: str = "sigmoid"
    clf_kernel: KernelSpec | None = None  # kelm classifier only
    clf_weight_range: tuple = (-1.0, 1.0)
    seed: int = 0
    corrupt_all_layers: bool = True  # False: corruption on layer 1 only

    def __post_init__(self):
        if not self.layers:
            raise ValueError("need at least one layer spec")
        if self.connectivity not in CONNECTIVITIES:
            raise ValueError(f"unknown connectivity {self.connectivity!r}")
        if self.classifier not in ("rvfl", "elm", "kelm"):
            raise ValueError(f"unknown classifier kind {self.classifier!r}")
        if self.classifier == "kelm" and self.clf_kernel is None:
            raise ValueError("kelm classifier needs clf_kernel")


@dataclass
class DeepModel:
    config: DeepConfig
    encoders: list  # EncoderWeights per layer
    scalers: list  # ScalingStats per layer
    classifier: ShallowModel
    input_dim: int


def _layer_input(X, feats, mode, i):
    if mode == "dense":
        return concat_cols([X] + feats)
    return X if i == 0 else feats[-1]


def _classifier_input(X, feats, mode):
    if mode == "plain":
        return feats[-1]
    if mode == "direct":
        return concat_cols([feats[-1], X])
    return concat_cols([X] + feats)


def deep_train(X, Y, cfg):
    """Train the layer stack and the readout classifier on (X, Y)."""
    if X.shape[0] == 0:
        raise ValueError("training set is empty")
    d = X.shape[1]
    feats, encoders, scalers = [], [], []
    for i, spec in enumerate(cfg.layers):
        inp = _layer_input(X, feats, cfg.connectivity, i)
        if cfg.connectivity == "dense":
            expected = d + sum(f.shape[1] for f in feats)
            assert inp.shape[1] == expected, (
                f"dense layer {i} input width {inp.shape[1]} != {expected}"
            )
        if not cfg.corrupt_all_layers and i > 0:
            spec = replace(spec, corruption=CorruptionSpec("none"))
        enc = rand_ae_train(inp, spec, RngState(derive_seed(cfg.seed, "layer", i)))
        H = encode(inp, enc)
        scaler = fit_scaling(H, "minmax")
        feats.append(scaler.apply(H))
        encoders.append(enc)
        scalers.append(scaler)
    X_clf = _classifier_input(X, feats, cfg.connectivity)
    clf = _train_classifier(X_clf, Y, cfg)
    return DeepModel(cfg, encoders, scalers, clf, d)


def _train_classifier(X_clf, Y, cfg):
    clf_seed = derive_seed(cfg.seed, "classifier")
    if cfg.classifier == "rvfl":
        return rvfl_train(X_clf, Y, cfg.clf_width, cfg.clf_lam, clf_seed,
                          cfg.clf_activation, weight_range=cfg.clf_weight_range)
    if cfg.classifier == "elm":
        return elm_train(X_clf, Y, cfg.clf_width, cfg.clf_lam, clf_seed,
                         cfg.clf_activation, weight_range=cfg.clf_weight_range)
    return kelm_train(X_clf, Y, cfg.clf_kernel, cfg.clf_lam)


def deep_features(model, X):
    """Replay the stored per-layer encode + scale + concatenate pipeline."""
    if X.ndim != 2 or X.shape[1] != model.input_dim:
        raise ShapeError(
            f"input has {X.shape[1] if X.ndim == 2 else '?'} features, "
            f"model expects {model.input_dim}"
        )
    feats = []
    for i, (enc, scaler) in enumerate(zip(model.encoders, model.scalers)):
        inp = _layer_input(X, feats, model.config.connectivity, i)
        feats.append(scaler.apply(encode(inp, enc)))
    return _classifier_input(X, feats, model.config.connectivity)


def deep_predict(model, X):
    """Scores and argmax labels from the replayed pipeline."""
    return shallow_predict(model.classifier, deep_features(model, X))


def mlkelm_train(X, Y, layer_specs, layer_lams, clf_kernel, clf_lam,
                 max_train_rows=4096, seed=0):
    """Kernel stack: every random layer and the classifier become kernel maps.

    Training factorizes an n-by-n kernel matrix per layer, so n is
    capped: exceeding max_train_rows raises instead of thrashing.
    """
    n = X.shape[0]
    if n > max_train_rows:
        raise ResourceError(
            f"{n} training rows exceed the cap of {max_train_rows}: the kernel "
            f"stack needs O(n^2) memory per layer"
        )
    if len(layer_specs) != len(layer_lams):
        raise ValueError("need one lam per layer kernel")
    layers = [
        AutoencoderSpec(reg=KernelDecoder(spec, lam))
        for spec, lam in zip(layer_specs, layer_lams)
    ]
    cfg = DeepConfig(
        layers=layers,
        connectivity="plain",
        classifier="kelm",
        clf_kernel=clf_kernel,
        clf_lam=clf_lam,
        seed=seed,
    )
    return deep_train(X, Y, cfg)


def hidden_node_count(model):
    """Total hidden nodes: layer widths plus classifier width; kernel maps count 0."""
    total = 0
    for enc in model.encoders:
        if enc.variant != "kernel":
            total += enc.decoder.shape[0]
    if model.classifier.layer is not None:
        total += model.classifier.layer.width
    return total
