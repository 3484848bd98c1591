"""Single-hidden-layer classifiers with closed-form output weights.

The RVFL feeds the output layer both the random hidden features H and
the raw inputs X (direct links), so the design matrix is D = [H X]; the
ELM is the same network with the direct links removed. Targets are
{0, 1} one-hot columns and the decision rule is argmax over class
scores with ties broken toward the lowest class index.
"""

from dataclasses import dataclass

import numpy as np

from .numerics import RngState, ShapeError, activate, concat_cols
from .solvers import KernelSpec, kernel_matrix, krr_fit, pinv_solve, ridge_solve


@dataclass
class RandomLayer:
    """Fixed random affine map plus non-linearity; never updated by training."""

    W: np.ndarray  # input_dim x width
    b: np.ndarray  # 1 x width
    activation: str = "sigmoid"

    def transform(self, X):
        if X.ndim != 2 or X.shape[1] != self.W.shape[0]:
            raise ShapeError(
                f"input has {X.shape[1] if X.ndim == 2 else '?'} features, "
                f"layer expects {self.W.shape[0]}"
            )
        return activate(self.activation, X @ self.W + self.b)

    @property
    def width(self):
        return self.W.shape[1]


def make_random_layer(input_dim, width, seed, activation="sigmoid",
                      weight_range=(-1.0, 1.0)):
    """Draw weights then biases from one uniform stream over weight_range."""
    rng = RngState(seed)
    lo, hi = weight_range
    W = rng.uniform(input_dim, width, lo, hi)
    b = rng.uniform(1, width, lo, hi)
    return RandomLayer(W, b, activation)


@dataclass
class ShallowModel:
    kind: str  # rvfl | elm | kelm
    n_classes: int
    layer: RandomLayer | None = None
    weights: np.ndarray | None = None  # Beta (rvfl/elm) or Alpha (kelm)
    direct_links: bool = False
    output_bias: bool = False
    kernel: KernelSpec | None = None
    train_X: np.ndarray | None = None  # retained for the kernel variant
    lam: float = 1.0
    seed: int | None = None

    def design(self, X):
        """Feature map seen by the output weights (rvfl/elm only)."""
        parts = [self.layer.transform(X)]
        if self.direct_links:
            parts.append(X)
        if self.output_bias:
            parts.append(np.ones((X.shape[0], 1)))
        return concat_cols(parts)


def rvfl_train(X, Y, width, lam, seed, activation="sigmoid", direct_links=True,
               output_bias=False, weight_range=(-1.0, 1.0)):
    """Random hidden layer, then ridge on D = [H X] (plus optional bias column).

    lam = 0 routes through the pseudoinverse instead of ridge.
    """
    if width < 1:
        raise ValueError(f"width must be >= 1, got {width}")
    if lam < 0:
        raise ValueError(f"lam must be >= 0, got {lam}")
    layer = make_random_layer(X.shape[1], width, seed, activation, weight_range)
    model = ShallowModel(
        kind="rvfl" if direct_links else "elm",
        n_classes=Y.shape[1],
        layer=layer,
        direct_links=direct_links,
        output_bias=output_bias,
        lam=lam,
        seed=seed,
    )
    D = model.design(X)
    model.weights = pinv_solve(D, Y) if lam == 0 else ridge_solve(D, Y, lam, "auto")
    return model


def elm_train(X, Y, width, lam, seed, activation="sigmoid",
              weight_range=(-1.0, 1.0)):
    """RVFL with the direct links (and output bias) ablated; shares its code path."""
    return rvfl_train(X, Y, width, lam, seed, activation,
                      direct_links=False, output_bias=False,
                      weight_range=weight_range)


def kelm_train(X, Y, spec, lam):
    """Kernel variant: representer coefficients on K(X, X), inputs retained."""
    if lam <= 0:
        raise ValueError(f"lam must be > 0 for the kernel variant, got {lam}")
    alpha = krr_fit(kernel_matrix(X, X, spec), Y, lam)
    # stored as a copy so prediction can never hit the same-object
    # symmetrization fast path and drift from a deserialized model
    return ShallowModel(
        kind="kelm",
        n_classes=Y.shape[1],
        weights=alpha,
        kernel=spec,
        train_X=X.copy(),
        lam=lam,
    )


def predict(model, X):
    """Class scores and argmax labels; ties go to the lowest class index."""
    if model.kind == "kelm":
        if X.shape[1] != model.train_X.shape[1]:
            raise ShapeError(
                f"input has {X.shape[1]} features, model expects {model.train_X.shape[1]}"
            )
        scores = kernel_matrix(X, model.train_X, model.kernel) @ model.weights
    else:
        scores = model.design(X) @ model.weights
    return scores, np.argmax(scores, axis=1)
