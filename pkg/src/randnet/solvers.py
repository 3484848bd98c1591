"""Closed-form and iterative regression solvers.

Ridge in primal and dual form, Moore-Penrose least squares, kernel
ridge, FISTA for l1-penalized problems, and ADMM for the elastic net.
All objectives use the convention ``||A W - T||^2 + penalty`` with no
1/2 on the quadratic term; soft-threshold levels therefore carry a
factor of 1/2 relative to the textbook lasso.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .numerics import ShapeError, check_finite


@dataclass
class RidgeConfig:
    """l2 penalty weight and which of the two equivalent systems to invert."""

    lam: float = 1.0
    mode: str = "auto"  # primal | dual | auto

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError(f"ridge lam must be >= 0, got {self.lam}")
        if self.mode not in ("primal", "dual", "auto"):
            raise ValueError(f"unknown ridge mode {self.mode!r}")


@dataclass
class L1Config:
    lam: float = 1.0
    max_iters: int = 2000
    tol: float = 1e-10  # relative objective change

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError(f"l1 lam must be > 0, got {self.lam}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.tol <= 0:
            raise ValueError("tol must be > 0")


@dataclass
class ElasticNetConfig:
    lam: float = 1.0
    alpha_mix: float = 0.5  # proportion of l1 in the penalty
    rho: float | None = None  # ADMM penalty; defaults to lam
    max_iters: int = 5000
    tol_primal: float = 1e-10
    tol_dual: float = 1e-10

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError(f"elastic-net lam must be > 0, got {self.lam}")
        if not 0.0 <= self.alpha_mix <= 1.0:
            raise ValueError(f"alpha_mix must be in [0, 1], got {self.alpha_mix}")
        if self.rho is not None and self.rho <= 0:
            raise ValueError("rho must be > 0")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass
class KernelSpec:
    kind: str = "rbf"  # rbf | linear | polynomial
    sigma: float = 1.0  # rbf bandwidth
    degree: int = 3
    coef0: float = 1.0

    def __post_init__(self):
        if self.kind not in ("rbf", "linear", "polynomial"):
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "rbf" and self.sigma <= 0:
            raise ValueError(f"rbf sigma must be > 0, got {self.sigma}")


@dataclass
class FistaResult:
    weights: np.ndarray
    converged: bool
    iterations: int
    objective: float
    history: list  # accepted objective values, first entry is the start


@dataclass
class AdmmResult:
    weights: np.ndarray
    converged: bool
    iterations: int
    objective: float
    primal_residual: float
    dual_residual: float


def _sym_solve(G, B):
    # G is symmetric and, with the ridge shift, positive definite; fall
    # back to the generic symmetric path if Cholesky objects.
    try:
        return scipy.linalg.solve(G, B, assume_a="pos")
    except np.linalg.LinAlgError:
        return scipy.linalg.solve(G, B, assume_a="sym")


def _check_regression_args(D, Y, lam):
    if D.ndim != 2 or Y.ndim != 2:
        raise ShapeError("design and target must both be 2-D")
    if D.shape[0] != Y.shape[0]:
        raise ShapeError(f"design has {D.shape[0]} rows but target has {Y.shape[0]}")
    check_finite("design matrix", D)
    check_finite("target matrix", Y)
    if lam <= 0:
        raise ValueError(f"lam must be > 0 (use pinv_solve for lam = 0), got {lam}")


def ridge_primal(D, Y, lam):
    """Beta = (D'D + lam I)^-1 D'Y via a symmetric positive-definite solve."""
    _check_regression_args(D, Y, lam)
    G = D.T @ D
    G[np.diag_indices_from(G)] += lam
    return _sym_solve(G, D.T @ Y)


def ridge_dual(D, Y, lam):
    """Beta = D'(DD' + lam I)^-1 Y; same solution, n-by-n system."""
    _check_regression_args(D, Y, lam)
    G = D @ D.T
    G[np.diag_indices_from(G)] += lam
    return D.T @ _sym_solve(G, Y)


def ridge_solve(D, Y, lam, mode="auto"):
    """Ridge dispatch: auto inverts whichever of the two systems is smaller."""
    if mode == "auto":
        mode = "dual" if D.shape[0] < D.shape[1] else "primal"
    if mode == "primal":
        return ridge_primal(D, Y, lam)
    if mode == "dual":
        return ridge_dual(D, Y, lam)
    raise ValueError(f"unknown ridge mode {mode!r}")


def pinv_solve(D, Y):
    """Minimum-norm least-squares solution via SVD.

    Singular values below max(n, p) * eps relative to the largest are
    treated as zero, so rank deficiency never raises.
    """
    if D.ndim != 2 or Y.ndim != 2:
        raise ShapeError("design and target must both be 2-D")
    if D.shape[0] != Y.shape[0]:
        raise ShapeError(f"design has {D.shape[0]} rows but target has {Y.shape[0]}")
    check_finite("design matrix", D)
    check_finite("target matrix", Y)
    rcond = max(D.shape) * np.finfo(np.float64).eps
    beta, _, _, _ = np.linalg.lstsq(D, Y, rcond=rcond)
    return beta


def kernel_matrix(X1, X2, spec):
    """K[i, j] = k(x1_i, x2_j) for the given kernel spec.

    For rbf, k(x, y) = exp(-||x - y||^2 / (2 sigma^2)). Passing the same
    array object for X1 and X2 guarantees an exactly symmetric matrix
    with unit diagonal.
    """
    if X1.ndim != 2 or X2.ndim != 2 or X1.shape[1] != X2.shape[1]:
        raise ShapeError(
            f"kernel inputs must share the feature dimension, got {X1.shape} and {X2.shape}"
        )
    if spec.kind == "linear":
        return X1 @ X2.T
    if spec.kind == "polynomial":
        return (X1 @ X2.T + spec.coef0) ** spec.degree
    sq = (
        np.sum(X1 * X1, axis=1)[:, None]
        + np.sum(X2 * X2, axis=1)[None, :]
        - 2.0 * (X1 @ X2.T)
    )
    np.maximum(sq, 0.0, out=sq)
    if X1 is X2:
        np.fill_diagonal(sq, 0.0)
        sq = 0.5 * (sq + sq.T)
    return np.exp(-sq / (2.0 * spec.sigma**2))


def krr_fit(K, Y, lam):
    """Representer coefficients Alpha solving (K + lam I) Alpha = Y.

    Prediction on new rows Z is kernel_matrix(Z, X_train, spec) @ Alpha.
    """
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ShapeError(f"kernel matrix must be square, got {K.shape}")
    if Y.ndim != 2 or Y.shape[0] != K.shape[0]:
        raise ShapeError("target rows must match the kernel matrix")
    if lam <= 0:
        raise ValueError(f"lam must be > 0, got {lam}")
    scale = max(1.0, float(np.max(np.abs(K))))
    if float(np.max(np.abs(K - K.T))) > 1e-8 * scale:
        raise ValueError("kernel matrix is not symmetric within tolerance")
    G = K + lam * np.eye(K.shape[0])
    return _sym_solve(G, Y)


def spectral_norm(H, iters=50, tol=1e-6):
    """Largest singular value of H by power iteration on the smaller Gram matrix."""
    n, p = H.shape
    G = H.T @ H if p <= n else H @ H.T
    dim = G.shape[0]
    v = np.full(dim, 1.0 / np.sqrt(dim))
    lam = 0.0
    for _ in range(iters):
        w = G @ v
        norm = float(np.linalg.norm(w))
        if norm == 0.0:
            return 0.0
        lam_new = float(v @ w)  # Rayleigh quotient, ||v|| = 1
        v = w / norm
        if abs(lam_new - lam) <= tol * max(abs(lam_new), 1e-300):
            lam = lam_new
            break
        lam = lam_new
    return float(np.sqrt(max(lam, 0.0)))


def soft_threshold(x, t):
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


def lasso_objective(H, T, W, lam):
    R = H @ W - T
    return float(np.sum(R * R) + lam * np.sum(np.abs(W)))


def fista_lasso(H, T, cfg):
    """min ||H W - T||^2 + lam ||W||_1 by accelerated proximal gradient.

    Parameters
    ----------
    H : ndarray, n x p design
    T : ndarray, n x k target
    cfg : L1Config

    Fixed step 1/L with L = 2 * sigma_max(H)^2 from power iteration
    (padded by 1% against underestimation; the fixed point is the same
    for any valid step). Nesterov momentum t_{k+1} = (1 + sqrt(1 +
    4 t_k^2)) / 2 with a function restart whenever the momentum step
    would increase the objective, and soft threshold at lam * step.
    Exhausting max_iters returns the best iterate flagged unconverged
    rather than raising.
    """
    _check_regression_args(H, T, cfg.lam)
    p, k = H.shape[1], T.shape[1]
    W = np.zeros((p, k))
    obj = lasso_objective(H, T, W, cfg.lam)
    history = [obj]
    sigma = spectral_norm(H)
    if sigma == 0.0:
        # zero design: the penalty alone is minimized at W = 0
        return FistaResult(W, True, 0, obj, history)
    step = 1.0 / (2.0 * sigma * sigma * 1.01)
    thresh = cfg.lam * step
    HtH = H.T @ H
    HtT = H.T @ T
    V = W
    t = 1.0
    best_obj, best_w = obj, W
    converged = False
    iterations = 0
    for iterations in range(1, cfg.max_iters + 1):
        grad = 2.0 * (HtH @ V - HtT)
        W_new = soft_threshold(V - step * grad, thresh)
        obj_new = lasso_objective(H, T, W_new, cfg.lam)
        if obj_new > obj:
            # momentum overshoot: restart from the last accepted iterate
            t = 1.0
            grad = 2.0 * (HtH @ W - HtT)
            W_new = soft_threshold(W - step * grad, thresh)
            obj_new = lasso_objective(H, T, W_new, cfg.lam)
        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        V = W_new + ((t - 1.0) / t_next) * (W_new - W)
        t = t_next
        done = abs(obj - obj_new) <= cfg.tol * max(1.0, abs(obj))
        W, obj = W_new, obj_new
        history.append(obj)
        if obj < best_obj:
            best_obj, best_w = obj, W
        if done:
            converged = True
            break
    return FistaResult(best_w, converged, iterations, best_obj, history)


def elastic_net_objective(H, T, W, lam, alpha_mix):
    R = H @ W - T
    penalty = alpha_mix * np.sum(np.abs(W)) + 0.5 * (1.0 - alpha_mix) * np.sum(W * W)
    return float(np.sum(R * R) + lam * penalty)


def admm_elastic_net(H, T, cfg):
    """min ||H W - T||^2 + lam (a ||W||_1 + (1-a)/2 ||W||_2^2) by ADMM.

    Parameters
    ----------
    H : ndarray, n x p design
    T : ndarray, n x k target
    cfg : ElasticNetConfig

    Consensus splitting W = Z: the W update reuses a cached Cholesky
    factor of (2 H'H + rho I), the Z update is the elastic-net proximal
    map, and U accumulates the scaled dual. Terminates when the primal
    residual ||W - Z|| and dual residual rho ||Z - Z_prev|| both fall
    under their tolerances; otherwise returns the last iterate flagged
    unconverged.
    """
    _check_regression_args(H, T, cfg.lam)
    p, k = H.shape[1], T.shape[1]
    rho = cfg.rho if cfg.rho is not None else cfg.lam
    G = 2.0 * (H.T @ H)
    G[np.diag_indices_from(G)] += rho
    factor = scipy.linalg.cho_factor(G)
    HtT2 = 2.0 * (H.T @ T)
    l1 = cfg.lam * cfg.alpha_mix
    l2 = cfg.lam * (1.0 - cfg.alpha_mix)
    Z = np.zeros((p, k))
    U = np.zeros((p, k))
    size = np.sqrt(p * k)
    r = s = np.inf
    converged = False
    iterations = 0
    for iterations in range(1, cfg.max_iters + 1):
        W = scipy.linalg.cho_solve(factor, HtT2 + rho * (Z - U))
        Z_prev = Z
        Z = soft_threshold(W + U, l1 / rho) / (1.0 + l2 / rho)
        U = U + W - Z
        r = float(np.linalg.norm(W - Z))
        s = rho * float(np.linalg.norm(Z - Z_prev))
        eps_pri = cfg.tol_primal * (size + max(np.linalg.norm(W), np.linalg.norm(Z)))
        eps_dual = cfg.tol_dual * (size + rho * np.linalg.norm(U))
        if r <= eps_pri and s <= eps_dual:
            converged = True
            break
    obj = elastic_net_objective(H, T, Z, cfg.lam, cfg.alpha_mix)
    return AdmmResult(Z, converged, iterations, obj, r, s)
