"""Deterministic randomness, activations, and dense-matrix helpers.

Everything downstream (random layers, autoencoders, stacked nets) draws
its randomness through :class:`RngState`, a seeded PCG64 stream with
hash-based splitting, so a whole pipeline is a pure function of its
master seed.
"""

import hashlib

import numpy as np
from scipy.special import expit


class ShapeError(ValueError):
    """Matrix dimensions do not line up."""


class NumericError(ValueError):
    """Non-finite values where finite ones are required."""


def check_finite(name, m):
    if not np.all(np.isfinite(m)):
        raise NumericError(f"{name} contains NaN or Inf entries")


def derive_seed(seed, *labels):
    """Derive a child seed from ``seed`` and a label path.

    SHA-256 over the decimal seed and the labels, truncated to 64 bits.
    The derivation depends only on the values, never on platform or on
    how many draws the parent stream has made, so any component can
    reconstruct its own stream from the master seed alone.
    """
    h = hashlib.sha256()
    h.update(str(int(seed)).encode())
    for label in labels:
        h.update(b"/")
        h.update(str(label).encode())
    return int.from_bytes(h.digest()[:8], "little")


class RngState:
    """Seeded 64-bit PCG64 stream.

    The same (seed, draw sequence) produces bit-identical output on
    every platform. A state is single-owner: concurrent users must
    spawn their own child states instead of sharing one.
    """

    def __init__(self, seed):
        self.seed = int(seed)
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def spawn(self, *labels):
        """Independent child stream for (seed, labels); leaves this stream untouched."""
        return RngState(derive_seed(self.seed, *labels))

    def uniform(self, rows, cols, lo=-1.0, hi=1.0):
        """Matrix of i.i.d. uniform draws on [lo, hi]."""
        if rows < 1 or cols < 1:
            raise ValueError(f"invalid shape ({rows}, {cols})")
        if not lo < hi:
            raise ValueError(f"empty uniform range [{lo}, {hi}]")
        return self._gen.uniform(lo, hi, size=(rows, cols))

    def gaussian(self, rows, cols, mean=0.0, std=1.0):
        """Matrix of i.i.d. Normal(mean, std^2) draws; std = 0 gives a constant matrix."""
        if rows < 1 or cols < 1:
            raise ValueError(f"invalid shape ({rows}, {cols})")
        if std < 0:
            raise ValueError(f"negative std {std}")
        if std == 0:
            return np.full((rows, cols), float(mean))
        return self._gen.normal(mean, std, size=(rows, cols))

    def column_orders(self, rows, cols):
        """One independent random ordering of column indices per row."""
        return np.argsort(self._gen.random((rows, cols)), axis=1)

    def shuffled(self, n):
        """A random permutation of range(n)."""
        return self._gen.permutation(n)


_ACTIVATIONS = {
    "sigmoid": expit,
    "tanh": np.tanh,
    "relu": lambda m: np.maximum(m, 0.0),
    "linear": lambda m: m,
}

ACTIVATION_NAMES = tuple(sorted(_ACTIVATIONS))


def activate(name, m):
    """Apply the named activation elementwise; shape is preserved."""
    try:
        fn = _ACTIVATIONS[name]
    except KeyError:
        raise ValueError(
            f"unknown activation {name!r}; expected one of {ACTIVATION_NAMES}"
        ) from None
    return fn(np.asarray(m, dtype=np.float64))


def concat_cols(parts):
    """Concatenate matrices left to right; all parts must share a row count."""
    parts = list(parts)
    if not parts:
        raise ShapeError("concat_cols needs at least one matrix")
    rows = parts[0].shape[0]
    for i, part in enumerate(parts):
        if part.ndim != 2:
            raise ShapeError(f"part {i} is {part.ndim}-D, expected 2-D")
        if part.shape[0] != rows:
            raise ShapeError(f"part {i} has {part.shape[0]} rows, expected {rows}")
    if len(parts) == 1:
        return parts[0]
    return np.hstack(parts)
