"""Lomax distribution with a single shape parameter theta.

    f(x; theta) = (1/theta) (1 + x)^-(1/theta + 1),   F(x; theta) = 1 - (1 + x)^(-1/theta)

for x >= 0 and theta > 0.  Powers of (1 + x) are evaluated as
``exp(-log1p(x) / theta)`` so that small x keeps full precision.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = ["LomaxParams", "pdf", "logpdf", "cdf", "sf", "quantile", "sample", "log1p_transform"]


@dataclass(frozen=True)
class LomaxParams:
    theta: float

    def __post_init__(self):
        theta = float(self.theta)
        # theta = 0 leaves the density undefined, so only theta > 0 is admitted.
        if not np.isfinite(theta) or theta <= 0.0:
            raise DomainError(f"theta must be a finite positive number, got {self.theta!r}")
        object.__setattr__(self, "theta", theta)


def _check_x(x):
    arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0.0):
        raise DomainError("x must be >= 0")
    return arr


def _out(arr, like):
    return float(arr) if np.ndim(like) == 0 else arr


def pdf(x, params: LomaxParams):
    """Density at ``x`` (scalar or array)."""
    arr = _check_x(x)
    a = np.log1p(arr)
    inv = 1.0 / params.theta
    return _out(inv * np.exp(-(inv + 1.0) * a), x)


def logpdf(x, params: LomaxParams):
    arr = _check_x(x)
    inv = 1.0 / params.theta
    return _out(-np.log(params.theta) - (inv + 1.0) * np.log1p(arr), x)


def cdf(x, params: LomaxParams):
    """Distribution function at ``x`` (scalar or array)."""
    arr = _check_x(x)
    return _out(-np.expm1(-np.log1p(arr) / params.theta), x)


def sf(x, params: LomaxParams):
    arr = _check_x(x)
    return _out(np.exp(-np.log1p(arr) / params.theta), x)


def quantile(p, params: LomaxParams):
    """Inverse of :func:`cdf`: ``(1 - p)^(-theta) - 1`` for ``0 <= p < 1``."""
    arr = np.asarray(p, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0.0) or np.any(arr >= 1.0):
        raise DomainError("p must lie in [0, 1)")
    return _out(np.expm1(-params.theta * np.log1p(-arr)), p)


def sample(n: int, params: LomaxParams, rng) -> np.ndarray:
    """Draw ``n`` variates by inverse transform.

    ``rng`` is anything with a numpy-style ``random(size)`` method returning
    uniforms on [0, 1); each draw is ``quantile(U)``.
    """
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")
    u = np.asarray(rng.random(int(n)), dtype=float)
    return np.asarray(quantile(u, params), dtype=float).reshape(int(n))


def log1p_transform(x) -> np.ndarray:
    """``ln(1 + X)``; Exponential(theta) distributed when X is Lomax(theta)."""
    return np.log1p(_check_x(x))
