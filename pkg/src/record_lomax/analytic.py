"""Finite gamma-series moments of the record-based plug-in estimators.

With T ~ Gamma(m, theta) standing in for ln(1 + R_m), A = ln(1 + x) and
z = -m A / theta, the estimators' moments are written through the sums

    S(a, z) = sum_{i=0}^{a-1} Gamma(a - i) / (Gamma(m) Gamma(i + 1)) z^i

giving

    E[f_hat]   = m / (theta (1 + x)) * S(m - 1, z)
    E[F_hat]   = 1 - S(m, z)
    E[f_hat^2] = (m / (theta (1 + x)))^2 * S(m - 2, 2 z)
    E[F_hat^2] = 1 - 2 S(m, z) + S(m, 2 z)

Each sum stops at the last index whose gamma argument is >= 1.  These are the
leading (singular) part of the exact Bessel-type moments; they match the
defining integrals exactly at x = 0 and increasingly well as m grows, but
not at small m with x > 0.  :func:`quadrature_oracle` evaluates the
integrals themselves and is kept independent of the series code.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import integrate

from . import lomax
from .errors import DomainError, QuadratureError
from .lomax import LomaxParams
from .summation import dd_add, dd_div_d, dd_mul_d, neumaier_sum

__all__ = [
    "SeriesResult",
    "CANCELLATION_RATIO",
    "gamma_series",
    "expected_pdf_hat",
    "expected_cdf_hat",
    "second_moment_pdf_hat",
    "second_moment_cdf_hat",
    "variance_pdf_hat",
    "mse_pdf_hat",
    "mse_cdf_hat",
    "gamma_ratio",
    "asymptotic_identity_gap",
    "pdf_hat_upper_bound_check",
    "BoundScan",
    "pdf_hat_bound_scan",
    "quadrature_oracle",
    "INTEGRANDS",
]

CANCELLATION_RATIO = 1e-8
_LOG_MAX = 700.0


@dataclass(frozen=True)
class SeriesResult:
    value: float
    terms: int
    max_term_magnitude: float
    cancellation_flag: bool
    extended_precision: bool = False

    def __float__(self) -> float:
        return self.value

    def scaled(self, factor: float) -> "SeriesResult":
        return SeriesResult(
            self.value * factor,
            self.terms,
            self.max_term_magnitude * abs(factor),
            self.cancellation_flag,
            self.extended_precision,
        )


def _flag(value: float, max_term: float) -> bool:
    if not math.isfinite(value) or not math.isfinite(max_term):
        return True
    return abs(value) < CANCELLATION_RATIO * max_term


def _series_dd(a: int, m: int, z: float) -> float:
    # Term recurrence t_{i+1} = t_i * z / ((i + 1) (a - i - 1)) carried in double-double.
    t = (1.0, 0.0)
    for k in range(a, m):
        t = dd_div_d(t, float(k))
    acc = t
    for i in range(a - 1):
        t = dd_mul_d(t, z)
        t = dd_div_d(t, float((i + 1) * (a - i - 1)))
        acc = dd_add(acc, t)
    return acc[0] + acc[1]


def gamma_series(a: int, m: int, z: float) -> SeriesResult:
    """S(a, z) = sum_{i=0}^{a-1} Gamma(a-i) / (Gamma(m) Gamma(i+1)) z^i.

    Terms are formed as sign * exp(log magnitude) and added with Neumaier
    summation.  When the sum is below ``CANCELLATION_RATIO`` times the largest
    term it is recomputed in double-double; the flag is then set if the
    cancellation ratio still holds for the final value.
    """
    if a < 1 or m < a:
        raise DomainError(f"series needs 1 <= a <= m, got a={a}, m={m}")
    z = float(z)
    if not math.isfinite(z):
        raise DomainError("series argument must be finite")
    lgm = math.lgamma(m)
    if z == 0.0:
        value = math.exp(math.lgamma(a) - lgm)
        return SeriesResult(value, a, value, False)
    logz = math.log(abs(z))
    logs = [math.lgamma(a - i) - lgm - math.lgamma(i + 1) + i * logz for i in range(a)]
    top = max(logs)
    if top > _LOG_MAX:
        return SeriesResult(math.nan, a, math.inf, True)
    neg = z < 0.0
    terms = [(-1.0 if (neg and i % 2) else 1.0) * math.exp(lg) for i, lg in enumerate(logs)]
    max_term = math.exp(top)
    value = neumaier_sum(terms)
    if not _flag(value, max_term):
        return SeriesResult(value, a, max_term, False)
    value = _series_dd(a, m, z)
    return SeriesResult(value, a, max_term, _flag(value, max_term), True)


def _check(x: float, params: LomaxParams, m: int, min_m: int) -> float:
    if int(m) != m or m < min_m:
        raise DomainError(f"m must be an integer >= {min_m}, got {m}")
    x = float(x)
    if not x >= 0.0 or not math.isfinite(x):
        raise DomainError("x must be finite and >= 0")
    return -m * math.log1p(x) / params.theta


def expected_pdf_hat(x: float, params: LomaxParams, m: int) -> SeriesResult:
    """E[f_hat(x)] from m records, m >= 2."""
    z = _check(x, params, m, 2)
    pref = m / (params.theta * (1.0 + x))
    return gamma_series(m - 1, m, z).scaled(pref)


def _one_minus(s: SeriesResult) -> SeriesResult:
    value = 1.0 - s.value
    max_term = max(1.0, s.max_term_magnitude)
    return SeriesResult(value, s.terms, max_term, s.cancellation_flag or _flag(value, max_term), s.extended_precision)


def expected_cdf_hat(x: float, params: LomaxParams, m: int) -> SeriesResult:
    """E[F_hat(x)] from m records, m >= 1."""
    z = _check(x, params, m, 1)
    if z == 0.0:
        return SeriesResult(0.0, m, 1.0, False)
    return _one_minus(gamma_series(m, m, z))


def second_moment_pdf_hat(x: float, params: LomaxParams, m: int) -> SeriesResult:
    """E[f_hat(x)^2] from m records, m >= 3."""
    z = _check(x, params, m, 3)
    pref = m / (params.theta * (1.0 + x))
    return gamma_series(m - 2, m, 2.0 * z).scaled(pref * pref)


def _combine(parts: Sequence[tuple[float, SeriesResult]], extra: float = 0.0) -> SeriesResult:
    # value = sum(coef * part) + extra; the flag tests cancellation across parts too.
    contributions = [c * p.value for c, p in parts] + [extra]
    value = neumaier_sum(contributions)
    max_term = max(
        max(abs(c) * p.max_term_magnitude for c, p in parts),
        max(abs(v) for v in contributions),
    )
    flag = any(p.cancellation_flag for _, p in parts) or not math.isfinite(value)
    return SeriesResult(
        value,
        sum(p.terms for _, p in parts),
        max_term,
        flag,
        any(p.extended_precision for _, p in parts),
    )


def second_moment_cdf_hat(x: float, params: LomaxParams, m: int) -> SeriesResult:
    """E[F_hat(x)^2] = 1 - 2 S(m, z) + S(m, 2z), m >= 1."""
    z = _check(x, params, m, 1)
    if z == 0.0:
        return SeriesResult(0.0, 2 * m, 1.0, False)
    single = gamma_series(m, m, z)
    double = gamma_series(m, m, 2.0 * z)
    return _combine([(-2.0, single), (1.0, double)], extra=1.0)


def variance_pdf_hat(x: float, params: LomaxParams, m: int) -> SeriesResult:
    """E[f_hat^2] - E[f_hat]^2, m >= 3."""
    second = second_moment_pdf_hat(x, params, m)
    first = expected_pdf_hat(x, params, m)
    return _combine([(1.0, second), (-first.value, first)])


def mse_pdf_hat(x: float, params: LomaxParams, m: int) -> SeriesResult:
    """MSE(f_hat(x)) = E[f_hat^2] - 2 f E[f_hat] + f^2, m >= 3."""
    second = second_moment_pdf_hat(x, params, m)
    first = expected_pdf_hat(x, params, m)
    f = lomax.pdf(x, params)
    return _combine([(1.0, second), (-2.0 * f, first)], extra=f * f)


def mse_cdf_hat(x: float, params: LomaxParams, m: int) -> SeriesResult:
    """MSE(F_hat(x)) = E[F_hat^2] - 2 F E[F_hat] + F^2, m >= 1."""
    second = second_moment_cdf_hat(x, params, m)
    first = expected_cdf_hat(x, params, m)
    F = lomax.cdf(x, params)
    return _combine([(1.0, second), (-2.0 * F, first)], extra=F * F)


def gamma_ratio(n: int, i: int) -> float:
    """Gamma(n - i - 1) n^(i+1) / Gamma(n); tends to 1 as n grows (i fixed)."""
    if int(n) != n or int(i) != i or i < 0 or n - i - 1 < 1:
        raise DomainError(f"gamma_ratio needs integers with n - i - 1 >= 1, got n={n}, i={i}")
    n, i = int(n), int(i)
    if i < 64:
        # = prod_{k=n-i-1}^{n-1} n / k; summing log1p avoids differencing two huge lgammas
        log_ratio = -math.fsum(math.log1p((k - n) / n) for k in range(n - i - 1, n))
    else:
        log_ratio = math.lgamma(n - i - 1) + (i + 1) * math.log(n) - math.lgamma(n)
    return math.exp(log_ratio)


def asymptotic_identity_gap(x: float, params: LomaxParams, m: int) -> float:
    """(1 - E[F_hat]) / E[f_hat] - theta (1 + x); vanishes as m grows."""
    if m < 3:
        raise DomainError("m must be >= 3")
    ef = expected_pdf_hat(x, params, m)
    eF = expected_cdf_hat(x, params, m)
    if not ef.value > 0.0:
        raise DomainError(f"E[f_hat] = {ef.value!r} is not positive at x={x}, m={m}")
    return (1.0 - eF.value) / ef.value - params.theta * (1.0 + x)


def pdf_hat_upper_bound_check(x_grid: Iterable[float], params: LomaxParams, m: int) -> bool:
    """True iff E[f_hat(x)] < 1/theta at every grid point."""
    bound = 1.0 / params.theta
    return all(expected_pdf_hat(x, params, m).value < bound for x in x_grid)


@dataclass(frozen=True)
class BoundScan:
    holds: dict[int, bool]
    onset: int | None  # smallest tested m from which the bound holds for every larger tested m

    @property
    def monotone(self) -> bool:
        seen = False
        for m in sorted(self.holds):
            if seen and not self.holds[m]:
                return False
            seen = seen or self.holds[m]
        return True


def pdf_hat_bound_scan(x_grid: Sequence[float], params: LomaxParams, m_values: Iterable[int]) -> BoundScan:
    holds = {int(m): pdf_hat_upper_bound_check(x_grid, params, int(m)) for m in m_values}
    onset = None
    for m in sorted(holds, reverse=True):
        if not holds[m]:
            break
        onset = m
    return BoundScan(holds, onset)


def _h_pdf(w, a):
    # w = m / t
    return np.log(w) - (w + 1.0) * a


INTEGRANDS = ("pdf_hat", "pdf_hat_sq", "cdf_hat", "cdf_hat_sq")


def quadrature_oracle(integrand: str, x: float, params: LomaxParams, m: int, rtol: float = 1e-10) -> float:
    """E[h(T)] for T ~ Gamma(m, theta) by adaptive quadrature of the defining integral.

    ``integrand`` selects h among f_hat, f_hat^2, F_hat, F_hat^2 written as
    functions of T.  With t = theta z and z = m s / (1 - s) the half line maps
    onto (0, 1) with the Gamma bulk near s = 1/2.
    """
    if integrand not in INTEGRANDS:
        raise ValueError(f"unknown integrand {integrand!r}; expected one of {INTEGRANDS}")
    if int(m) != m or m < 1:
        raise DomainError("m must be a positive integer")
    if not float(x) >= 0.0:
        raise DomainError("x must be >= 0")
    theta = params.theta
    a = math.log1p(x)
    if integrand.startswith("cdf") and a == 0.0:
        return 0.0
    c = float(m)
    lgm = math.lgamma(m)

    def fn(s: float) -> float:
        if s <= 0.0 or s >= 1.0:
            return 0.0
        z = c * s / (1.0 - s)
        log_jac = math.log(c) - 2.0 * math.log1p(-s)
        log_dens = (m - 1) * math.log(z) - z - lgm + log_jac
        w = m / (theta * z)
        if integrand == "pdf_hat":
            return math.exp(log_dens + math.log(w) - (w + 1.0) * a)
        if integrand == "pdf_hat_sq":
            return math.exp(log_dens + 2.0 * (math.log(w) - (w + 1.0) * a))
        F = -math.expm1(-w * a)
        if integrand == "cdf_hat":
            return math.exp(log_dens) * F
        return math.exp(log_dens) * F * F

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(fn, 0.0, 1.0, epsabs=0.0, epsrel=rtol, limit=1000, points=[0.5], full_output=1)
    value, err = out[0], out[1]
    if len(out) > 3 and abs(err) > 10 * rtol * abs(value):
        raise QuadratureError(f"quadrature did not converge: {out[3]}")
    return float(value)
