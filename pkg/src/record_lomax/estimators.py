"""Maximum-likelihood estimates of theta and the plug-in density/CDF estimates."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import lomax
from .errors import DegenerateEstimateError, DomainError
from .lomax import LomaxParams
from .records import RecordSequence

__all__ = [
    "Source",
    "EstimateReport",
    "mle_from_sample",
    "mle_from_records",
    "pdf_hat",
    "cdf_hat",
    "log_likelihood_sample",
    "log_likelihood_second_derivative",
]


class Source(str, enum.Enum):
    SAMPLE = "sample"
    RECORDS = "records"


@dataclass(frozen=True)
class EstimateReport:
    theta_hat: float
    source: Source
    count: int

    @property
    def params(self) -> LomaxParams:
        return LomaxParams(self.theta_hat)

    def to_dict(self) -> dict:
        return {"theta_hat": self.theta_hat, "source": self.source.value, "count": self.count}


def _as_sample(sample: Sequence[float]) -> np.ndarray:
    x = np.asarray(sample, dtype=float).ravel()
    if x.size == 0:
        raise DomainError("sample is empty")
    if np.any(~np.isfinite(x)) or np.any(x < 0.0):
        raise DomainError("sample values must be finite and >= 0")
    return x


def mle_from_sample(sample: Sequence[float]) -> EstimateReport:
    """theta_hat = mean of ln(1 + x_i)."""
    x = _as_sample(sample)
    theta_hat = float(np.log1p(x).mean())
    if theta_hat <= 0.0:
        raise DegenerateEstimateError("all observations are zero; theta_hat = 0 is not admissible")
    return EstimateReport(theta_hat, Source.SAMPLE, int(x.size))


def mle_from_records(records: RecordSequence) -> EstimateReport:
    """theta_hat = ln(1 + R_m) / m, using only the last record."""
    theta_hat = float(np.log1p(records.last)) / records.m
    if not theta_hat > 0.0:
        raise DegenerateEstimateError("last record is zero; theta_hat = 0 is not admissible")
    return EstimateReport(theta_hat, Source.RECORDS, records.m)


def pdf_hat(x, records: RecordSequence):
    return lomax.pdf(x, mle_from_records(records).params)


def cdf_hat(x, records: RecordSequence):
    return lomax.cdf(x, mle_from_records(records).params)


def log_likelihood_sample(sample: Sequence[float], params: LomaxParams) -> float:
    """L(theta) = -n ln theta - (1/theta + 1) sum ln(1 + x_i)."""
    x = _as_sample(sample)
    s = float(np.log1p(x).sum())
    return -x.size * np.log(params.theta) - (1.0 / params.theta + 1.0) * s


def log_likelihood_second_derivative(sample: Sequence[float], params: LomaxParams) -> float:
    """d^2 L / d theta^2 = n / theta^2 - 2 sum ln(1 + x_i) / theta^3.

    At the MLE this equals -n^3 / (sum ln(1 + x_i))^2 < 0.
    """
    x = _as_sample(sample)
    s = float(np.log1p(x).sum())
    t = params.theta
    return x.size / t**2 - 2.0 * s / t**3
