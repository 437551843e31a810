"""Upper record values: extraction, exact simulation and joint log density."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError
from .lomax import LomaxParams

__all__ = ["RecordSequence", "extract_upper_records", "sample_records", "joint_log_density"]


@dataclass(frozen=True)
class RecordSequence:
    """Strictly increasing upper record values R_1 < ... < R_m."""

    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise DomainError("a record sequence needs at least one value")
        if any(not np.isfinite(v) for v in vals):
            raise DomainError("record values must be finite")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise DomainError("record values must be strictly increasing")
        object.__setattr__(self, "values", vals)

    @property
    def m(self) -> int:
        return len(self.values)

    @property
    def last(self) -> float:
        return self.values[-1]

    def __len__(self) -> int:
        return len(self.values)


def extract_upper_records(sequence: Sequence[float]) -> RecordSequence:
    """Values strictly exceeding every earlier value; the first value always counts.

    A repeat of the running maximum is not a new record.
    """
    seq = [float(v) for v in sequence]
    if not seq:
        raise DomainError("cannot extract records from an empty sequence")
    out = [seq[0]]
    for v in seq[1:]:
        if v > out[-1]:
            out.append(v)
    return RecordSequence(tuple(out))


def record_log_values(m: int, params: LomaxParams, rng, size: int | None = None) -> np.ndarray:
    """Partial sums S_1..S_m of Exponential(theta) increments, i.e. ln(1 + R_i).

    With ``size`` given, returns a ``(size, m)`` array of independent sequences.
    """
    shape = (m,) if size is None else (int(size), m)
    return np.cumsum(params.theta * rng.standard_exponential(shape), axis=-1)


def sample_records(m: int, params: LomaxParams, rng) -> RecordSequence:
    """The first ``m`` upper records of an i.i.d. Lomax(theta) sequence.

    Built from exponential spacings, R_i = exp(S_i) - 1, which has the exact
    joint law of Lomax upper records; ln(1 + R_m) ~ Gamma(m, theta).
    """
    if int(m) != m or m < 1:
        raise DomainError("m must be a positive integer")
    while True:
        r = np.expm1(record_log_values(int(m), params, rng))
        # float rounding can collapse two huge neighbouring records; redraw then
        if np.all(np.diff(r) > 0.0):
            return RecordSequence(tuple(r.tolist()))


def joint_log_density(records: RecordSequence, params: LomaxParams) -> float:
    """ln f(r_1..r_m) = -m ln theta - ln(1 + r_m)/theta - sum ln(1 + r_i)."""
    r = np.asarray(records.values)
    if np.any(r < 0.0):
        raise DomainError("Lomax record values must be >= 0")
    logs = np.log1p(r)
    return float(-records.m * np.log(params.theta) - logs[-1] / params.theta - logs.sum())
