"""Replication engine for the record and sample estimators.

Replications are grouped into fixed-size blocks.  Block ``b`` of a run always
draws from ``rng.stream(master_seed, tag, count, b)`` and blocks are
concatenated in index order, so a run is bitwise reproducible for a given
seed whatever the number of worker processes.
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import stats

from . import rng as rngmod
from .errors import DomainError
from .lomax import LomaxParams
from .records import record_log_values

__all__ = [
    "BLOCK_SIZE",
    "Estimator",
    "TRANSFORMS",
    "McConfig",
    "McSummary",
    "PluginMoments",
    "ConvergenceRow",
    "KsResult",
    "summarize",
    "simulate_theta_hat",
    "mc_estimator_mse",
    "mc_plugin_moments",
    "mc_convergence_scan",
    "theta_hat_exceedance_exact",
    "distributional_check",
    "estimator_two_sample",
    "ks_critical_value",
    "ks_two_sample_critical_value",
]

BLOCK_SIZE = 8192
KS_ALPHA = 0.01


class Estimator(str, enum.Enum):
    SAMPLE = "sample"
    RECORDS = "records"


TRANSFORMS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "identity": lambda t: t,
    "reciprocal": lambda t: 1.0 / t,
    "log": np.log,
}


@dataclass(frozen=True)
class McConfig:
    master_seed: int
    replications: int
    theta: LomaxParams
    m_or_n: int
    workers: int = 1
    x_grid: tuple[float, ...] = ()
    epsilons: tuple[float, ...] = ()

    def __post_init__(self):
        if self.replications < 1:
            raise DomainError("replications must be >= 1")
        if self.workers < 1:
            raise DomainError("workers must be >= 1")
        if self.m_or_n < 1:
            raise DomainError("m_or_n must be >= 1")
        grid = tuple(float(x) for x in self.x_grid)
        if any(b < a for a, b in zip(grid, grid[1:])) or any(x < 0 for x in grid):
            raise DomainError("x_grid must be sorted ascending and non-negative")
        object.__setattr__(self, "x_grid", grid)
        object.__setattr__(self, "epsilons", tuple(float(e) for e in self.epsilons))

    def with_count(self, count: int) -> "McConfig":
        return McConfig(self.master_seed, self.replications, self.theta, count, self.workers, self.x_grid, self.epsilons)


@dataclass(frozen=True)
class McSummary:
    target: str
    truth: float
    replications: int
    failures: int
    mean: float
    variance: float
    se_mean: float
    mse: float
    se_mse: float
    epsilon_exceedance: dict[float, float] = field(default_factory=dict)
    exceedance_se: dict[float, float] = field(default_factory=dict)

    def mean_interval(self, k: float = 3.0) -> tuple[float, float]:
        return self.mean - k * self.se_mean, self.mean + k * self.se_mean

    def mse_interval(self, k: float = 3.0) -> tuple[float, float]:
        return self.mse - k * self.se_mse, self.mse + k * self.se_mse

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "truth": self.truth,
            "replications": self.replications,
            "failures": self.failures,
            "mean": self.mean,
            "variance": self.variance,
            "se_mean": self.se_mean,
            "mse": self.mse,
            "se_mse": self.se_mse,
            "epsilon_exceedance": {repr(k): v for k, v in self.epsilon_exceedance.items()},
            "exceedance_se": {repr(k): v for k, v in self.exceedance_se.items()},
        }


def summarize(values, truth: float, target: str = "", epsilons: Sequence[float] = (), failures: int = 0) -> McSummary:
    v = np.asarray(values, dtype=float)
    n = v.size
    if n == 0:
        raise DomainError("no successful replications to summarize")
    mean = float(v.mean())
    var = float(v.var(ddof=1)) if n > 1 else 0.0
    sq = (v - truth) ** 2
    mse = float(sq.mean())
    se_mse = float(sq.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    dev = np.abs(v - truth)
    exc, exc_se = {}, {}
    for eps in epsilons:
        p = float(np.count_nonzero(dev >= eps)) / n
        exc[float(eps)] = p
        exc_se[float(eps)] = math.sqrt(p * (1.0 - p) / n)
    return McSummary(target, float(truth), n, int(failures), mean, var, math.sqrt(var / n), mse, se_mse, exc, exc_se)


# -- block workers (top level so process pools can pickle them) --------------

def _theta_hat_records_block(gen: np.random.Generator, size: int, m: int, theta: float) -> np.ndarray:
    logs = record_log_values(m, LomaxParams(theta), gen, size=size)
    return logs[:, -1] / m


def _theta_hat_sample_block(gen: np.random.Generator, size: int, n: int, theta: float) -> np.ndarray:
    u = gen.random((size, n))
    # Lomax draws by inverse transform, then the MLE mean of ln(1 + X)
    x = np.expm1(-theta * np.log1p(-u))
    return np.log1p(x).mean(axis=1)


def _lomax_block(gen: np.random.Generator, size: int, _count: int, theta: float) -> np.ndarray:
    u = gen.random(size)
    return np.expm1(-theta * np.log1p(-u))


def _sample_log_sum_block(gen: np.random.Generator, size: int, n: int, theta: float) -> np.ndarray:
    return _theta_hat_sample_block(gen, size, n, theta) * n


def _record_log_block(gen: np.random.Generator, size: int, m: int, theta: float) -> np.ndarray:
    return record_log_values(m, LomaxParams(theta), gen, size=size)[:, -1]


_BLOCK_FNS = {
    "theta_records": (rngmod.TAG_RECORDS, _theta_hat_records_block),
    "theta_sample": (rngmod.TAG_SAMPLE, _theta_hat_sample_block),
    "record_log": (rngmod.TAG_RECORDS, _record_log_block),
    "sample_log_sum": (rngmod.TAG_SAMPLE, _sample_log_sum_block),
    "lomax": (rngmod.TAG_SINGLE, _lomax_block),
}


def _run_block(task):
    kind, seed, count, theta, block, size = task
    tag, fn = _BLOCK_FNS[kind]
    return fn(rngmod.stream(seed, tag, count, block), size, count, theta)


def _run(kind: str, config: McConfig, count: int) -> np.ndarray:
    reps = config.replications
    tasks = [
        (kind, config.master_seed, count, config.theta.theta, b, min(BLOCK_SIZE, reps - start))
        for b, start in enumerate(range(0, reps, BLOCK_SIZE))
    ]
    if config.workers == 1 or len(tasks) == 1:
        parts = [_run_block(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            parts = list(pool.map(_run_block, tasks))
    return np.concatenate(parts)


def simulate_theta_hat(config: McConfig, estimator: Estimator | str, count: int | None = None) -> np.ndarray:
    """theta_hat for each replication; record sets of size m or samples of size n."""
    estimator = Estimator(estimator)
    kind = "theta_records" if estimator is Estimator.RECORDS else "theta_sample"
    return _run(kind, config, config.m_or_n if count is None else count)


def _split_failures(values: np.ndarray) -> tuple[np.ndarray, int]:
    ok = np.isfinite(values) & (values > 0.0)
    return values[ok], int(values.size - np.count_nonzero(ok))


def mc_estimator_mse(config: McConfig, estimator: Estimator | str, g: str = "identity") -> McSummary:
    """MSE of g(theta_hat) against g(theta) over ``config.replications`` datasets."""
    if g not in TRANSFORMS:
        raise ValueError(f"unknown transform {g!r}; expected one of {sorted(TRANSFORMS)}")
    estimator = Estimator(estimator)
    theta_hat, failures = _split_failures(simulate_theta_hat(config, estimator))
    fn = TRANSFORMS[g]
    truth = float(fn(np.float64(config.theta.theta)))
    return summarize(fn(theta_hat), truth, f"{g}(theta_hat_{estimator.value})", config.epsilons, failures)


@dataclass(frozen=True)
class PluginMoments:
    x: float
    pdf_hat: McSummary
    cdf_hat: McSummary


def _plugin_values(theta_hat: np.ndarray, x: float) -> tuple[np.ndarray, np.ndarray]:
    a = math.log1p(x)
    inv = 1.0 / theta_hat
    return inv * np.exp(-(inv + 1.0) * a), -np.expm1(-inv * a)


def mc_plugin_moments(config: McConfig) -> list[PluginMoments]:
    """MC mean and MSE of the plug-in f_hat(x), F_hat(x) from m records, per grid x."""
    m = config.m_or_n
    theta = config.theta.theta
    theta_hat, failures = _split_failures(simulate_theta_hat(config, Estimator.RECORDS))
    out = []
    for x in config.x_grid:
        f_vals, F_vals = _plugin_values(theta_hat, x)
        a = math.log1p(x)
        f_true = math.exp(-(1.0 / theta + 1.0) * a) / theta
        F_true = -math.expm1(-a / theta)
        out.append(
            PluginMoments(
                x,
                summarize(f_vals, f_true, f"pdf_hat(x={x!r}, m={m})", config.epsilons, failures),
                summarize(F_vals, F_true, f"cdf_hat(x={x!r}, m={m})", config.epsilons, failures),
            )
        )
    return out


@dataclass(frozen=True)
class ConvergenceRow:
    m: int
    epsilon: float
    replications: int
    theta_exceedance: float
    theta_se: float
    pdf_exceedance: float
    pdf_se: float
    cdf_exceedance: float
    cdf_se: float
    theta_exact: float


def theta_hat_exceedance_exact(m: int, theta: float, epsilon: float) -> float:
    """P(|T/m - theta| >= epsilon) for T ~ Gamma(m, theta)."""
    lower = stats.gamma.cdf(m * (theta - epsilon), m, scale=theta) if epsilon < theta else 0.0
    return float(lower + stats.gamma.sf(m * (theta + epsilon), m, scale=theta))


def mc_convergence_scan(config: McConfig, m_list: Sequence[int], epsilon: float, x: float) -> list[ConvergenceRow]:
    """Empirical P(|est - truth| >= epsilon) for theta_hat, f_hat(x), F_hat(x) per m."""
    if not m_list:
        raise DomainError("m_list must be non-empty")
    if any(b <= a for a, b in zip(m_list, m_list[1:])):
        raise DomainError("m_list must be strictly increasing")
    if not epsilon > 0:
        raise DomainError("epsilon must be positive")
    theta = config.theta.theta
    a = math.log1p(x)
    f_true = math.exp(-(1.0 / theta + 1.0) * a) / theta
    F_true = -math.expm1(-a / theta)
    rows = []
    for m in m_list:
        theta_hat, _ = _split_failures(simulate_theta_hat(config, Estimator.RECORDS, int(m)))
        f_vals, F_vals = _plugin_values(theta_hat, x)
        s_t = summarize(theta_hat, theta, epsilons=[epsilon])
        s_f = summarize(f_vals, f_true, epsilons=[epsilon])
        s_F = summarize(F_vals, F_true, epsilons=[epsilon])
        rows.append(
            ConvergenceRow(
                int(m),
                float(epsilon),
                s_t.replications,
                s_t.epsilon_exceedance[epsilon],
                s_t.exceedance_se[epsilon],
                s_f.epsilon_exceedance[epsilon],
                s_f.exceedance_se[epsilon],
                s_F.epsilon_exceedance[epsilon],
                s_F.exceedance_se[epsilon],
                theta_hat_exceedance_exact(int(m), theta, epsilon),
            )
        )
    return rows


# -- Kolmogorov-Smirnov checks -------------------------------------------------

@dataclass(frozen=True)
class KsResult:
    name: str
    statistic: float
    critical_value: float
    n: int
    passed: bool

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "statistic": self.statistic,
            "critical_value": self.critical_value,
            "n": self.n,
            "passed": self.passed,
        }


def ks_critical_value(n: int, alpha: float = KS_ALPHA) -> float:
    """Asymptotic one-sample critical value K_(1-alpha) / sqrt(n)."""
    return float(stats.kstwobign.ppf(1.0 - alpha) / math.sqrt(n))


def ks_two_sample_critical_value(n1: int, n2: int, alpha: float = KS_ALPHA) -> float:
    return float(stats.kstwobign.ppf(1.0 - alpha) * math.sqrt((n1 + n2) / (n1 * n2)))


def ks_one_sample(name: str, values, cdf: Callable, alpha: float = KS_ALPHA) -> KsResult:
    v = np.asarray(values, dtype=float)
    d = float(stats.ks_1samp(v, cdf).statistic)
    crit = ks_critical_value(v.size, alpha)
    return KsResult(name, d, crit, int(v.size), d <= crit)


def ks_two_sample(name: str, a, b, alpha: float = KS_ALPHA) -> KsResult:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d = float(stats.ks_2samp(a, b).statistic)
    crit = ks_two_sample_critical_value(a.size, b.size, alpha)
    return KsResult(name, d, crit, int(min(a.size, b.size)), d <= crit)


def distributional_check(config: McConfig) -> list[KsResult]:
    """KS tests of ln(1+R_m) ~ Gamma(m, theta), sum ln(1+X_i) ~ Gamma(n, theta), ln(1+X) ~ Exp(theta)."""
    k = config.m_or_n
    theta = config.theta.theta
    rec = _run("record_log", config, k)
    smp = _run("sample_log_sum", config, k)
    single = np.log1p(_run("lomax", config, 1))
    return [
        ks_one_sample(f"ln(1+R_{k}) ~ Gamma({k}, {theta!r})", rec, stats.gamma(k, scale=theta).cdf),
        ks_one_sample(f"sum ln(1+X_i), n={k} ~ Gamma({k}, {theta!r})", smp, stats.gamma(k, scale=theta).cdf),
        ks_one_sample(f"ln(1+X) ~ Exp({theta!r})", single, stats.expon(scale=theta).cdf),
    ]


def estimator_two_sample(config: McConfig) -> KsResult:
    """Two-sample KS between record-based and sample-based theta_hat (m = n)."""
    a, _ = _split_failures(simulate_theta_hat(config, Estimator.RECORDS))
    b, _ = _split_failures(simulate_theta_hat(config, Estimator.SAMPLE))
    return ks_two_sample(f"theta_hat_records vs theta_hat_sample (count={config.m_or_n})", a, b)
