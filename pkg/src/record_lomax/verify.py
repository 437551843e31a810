"""Acceptance criteria as runnable checks.

Both ``record-lomax verify`` and ``tests/test_acceptance.py`` call
:func:`run_suite`; each criterion returns a :class:`CriterionResult` carrying
its measured values so the report can be compared byte for byte.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import analytic, lomax
from .lomax import LomaxParams
from .montecarlo import (
    TRANSFORMS,
    McConfig,
    mc_convergence_scan,
    mc_estimator_mse,
    mc_plugin_moments,
    estimator_two_sample,
)

__all__ = ["DEFAULT_SEED", "CriterionResult", "SUITES", "CRITERIA", "run_suite", "run_criterion", "report_json", "report_text", "criterion_seed"]

DEFAULT_SEED = 20201016

# Replication counts per suite.  "full" uses the stated counts; "fast" trims
# the two largest Monte Carlo runs (tolerances are in SE units either way).
SUITES: dict[str, dict[str, int]] = {
    "full": {"c1_reps": 100_000, "c2_reps": 10_000, "c4_reps": 1_000_000, "c8_reps": 10_000, "c10_reps": 20_000},
    "fast": {"c1_reps": 20_000, "c2_reps": 10_000, "c4_reps": 100_000, "c8_reps": 10_000, "c10_reps": 5_000},
}

ORACLE_GRID_X = (0.0, 0.1, 0.5, 1.0, 2.0)
ORACLE_GRID_THETA = (0.5, 1.0, 2.0)
ORACLE_GRID_M = (3, 5, 8, 12, 20)
ORACLE_RTOL = 1e-8


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    measured: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] C{self.number:<2d} {self.name}: {self.detail}"

    def to_dict(self) -> dict:
        return {"number": self.number, "name": self.name, "passed": self.passed, "detail": self.detail, "measured": _jsonable(self.measured)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    return obj


def criterion_seed(master_seed: int, number: int) -> int:
    return int(np.random.SeedSequence(master_seed, spawn_key=(number,)).generate_state(1, dtype=np.uint64)[0] >> 1)


# -- criteria -------------------------------------------------------------------

def c1_mse_equality(seed: int, scale: dict, workers: int) -> CriterionResult:
    cfg = McConfig(criterion_seed(seed, 1), scale["c1_reps"], LomaxParams(1.0), 5, workers=workers)
    rows, ok = {}, True
    for g in TRANSFORMS:
        rec = mc_estimator_mse(cfg, "records", g)
        smp = mc_estimator_mse(cfg, "sample", g)
        lo_r, hi_r = rec.mse_interval(3.0)
        lo_s, hi_s = smp.mse_interval(3.0)
        overlap = lo_r <= hi_s and lo_s <= hi_r
        ok &= overlap
        rows[g] = {"records_mse": rec.mse, "records_se": rec.se_mse, "sample_mse": smp.mse, "sample_se": smp.se_mse, "overlap": overlap}
    detail = "; ".join(f"{g}: {r['records_mse']:.5f}+-{3*r['records_se']:.5f} vs {r['sample_mse']:.5f}+-{3*r['sample_se']:.5f}" for g, r in rows.items())
    return CriterionResult(1, "record-sample-mse-equality", ok, detail, {"replications": cfg.replications, "by_transform": rows})


def c2_distributional_equality(seed: int, scale: dict, workers: int) -> CriterionResult:
    cfg = McConfig(criterion_seed(seed, 2), scale["c2_reps"], LomaxParams(1.0), 5, workers=workers)
    ks = estimator_two_sample(cfg)
    detail = f"KS D={ks.statistic:.5f} vs 1% critical {ks.critical_value:.5f} (n={ks.n} each)"
    return CriterionResult(2, "record-sample-distributional-equality", ks.passed, detail, ks.to_dict())


_SERIES_OPS: dict[str, Callable] = {
    "pdf_hat": analytic.expected_pdf_hat,
    "cdf_hat": analytic.expected_cdf_hat,
    "pdf_hat_sq": analytic.second_moment_pdf_hat,
}


def c3_series_vs_quadrature(seed: int, scale: dict, workers: int) -> CriterionResult:
    total = flagged = 0
    failures = []
    worst = (0.0, None)
    for name, op in _SERIES_OPS.items():
        for x in ORACLE_GRID_X:
            for th in ORACLE_GRID_THETA:
                params = LomaxParams(th)
                for m in ORACLE_GRID_M:
                    total += 1
                    s = op(x, params, m)
                    q = analytic.quadrature_oracle(name, x, params, m)
                    if s.cancellation_flag:
                        flagged += 1
                        continue
                    err = abs(s.value - q) / abs(q) if q != 0.0 else abs(s.value)
                    if err > worst[0]:
                        worst = (err, [name, x, th, m, s.value, q])
                    if not err <= ORACLE_RTOL:
                        failures.append([name, x, th, m, s.value, q, err])
    frac = flagged / total
    ok = not failures and frac < 0.10
    detail = f"{total - flagged - len(failures)}/{total - flagged} unflagged points within {ORACLE_RTOL:g} rel; flagged {flagged}/{total}; worst rel err {worst[0]:.3g}"
    if worst[1] is not None:
        name, x, th, m, sv, qv = worst[1]
        detail += f" at {name}(x={x}, theta={th}, m={m}): series {sv:.6g} vs quadrature {qv:.6g}"
    return CriterionResult(
        3, "series-vs-quadrature", ok, detail,
        {"points": total, "flagged": flagged, "flagged_fraction": frac, "failing": len(failures), "worst_rel_err": worst[0], "failures": failures},
    )


def c4_series_vs_mc(seed: int, scale: dict, workers: int) -> CriterionResult:
    reps = scale["c4_reps"]
    checks = {}
    ok = True
    for label, (x, m, mean_op, mse_op, attr, quad_name) in {
        "pdf": (0.5, 8, analytic.expected_pdf_hat, analytic.mse_pdf_hat, "pdf_hat", "pdf_hat"),
        "cdf": (1.0, 6, analytic.expected_cdf_hat, analytic.mse_cdf_hat, "cdf_hat", "cdf_hat"),
    }.items():
        params = LomaxParams(1.0)
        cfg = McConfig(criterion_seed(seed, 4), reps, params, m, workers=workers, x_grid=(x,))
        summary = getattr(mc_plugin_moments(cfg)[0], attr)
        series_mean = mean_op(x, params, m).value
        series_mse = mse_op(x, params, m).value
        quad_mean = analytic.quadrature_oracle(quad_name, x, params, m)
        z_mean = (summary.mean - series_mean) / summary.se_mean
        z_mse = (summary.mse - series_mse) / summary.se_mse
        pass_mean = abs(z_mean) <= 3.0
        pass_mse = abs(z_mse) <= 3.0
        ok &= pass_mean and pass_mse
        checks[label] = {
            "x": x, "m": m, "mc_mean": summary.mean, "se_mean": summary.se_mean, "series_mean": series_mean,
            "z_mean": z_mean, "mc_mse": summary.mse, "se_mse": summary.se_mse, "series_mse": series_mse, "z_mse": z_mse,
            "quadrature_mean": quad_mean, "z_mean_vs_quadrature": (summary.mean - quad_mean) / summary.se_mean,
        }
    detail = "; ".join(
        f"{k}(x={c['x']}, m={c['m']}): mean z={c['z_mean']:+.2f}, MSE z={c['z_mse']:+.2f} (MC vs quadrature mean z={c['z_mean_vs_quadrature']:+.2f})"
        for k, c in checks.items()
    )
    return CriterionResult(4, "series-vs-monte-carlo", ok, detail, {"replications": reps, "checks": checks})


def c5_asymptotic_unbiasedness(seed: int, scale: dict, workers: int) -> CriterionResult:
    params = LomaxParams(1.0)
    ms = (10, 20, 40, 80)
    ok = True
    out = {}
    for x in (0.5, 1.0):
        f, F = lomax.pdf(x, params), lomax.cdf(x, params)
        bf = [abs(analytic.expected_pdf_hat(x, params, m).value - f) for m in ms]
        bF = [abs(analytic.expected_cdf_hat(x, params, m).value - F) for m in ms]
        dec = all(b < a for a, b in zip(bf, bf[1:])) and all(b < a for a, b in zip(bF, bF[1:]))
        rel = (bf[-1] / f, bF[-1] / F)
        ok &= dec and max(rel) < 0.02
        out[repr(x)] = {"pdf_bias": bf, "cdf_bias": bF, "decreasing": dec, "rel_bias_m80": list(rel)}
    detail = "; ".join(f"x={x}: rel bias at m=80 pdf {v['rel_bias_m80'][0]:.4f}, cdf {v['rel_bias_m80'][1]:.4f}, decreasing={v['decreasing']}" for x, v in out.items())
    return CriterionResult(5, "asymptotic-unbiasedness", ok, detail, {"m": list(ms), "by_x": out})


def c6_gamma_ratio(seed: int, scale: dict, workers: int) -> CriterionResult:
    ratios = [analytic.gamma_ratio(100_000, i) for i in range(6)]
    small = analytic.gamma_ratio(3, 0)
    ok = all(abs(r - 1.0) <= 1e-3 for r in ratios) and abs(small - 1.5) <= 1e-12
    detail = f"max |ratio(1e5, i) - 1| = {max(abs(r - 1) for r in ratios):.3g} (i<=5); ratio(3, 0) = {small!r}"
    return CriterionResult(6, "gamma-ratio-limit", ok, detail, {"n1e5": ratios, "n3_i0": small})


def c7_asymptotic_identity(seed: int, scale: dict, workers: int) -> CriterionResult:
    params = LomaxParams(1.0)
    ms = (10, 20, 40, 80, 160)
    gaps = [analytic.asymptotic_identity_gap(0.5, params, m) for m in ms]
    factors = [abs(a) / abs(b) for a, b in zip(gaps, gaps[1:])]
    shrink_ok = all(f >= 1.5 for f in factors)
    grid = [float(v) for v in np.linspace(0.1, 2.0, 20)]
    scan = analytic.pdf_hat_bound_scan(grid, params, range(20, 201))
    bound_ok = all(scan.holds.values())
    detail = f"gap shrink factors {', '.join(f'{f:.3f}' for f in factors)} (need >= 1.5); E[f_hat] < 1/theta on x in [0.1, 2] for m in 20..200: {bound_ok}"
    return CriterionResult(
        7, "asymptotic-identity-and-bound", shrink_ok and bound_ok, detail,
        {"m": list(ms), "gaps": gaps, "shrink_factors": factors, "bound_all_hold": bound_ok, "bound_onset": scan.onset},
    )


def c8_convergence(seed: int, scale: dict, workers: int) -> CriterionResult:
    cfg = McConfig(criterion_seed(seed, 8), scale["c8_reps"], LomaxParams(1.0), 10, workers=workers)
    rows = mc_convergence_scan(cfg, [10, 40, 160], 0.05, 0.5)

    def dec(vals):
        return all(b < a for a, b in zip(vals, vals[1:]))

    th = [r.theta_exceedance for r in rows]
    pf = [r.pdf_exceedance for r in rows]
    cf = [r.cdf_exceedance for r in rows]
    last = rows[-1]
    z = (last.theta_exceedance - last.theta_exact) / last.theta_se
    ok = dec(th) and dec(pf) and dec(cf) and abs(z) <= 3.0
    detail = (
        f"P(|theta_hat-theta|>=0.05): {', '.join(f'{v:.4f}' for v in th)}; m=160 vs exact {last.theta_exact:.4f} z={z:+.2f}; "
        f"f_hat {', '.join(f'{v:.4f}' for v in pf)}; F_hat {', '.join(f'{v:.4f}' for v in cf)}"
    )
    return CriterionResult(
        8, "convergence-in-probability", ok, detail,
        {"rows": [asdict(r) for r in rows], "z_exact_m160": z},
    )


def c9_closed_forms(seed: int, scale: dict, workers: int) -> CriterionResult:
    worst = 0.0
    for m in (3, 5, 10):
        for th in (0.5, 1.0, 2.0):
            p = LomaxParams(th)
            e1 = m / ((m - 1) * th)
            e2 = m * m / (th * th * (m - 1) * (m - 2))
            worst = max(worst, abs(analytic.expected_pdf_hat(0.0, p, m).value - e1) / e1)
            worst = max(worst, abs(analytic.second_moment_pdf_hat(0.0, p, m).value - e2) / e2)
    return CriterionResult(9, "closed-form-spot-values", worst <= 1e-12, f"max rel err {worst:.3g} (need <= 1e-12)", {"max_rel_err": worst})


def c10_determinism(seed: int, scale: dict, workers: int) -> CriterionResult:
    probe = dict(scale)
    for k in ("c1_reps", "c2_reps", "c4_reps", "c8_reps"):
        probe[k] = scale["c10_reps"]
    mc = (c1_mse_equality, c2_distributional_equality, c4_series_vs_mc, c8_convergence)

    def digest(w):
        return json.dumps([c(seed, probe, w).to_dict() for c in mc], sort_keys=True)

    a, b, c = digest(1), digest(1), digest(4)
    ok = a == b == c
    detail = f"Monte Carlo criteria at {scale['c10_reps']} reps: rerun identical={a == b}, workers 1 vs 4 identical={a == c}"
    return CriterionResult(10, "determinism", ok, detail, {"rerun_identical": a == b, "workers_identical": a == c})


CRITERIA = (
    c1_mse_equality,
    c2_distributional_equality,
    c3_series_vs_quadrature,
    c4_series_vs_mc,
    c5_asymptotic_unbiasedness,
    c6_gamma_ratio,
    c7_asymptotic_identity,
    c8_convergence,
    c9_closed_forms,
    c10_determinism,
)


def run_criterion(number: int, suite: str = "full", seed: int = DEFAULT_SEED, workers: int = 1) -> CriterionResult:
    return CRITERIA[number - 1](seed, SUITES[suite], workers)


def run_suite(suite: str = "full", seed: int = DEFAULT_SEED, workers: int = 1) -> list[CriterionResult]:
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; expected one of {sorted(SUITES)}")
    return [c(seed, SUITES[suite], workers) for c in CRITERIA]


def report_json(results: list[CriterionResult], suite: str, seed: int) -> str:
    body = {
        "suite": suite,
        "seed": seed,
        "all_passed": all(r.passed for r in results),
        "criteria": [r.to_dict() for r in results],
    }
    return json.dumps(body, sort_keys=True, indent=2, allow_nan=False) + "\n"


def report_text(results: list[CriterionResult], suite: str, seed: int) -> str:
    lines = [f"suite={suite} seed={seed}"]
    lines += [r.line() for r in results]
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} criteria passed")
    return "\n".join(lines) + "\n"
