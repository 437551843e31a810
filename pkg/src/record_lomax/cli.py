"""Command-line front end: ``record-lomax {simulate,estimate,analytic,verify}``.

Exit codes: 0 success, 1 runtime or degenerate-data failure, 2 invalid flags
or malformed input.  Every file written with ``--out`` is accompanied by a
``<out>.manifest.json`` describing the run.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from pathlib import Path

from . import __version__, analytic, verify
from .errors import DegenerateEstimateError, DomainError
from .estimators import mle_from_records, mle_from_sample
from .lomax import LomaxParams, sample
from .records import RecordSequence, extract_upper_records, sample_records
from . import rng as rngmod

SEED_ENV = "RECORD_LOMAX_SEED"
QUANTITIES = ("E-pdf", "E-cdf", "MSE-pdf", "MSE-cdf", "gamma-ratio", "theorem4-gap")


class InputError(Exception):
    """Malformed user input (exit code 2)."""


def fmt(v: float) -> str:
    return f"{v:.17g}"


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return verify.DEFAULT_SEED
    try:
        seed = int(raw)
    except ValueError:
        raise InputError(f"{SEED_ENV}={raw!r} is not an integer") from None
    if seed < 0:
        raise InputError(f"{SEED_ENV} must be non-negative")
    return seed


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (math.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError(f"must be a finite positive number: {text!r}")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text!r}")
    return v


def _seed(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("seed must be non-negative")
    return v


def _float_list(text: str) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {text!r}") from None
    if not vals or any(not math.isfinite(v) or v < 0 for v in vals):
        raise argparse.ArgumentTypeError(f"grid values must be finite and >= 0: {text!r}")
    return vals


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="record-lomax", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="draw a Lomax sample or a record sequence")
    kind = p.add_mutually_exclusive_group(required=True)
    kind.add_argument("--sample", action="store_true", help="i.i.d. Lomax sample of size --n")
    kind.add_argument("--records", action="store_true", help="first --m upper records")
    p.add_argument("--theta", type=_positive_float, required=True)
    p.add_argument("--n", type=_positive_int)
    p.add_argument("--m", type=_positive_int)
    p.add_argument("--seed", type=_seed)
    p.add_argument("--out", type=Path)
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("estimate", help="maximum-likelihood estimate of theta from a data file")
    p.add_argument("--input", type=Path, required=True, help="one value per line; '#' starts a comment")
    p.add_argument("--mode", choices=("sample", "records", "extract-then-records"), required=True)
    p.add_argument("--out", type=Path)

    p = sub.add_parser("analytic", help="evaluate the series formulas on a grid")
    p.add_argument("--quantity", choices=QUANTITIES, required=True)
    p.add_argument("--theta", type=_positive_float)
    p.add_argument("--m", type=_positive_int)
    p.add_argument("--x-grid", type=_float_list, dest="x_grid")
    p.add_argument("--n", type=_int_list, help="gamma-ratio: comma-separated n values")
    p.add_argument("--i", type=_int_list, help="gamma-ratio: comma-separated i values")
    p.add_argument("--out", type=Path)

    p = sub.add_parser("verify", help="run the acceptance suite")
    p.add_argument("--suite", choices=sorted(verify.SUITES), default="fast")
    p.add_argument("--seed", type=_seed)
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", type=Path, help="also write the JSON report here")
    return parser


def _write_manifest(out: Path, command: str, config: dict, seed, started: float) -> None:
    manifest = {
        "command": command,
        "config": config,
        "master_seed": seed,
        "version": __version__,
        "wall_clock_seconds": time.perf_counter() - started,
    }
    Path(f"{out}.manifest.json").write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")


def _emit(text: str, out: Path | None, command: str, config: dict, seed, started: float) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w", newline="") as fh:
        fh.write(text)
    _write_manifest(out, command, config, seed, started)


def _csv(header: list[str], rows: list[list[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def cmd_simulate(args, parser) -> int:
    started = time.perf_counter()
    seed = args.seed if args.seed is not None else _default_seed()
    params = LomaxParams(args.theta)
    if args.sample:
        if args.n is None or args.m is not None:
            parser.error("--sample needs --n (and no --m)")
        kind, count = "sample", args.n
        gen = rngmod.stream(seed, rngmod.TAG_SAMPLE, count)
        values = sample(count, params, gen).tolist()
    else:
        if args.m is None or args.n is not None:
            parser.error("--records needs --m (and no --n)")
        kind, count = "records", args.m
        gen = rngmod.stream(seed, rngmod.TAG_RECORDS, count)
        values = list(sample_records(count, params, gen).values)
    if args.format == "csv":
        text = _csv(["index", "value"], [[str(i + 1), fmt(v)] for i, v in enumerate(values)])
    else:
        doc = {"kind": kind, "theta": params.theta, "count": count, "seed": seed, "values": values}
        text = json.dumps(doc, indent=2) + "\n"
    config = {"kind": kind, "theta": params.theta, "count": count, "format": args.format}
    _emit(text, args.out, "simulate", config, seed, started)
    return 0


def read_observations(path: Path) -> list[float]:
    try:
        raw = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    values = []
    for lineno, line in enumerate(raw.splitlines(), 1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        try:
            v = float(text)
        except ValueError:
            raise InputError(f"{path}:{lineno}: not a number: {text!r}") from None
        if not math.isfinite(v) or v < 0:
            raise InputError(f"{path}:{lineno}: observations must be finite and >= 0, got {text!r}")
        values.append(v)
    if not values:
        raise InputError(f"{path}: no observations")
    return values


def cmd_estimate(args, parser) -> int:
    started = time.perf_counter()
    values = read_observations(args.input)
    if args.mode == "sample":
        report = mle_from_sample(values)
    else:
        if args.mode == "records":
            try:
                records = RecordSequence(tuple(values))
            except DomainError as exc:
                raise InputError(f"{args.input}: {exc}") from None
        else:
            records = extract_upper_records(values)
        report = mle_from_records(records)
    text = json.dumps(report.to_dict(), sort_keys=True) + "\n"
    _emit(text, args.out, "estimate", {"input": str(args.input), "mode": args.mode}, None, started)
    return 0


def _analytic_row(quantity: str, x: float, params: LomaxParams, m: int) -> tuple[float, int, bool]:
    if quantity == "theorem4-gap":
        ef = analytic.expected_pdf_hat(x, params, m)
        eF = analytic.expected_cdf_hat(x, params, m)
        terms = ef.terms + eF.terms
        flagged = ef.cancellation_flag or eF.cancellation_flag
        try:
            value = analytic.asymptotic_identity_gap(x, params, m)
        except DomainError:
            return math.nan, terms, True
        return value, terms, flagged
    op = {
        "E-pdf": analytic.expected_pdf_hat,
        "E-cdf": analytic.expected_cdf_hat,
        "MSE-pdf": analytic.mse_pdf_hat,
        "MSE-cdf": analytic.mse_cdf_hat,
    }[quantity]
    r = op(x, params, m)
    return r.value, r.terms, r.cancellation_flag


def cmd_analytic(args, parser) -> int:
    started = time.perf_counter()
    if args.quantity == "gamma-ratio":
        if not args.n or not args.i:
            parser.error("gamma-ratio needs --n and --i")
        rows = []
        for n in args.n:
            for i in args.i:
                try:
                    rows.append([str(n), str(i), fmt(analytic.gamma_ratio(n, i))])
                except DomainError as exc:
                    parser.error(str(exc))
        text = _csv(["n", "i", "ratio"], rows)
        _emit(text, args.out, "analytic", {"quantity": args.quantity, "n": args.n, "i": args.i}, None, started)
        return 0

    if args.theta is None or args.m is None or args.x_grid is None:
        parser.error(f"{args.quantity} needs --theta, --m and --x-grid")
    params = LomaxParams(args.theta)
    rows, all_flagged = [], True
    for x in args.x_grid:
        try:
            value, terms, flagged = _analytic_row(args.quantity, x, params, args.m)
        except DomainError as exc:
            parser.error(str(exc))
        flagged = flagged or not math.isfinite(value)
        all_flagged &= flagged
        rows.append([fmt(x), fmt(value) if math.isfinite(value) else "nan", str(terms), "true" if flagged else "false"])
    text = _csv(["x", "value", "terms", "cancellation_flag"], rows)
    config = {"quantity": args.quantity, "theta": params.theta, "m": args.m, "x_grid": args.x_grid}
    _emit(text, args.out, "analytic", config, None, started)
    if all_flagged:
        print("error: every grid point is cancellation-flagged", file=sys.stderr)
        return 1
    return 0


def cmd_verify(args, parser) -> int:
    started = time.perf_counter()
    seed = args.seed if args.seed is not None else _default_seed()
    results = verify.run_suite(args.suite, seed, args.workers)
    as_json = verify.report_json(results, args.suite, seed)
    sys.stdout.write(as_json if args.format == "json" else verify.report_text(results, args.suite, seed))
    if args.out is not None:
        args.out.write_text(as_json)
        _write_manifest(args.out, "verify", {"suite": args.suite, "workers": args.workers}, seed, started)
    return 0 if all(r.passed for r in results) else 1


COMMANDS = {
    "simulate": cmd_simulate,
    "estimate": cmd_estimate,
    "analytic": cmd_analytic,
    "verify": cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args, parser)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DegenerateEstimateError as exc:
        print(f"error: degenerate data: {exc}", file=sys.stderr)
        return 1
    except (DomainError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
