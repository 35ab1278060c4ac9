"""Command-line front end: ``ginicell {coverage,multitier,sample,countstats}``.

Every command writes CSV or JSON to ``--out`` (stdout by default).  JSON
output carries a ``manifest`` object next to the ``results`` array; CSV
output written to a file gets a ``<file>.manifest.json`` sidecar.

Exit codes: 0 success, 2 usage or domain error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import sys
import time
import warnings
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import __version__, analytic, multitier, numerics, pointproc, simulate
from .channel import FadingModel, PathLoss, TierConfig
from .pointproc import GinibreModel, PoissonModel

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
SCHEMA_VERSION = "1"

COVERAGE_HEADER = ["theta_db", "theta_linear", "coverage", "half_width", "method"]
MULTITIER_HEADER = ["theta1_db", "theta2_db", "total", "tier1_part", "tier2_part",
                    "assoc_tier1", "assoc_tier2", "half_width", "method"]
COUNTSTATS_HEADER = ["statistic", "analytic", "empirical", "half_width"]


class UsageError(Exception):
    """Invalid flags or parameter values (exit code 2)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- formatting -------------------------------------------------------------

def _num(x) -> Optional[float]:
    """Round to 12 significant digits; None for missing values."""
    if x is None:
        return None
    x = float(x)
    if not math.isfinite(x):
        return None
    return float(f"{x:.12g}")


def _csv_cell(x) -> str:
    if isinstance(x, str):
        return x
    v = _num(x)
    return "" if v is None else f"{v:.12g}"


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def linear_to_db(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(x)


def theta_grid(args) -> np.ndarray:
    """Thresholds in dB from ``--theta``, ``--theta-db`` or the from/to/step range."""
    if args.theta is not None:
        lin = np.asarray(args.theta, dtype=float)
        if np.any(lin < 0):
            raise UsageError("--theta values must be nonnegative")
        return linear_to_db(lin)
    if args.theta_db is not None:
        return np.asarray(args.theta_db, dtype=float)
    if not args.theta_db_step > 0:
        raise UsageError("--theta-db-step must be positive")
    if args.theta_db_to < args.theta_db_from:
        raise UsageError("--theta-db-to must not be below --theta-db-from")
    count = int(math.floor((args.theta_db_to - args.theta_db_from) / args.theta_db_step + 1e-9)) + 1
    return np.round(args.theta_db_from + args.theta_db_step * np.arange(count), 10)


def _emit(args, manifest: Dict, header: List[str], rows: List[Dict]):
    if args.format == "json":
        doc = {"manifest": manifest,
               "results": [{k: (v if isinstance(v, str) else _num(v)) for k, v in row.items()}
                           for row in rows]}
        text = json.dumps(doc, indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_csv_cell(row.get(k)) for k in header])
        text = buf.getvalue()
    if args.out in (None, "-"):
        sys.stdout.write(text)
        return
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    if args.format == "csv":
        with open(args.out + ".manifest.json", "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2)
            fh.write("\n")


def _manifest(command: str, args, started: float, diagnostics: Dict, notes: Sequence[str] = ()):
    params = {k: v for k, v in vars(args).items() if k not in ("func", "out", "format")}
    return {
        "schema_version": SCHEMA_VERSION,
        "tool": "ginicell",
        "tool_version": __version__,
        "command": command,
        "parameters": params,
        "seed": getattr(args, "seed", None),
        "wall_clock_seconds": round(time.perf_counter() - started, 6),
        "truncation": diagnostics,
        "notes": list(notes),
    }


def _analytic_diagnostics():
    trunc = analytic.SeriesTruncation()
    spec = numerics.QuadratureSpec()
    return {"factor_tolerance": trunc.factor_tolerance, "max_terms": trunc.max_terms,
            "quadrature_relative_tolerance": spec.relative_tolerance,
            "quadrature_absolute_tolerance": spec.absolute_tolerance}


def _mc_config(args) -> simulate.McConfig:
    if args.reps < 1:
        raise UsageError("--reps must be >= 1")
    if not 0 <= args.seed < 2 ** 64:
        raise UsageError("--seed must be a 64-bit unsigned integer")
    return simulate.McConfig(replications=args.reps, master_seed=args.seed,
                             max_points_per_tier=args.max_points)


def _ginibre(alpha, lam) -> GinibreModel:
    if not 0.0 < alpha <= 1.0:
        hint = " (for the Poisson limit use --model ppp)" if alpha == 0 else ""
        raise UsageError(f"--alpha must lie in (0, 1], got {alpha}{hint}")
    if not lam > 0:
        raise UsageError(f"--lambda must be positive, got {lam}")
    return GinibreModel(alpha, lam)


def _poisson(lam) -> PoissonModel:
    if not lam > 0:
        raise UsageError(f"--lambda must be positive, got {lam}")
    return PoissonModel(lam)


# -- commands ---------------------------------------------------------------

def cmd_coverage(args) -> int:
    started = time.perf_counter()
    if not args.beta > 1:
        raise UsageError(f"--beta must exceed 1, got {args.beta}")
    if args.model == "ginibre":
        deployment = _ginibre(args.alpha, args.lam)
    else:
        deployment = _poisson(args.lam)
    if not args.power > 0 or not args.noise >= 0:
        raise UsageError("--power must be positive and --noise nonnegative")
    scn = analytic.SingleTierScenario(deployment, power=args.power, noise=args.noise,
                                      pathloss=PathLoss(args.beta),
                                      interferer_fading=FadingModel.erlang(args.psi))
    grid_db = theta_grid(args)
    grid = db_to_linear(grid_db)
    diagnostics = {}
    analytic_vals = mc_vals = None
    if args.method in ("analytic", "both"):
        analytic_vals = [analytic.coverage(scn, float(th)) for th in grid]
        diagnostics.update(_analytic_diagnostics())
    if args.method in ("mc", "both"):
        mc = _mc_config(args)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", simulate.TruncationBiasWarning)
            mc_vals = simulate.estimate_coverage_curve(scn, grid, mc)
        diagnostics["max_points_per_tier"] = simulate.points_per_tier(mc, deployment)
        diagnostics["pilot_truncation_shift"] = mc_vals[0].truncation_shift
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
    rows = []
    for k, (db, lin) in enumerate(zip(grid_db, grid)):
        base = {"theta_db": db, "theta_linear": lin}
        if analytic_vals is not None:
            rows.append({**base, "coverage": analytic_vals[k], "half_width": None, "method": "analytic"})
        if mc_vals is not None:
            rows.append({**base, "coverage": mc_vals[k].coverage,
                         "half_width": mc_vals[k].half_width, "method": "mc"})
        if analytic_vals is not None and mc_vals is not None:
            rows.append({**base, "coverage": mc_vals[k].coverage - analytic_vals[k],
                         "half_width": mc_vals[k].half_width, "method": "difference"})
    _emit(args, _manifest("coverage", args, started, diagnostics), COVERAGE_HEADER, rows)
    return EXIT_OK


def read_two_tier_config(path: str) -> multitier.TwoTierScenario:
    """Parse the ``[tier1]``, ``[tier2]`` and ``[thresholds]`` key-value file."""
    parser = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise UsageError(f"cannot read config {path!r}: {exc}") from exc
    for section in ("tier1", "tier2", "thresholds"):
        if not parser.has_section(section):
            raise UsageError(f"config is missing the [{section}] section")

    def number(section, key, default=None, kind=float):
        if not parser.has_option(section, key):
            if default is None:
                raise UsageError(f"config [{section}] is missing '{key}'")
            return default
        raw = parser.get(section, key)
        try:
            return kind(raw)
        except ValueError:
            raise UsageError(f"config [{section}] {key} = {raw!r} is not a valid number") from None

    tiers = []
    for k, section in enumerate(("tier1", "tier2"), start=1):
        lam = number(section, "lambda")
        deployment = _ginibre(number(section, "alpha"), lam) if k == 1 else _poisson(lam)
        users = number(section, "users", kind=int)
        try:
            tiers.append(TierConfig(power=number(section, "power"), bias=number(section, "bias", 1.0),
                                    antennas=number(section, "antennas", users, kind=int),
                                    served_users=users, pathloss=PathLoss(number(section, "beta")),
                                    deployment=deployment))
        except (ValueError, TypeError) as exc:
            raise UsageError(f"config [{section}]: {exc}") from exc

    th = {}
    for k in (1, 2):
        has_db = parser.has_option("thresholds", f"theta{k}_db")
        has_lin = parser.has_option("thresholds", f"theta{k}")
        if has_db == has_lin:
            raise UsageError(f"config [thresholds] needs exactly one of theta{k}_db or theta{k}")
        th[k] = (float(db_to_linear(number("thresholds", f"theta{k}_db"))) if has_db
                 else number("thresholds", f"theta{k}"))
    try:
        return multitier.TwoTierScenario(tiers[0], tiers[1], th[1], th[2])
    except (ValueError, TypeError) as exc:
        raise UsageError(f"config: {exc}") from exc


def cmd_multitier(args) -> int:
    started = time.perf_counter()
    scn = read_two_tier_config(args.config)
    base = {"theta1_db": float(linear_to_db(scn.theta1)), "theta2_db": float(linear_to_db(scn.theta2))}
    rows = []
    diagnostics = {}
    cov = None
    if args.method in ("analytic", "both"):
        try:
            scn.check_full_sdma()
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        cov = multitier.coverage_two_tier(scn)
        assoc = multitier.association_probabilities(scn)
        rows.append({**base, "total": cov.total, "tier1_part": cov.tier1_part,
                     "tier2_part": cov.tier2_part, "assoc_tier1": assoc.tier1_part,
                     "assoc_tier2": assoc.tier2_part, "half_width": None, "method": "analytic"})
        diagnostics.update(_analytic_diagnostics())
    if args.method in ("mc", "both"):
        mc = _mc_config(args)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", simulate.TruncationBiasWarning)
            est = simulate.estimate_coverage_two_tier(scn, mc)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        diagnostics["pilot_truncation_shift"] = est.truncation_shift
        rows.append({**base, "total": est.coverage, "tier1_part": est.per_tier_coverage[0],
                     "tier2_part": est.per_tier_coverage[1],
                     "assoc_tier1": est.per_tier_association_freq[0],
                     "assoc_tier2": est.per_tier_association_freq[1],
                     "half_width": est.half_width, "method": "mc"})
        if cov is not None:
            rows.append({**base, "total": est.coverage - cov.total,
                         "tier1_part": est.per_tier_coverage[0] - cov.tier1_part,
                         "tier2_part": est.per_tier_coverage[1] - cov.tier2_part,
                         "assoc_tier1": est.per_tier_association_freq[0] - rows[0]["assoc_tier1"],
                         "assoc_tier2": est.per_tier_association_freq[1] - rows[0]["assoc_tier2"],
                         "half_width": est.half_width, "method": "difference"})
    _emit(args, _manifest("multitier", args, started, diagnostics), MULTITIER_HEADER, rows)
    return EXIT_OK


def cmd_sample(args) -> int:
    started = time.perf_counter()
    if not args.radius > 0:
        raise UsageError("--radius must be positive")
    if args.model == "ginibre":
        model = _ginibre(args.alpha, args.lam)
        n = pointproc.default_max_points(model, args.radius)
        config = pointproc.sample_radial(model, n, seed=np.random.SeedSequence(args.seed, spawn_key=(0,)))
    else:
        model = _poisson(args.lam)
        n = pointproc.default_max_points(model, args.radius)
        config = pointproc.sample_poisson_radial(model.lam, n, seed=np.random.SeedSequence(args.seed, spawn_key=(0,)))
    inside = config.squared_radii[config.squared_radii <= args.radius ** 2]
    header = ["squared_radius"]
    notes = []
    rows = [{"squared_radius": y} for y in inside]
    if args.with_angles:
        trimmed = pointproc.RadialConfiguration(inside)
        pts = pointproc.attach_uniform_angles(trimmed, seed=np.random.SeedSequence(args.seed, spawn_key=(1,)))
        header.append("angle")
        for row, z in zip(rows, pts):
            row["angle"] = float(np.angle(z))
        notes.append("radially exact, angularly approximate: angles are i.i.d. uniform")
    diagnostics = {"candidates_generated": n, "points_in_disk": int(inside.size)}
    _emit(args, _manifest("sample", args, started, diagnostics, notes), header, rows)
    return EXIT_OK


def cmd_countstats(args) -> int:
    started = time.perf_counter()
    if not args.radius > 0:
        raise UsageError("--radius must be positive")
    model = _ginibre(args.alpha, args.lam)
    stats = pointproc.disk_count_statistics(model, args.radius)
    rows = [{"statistic": "mean", "analytic": stats.mean},
            {"statistic": "variance", "analytic": stats.variance}]
    diagnostics = {"eigenvalues_used": int(stats.eigenvalues.size)}
    if args.empirical:
        if args.reps < 2:
            raise UsageError("--reps must be >= 2 for empirical moments")
        counts = pointproc.sample_disk_counts(model, args.radius, args.reps, seed=args.seed).astype(float)
        z = 1.959963984540054
        n = counts.size
        mean = counts.mean()
        var = counts.var(ddof=1)
        m4 = np.mean((counts - mean) ** 4)
        rows[0].update(empirical=mean, half_width=z * math.sqrt(var / n))
        rows[1].update(empirical=var, half_width=z * math.sqrt(max(m4 - var * var, 0.0) / n))
    _emit(args, _manifest("countstats", args, started, diagnostics), COUNTSTATS_HEADER, rows)
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def _add_output(p):
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None, help="output file (default stdout)")


def _add_mc(p):
    p.add_argument("--method", choices=("analytic", "mc", "both"), default="analytic")
    p.add_argument("--reps", type=int, default=100_000, help="Monte Carlo replications")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-points", type=int, default=None,
                   help="candidates generated per tier (default about 1000 retained points)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ginicell", description="Coverage of Poisson and alpha-Ginibre cellular networks.")
    parser.add_argument("--version", action="version", version=f"ginicell {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("coverage", help="single-tier coverage versus threshold")
    p.add_argument("--model", choices=("ppp", "ginibre"), default="ginibre")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0 / math.pi)
    p.add_argument("--beta", type=float, default=2.0, help="path loss r^(-2 beta)")
    p.add_argument("--power", type=float, default=1.0)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--psi", type=int, default=1, help="interferer fading Gamma(psi, 1)")
    grid = p.add_mutually_exclusive_group()
    grid.add_argument("--theta", type=float, nargs="+", help="linear thresholds")
    grid.add_argument("--theta-db", type=float, nargs="+", help="thresholds in dB")
    p.add_argument("--theta-db-from", type=float, default=-10.0)
    p.add_argument("--theta-db-to", type=float, default=20.0)
    p.add_argument("--theta-db-step", type=float, default=1.0)
    _add_mc(p)
    _add_output(p)
    p.set_defaults(func=cmd_coverage)

    p = sub.add_parser("multitier", help="two-tier Ginibre/Poisson coverage from a config file")
    p.add_argument("--config", required=True)
    _add_mc(p)
    _add_output(p)
    p.set_defaults(func=cmd_multitier)

    p = sub.add_parser("sample", help="squared radii of one sampled configuration in a disk")
    p.add_argument("--model", choices=("ppp", "ginibre"), default="ginibre")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0 / math.pi)
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--with-angles", action="store_true")
    _add_output(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("countstats", help="mean and variance of the count in a disk")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0 / math.pi)
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--empirical", action="store_true")
    p.add_argument("--reps", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    _add_output(p)
    p.set_defaults(func=cmd_countstats)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"ginicell: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (numerics.QuadratureError, analytic.TruncationError, FloatingPointError, ArithmeticError) as exc:
        print(f"ginicell: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, TypeError) as exc:
        print(f"ginicell: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
