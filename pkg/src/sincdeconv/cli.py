"""Command-line front end.

Exit codes: 2 bad flags, 3 unreadable or malformed data, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import csvio
from .densities import DENSITIES, get_density
from .estimator import DEFAULT_KN, NumericalFailure, evaluate
from .experiment import (
    DEFAULT_GRID_POINTS,
    ExperimentFailed,
    ExperimentSpec,
    misspecification,
    run_experiment,
)
from .noise import NoiseKind, NoiseOverflowError, make_noise
from .selection import PenaltyConfig, PenaltyMode, penalty, score_models

EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4

NOISE_CHOICES = [k.value for k in NoiseKind]
DENSITY_CHOICES = sorted(DENSITIES) + sorted(d.letter for d in DENSITIES.values())


class UsageError(Exception):
    pass


def _grid(spec: str):
    try:
        lo, hi, pts = spec.split(":")
        lo, hi, pts = float(lo), float(hi), int(pts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like lo:hi:pts, got {spec!r}") from None
    if not (math.isfinite(lo) and math.isfinite(hi) and hi > lo and pts >= 2):
        raise argparse.ArgumentTypeError(f"grid needs finite lo < hi and pts >= 2, got {spec!r}")
    return lo, hi, pts


def _nonneg_float(s: str) -> float:
    v = float(s)
    if not (v >= 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a finite nonnegative number, got {s!r}")
    return v


def _pos_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {s!r}")
    return v


def _penalty_args(p: argparse.ArgumentParser):
    p.add_argument("--penalty", choices=[m.value for m in PenaltyMode], default=PenaltyMode.PRACTICAL.value,
                   help="penalty family (default: practical)")
    p.add_argument("--a", type=float, default=1.5, help="constant of the theoretical penalty (default 1.5)")


def _estimation_args(p: argparse.ArgumentParser):
    p.add_argument("--data", required=True, help="text file, one observation per line")
    p.add_argument("--noise", required=True, choices=NOISE_CHOICES)
    p.add_argument("--sigma", required=True, type=_nonneg_float, help="noise level")
    p.add_argument("--kn", type=_pos_int, default=DEFAULT_KN, help=f"coefficient truncation (default {DEFAULT_KN})")
    p.add_argument("--m-cap", type=_pos_int, default=None, help="largest model dimension to consider")
    _penalty_args(p)
    p.add_argument("--out", default=None, help="output CSV (default: standard output)")


def _experiment_args(p: argparse.ArgumentParser):
    p.add_argument("--density", required=True, choices=DENSITY_CHOICES)
    p.add_argument("--noise", required=True, choices=[NoiseKind.LAPLACE.value, NoiseKind.GAUSSIAN.value])
    p.add_argument("--n", required=True, type=_pos_int)
    p.add_argument("--s2n", required=True, type=float)
    p.add_argument("--reps", type=_pos_int, default=500)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--kn", type=_pos_int, default=DEFAULT_KN)
    p.add_argument("--grid-points", type=_pos_int, default=DEFAULT_GRID_POINTS)
    p.add_argument("--m-cap", type=_pos_int, default=None)
    p.add_argument("--workers", type=_pos_int, default=None,
                   help="worker processes (default: CPU count, capped by DECONV_THREADS)")
    _penalty_args(p)
    p.add_argument("--out", default=None, help="output CSV (default: standard output)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sincdeconv", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="fit the adaptive estimator to a data file")
    _estimation_args(p)
    p.add_argument("--grid", type=_grid, default=None, help="evaluation grid lo:hi:pts (default: data range)")

    p = sub.add_parser("score-curve", help="contrast, penalty and criterion for every candidate m")
    _estimation_args(p)

    p = sub.add_parser("penalty-curve", help="penalty values for m = 1..m-max")
    p.add_argument("--noise", required=True, choices=NOISE_CHOICES)
    p.add_argument("--sigma", required=True, type=_nonneg_float)
    p.add_argument("--n", required=True, type=_pos_int)
    p.add_argument("--m-max", type=_pos_int, default=20)
    _penalty_args(p)
    p.add_argument("--out", default=None)

    p = sub.add_parser("simulate", help="Monte Carlo MISE for one density/noise/n/s2n cell")
    _experiment_args(p)

    p = sub.add_parser("misspec", help="MISE ratio when estimating with the wrong noise family")
    _experiment_args(p)
    p.add_argument("--assumed", required=True, choices=[NoiseKind.LAPLACE.value, NoiseKind.GAUSSIAN.value])
    return parser


def _penalty_cfg(args) -> PenaltyConfig:
    try:
        return PenaltyConfig(mode=args.penalty, a=args.a)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _emit(text: str, path) -> None:
    if path is None:
        sys.stdout.write(text)


def _fit(args):
    batch = csvio.read_data(args.data)
    model = make_noise(args.noise, args.sigma)
    return batch, score_models(batch, model, _penalty_cfg(args), args.kn, args.m_cap)


def cmd_estimate(args) -> None:
    batch, sel = _fit(args)
    if args.grid is None:
        lo, hi = float(batch.z.min()), float(batch.z.max())
        pad = 0.1 * (hi - lo) or 1.0
        grid = np.linspace(lo - pad, hi + pad, DEFAULT_GRID_POINTS)
    else:
        grid = np.linspace(*args.grid)
    text = csvio.write_columns(["x", "ghat"], [grid, evaluate(sel.estimate, grid)], args.out)
    _emit(text, args.out)
    # keep stdout pure CSV when no output file is given
    print(f"m_hat={sel.m_hat}", file=sys.stdout if args.out else sys.stderr)


def cmd_score_curve(args) -> None:
    _, sel = _fit(args)
    _emit(csvio.write_scores(sel.scores, args.out), args.out)
    print(f"m_hat={sel.m_hat}", file=sys.stdout if args.out else sys.stderr)


def cmd_penalty_curve(args) -> None:
    model = make_noise(args.noise, args.sigma)
    cfg = _penalty_cfg(args)
    ms, pens = [], []
    for m in range(1, args.m_max + 1):
        try:
            pens.append(penalty(model, m, args.n, cfg))
        except NoiseOverflowError:
            break
        ms.append(m)
    _emit(csvio.write_columns(["m", "pen"], [ms, pens], args.out), args.out)


def _spec(args, assumed=None) -> ExperimentSpec:
    try:
        return ExperimentSpec(density=get_density(args.density), noise=args.noise, s2n=args.s2n, n=args.n,
                              reps=args.reps, seed=args.seed, k_n=args.kn, grid_points=args.grid_points,
                              penalty=_penalty_cfg(args), assumed_noise=assumed, m_cap=args.m_cap)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_simulate(args) -> None:
    stats = run_experiment(_spec(args), workers=args.workers)
    _emit(csvio.write_results(stats, args.out), args.out)


def cmd_misspec(args) -> None:
    res = misspecification(_spec(args, assumed=args.assumed), workers=args.workers)
    _emit(csvio.write_misspec(res, args.out), args.out)


COMMANDS = {
    "estimate": cmd_estimate,
    "score-curve": cmd_score_curve,
    "penalty-curve": cmd_penalty_curve,
    "simulate": cmd_simulate,
    "misspec": cmd_misspec,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        parser.error(str(exc))
    except csvio.DataError as exc:
        print(f"sincdeconv: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (NumericalFailure, NoiseOverflowError, ExperimentFailed, FloatingPointError) as exc:
        print(f"sincdeconv: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"sincdeconv: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return 0


if __name__ == "__main__":
    sys.exit(main())
