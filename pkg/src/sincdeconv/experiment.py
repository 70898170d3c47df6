"""Monte Carlo harness: replicated estimation on simulated deconvolution samples."""

from __future__ import annotations

import math
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .densities import TargetDensity, get_density, sample_noise
from .estimator import DEFAULT_KN, CoefficientSet, NumericalFailure, evaluate
from .noise import NoiseKind, NoiseOverflowError, make_noise
from .selection import PenaltyConfig, score_models

DEFAULT_GRID_POINTS = 512
MAX_FAILURE_RATE = 0.01


class ExperimentFailed(RuntimeError):
    pass


@dataclass(frozen=True)
class ExperimentSpec:
    density: TargetDensity
    noise: NoiseKind
    s2n: float
    n: int
    reps: int = 500
    seed: int = 1
    k_n: int = DEFAULT_KN
    grid_points: int = DEFAULT_GRID_POINTS
    penalty: PenaltyConfig = field(default_factory=PenaltyConfig)
    assumed_noise: NoiseKind | None = None
    m_cap: int | None = None
    track_fixed_m: bool = False

    def __post_init__(self):
        object.__setattr__(self, "density", get_density(self.density))
        object.__setattr__(self, "noise", NoiseKind(self.noise))
        if self.assumed_noise is not None:
            object.__setattr__(self, "assumed_noise", NoiseKind(self.assumed_noise))
        if not self.s2n > 0:
            raise ValueError("s2n must be positive")
        if self.reps < 1 or self.n < 2:
            raise ValueError("need reps >= 1 and n >= 2")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def sigma(self) -> float:
        return 1.0 / math.sqrt(self.s2n)

    @property
    def estimation_noise(self) -> NoiseKind:
        return self.assumed_noise or self.noise


@dataclass
class SummaryStats:
    spec: ExperimentSpec
    mean_ise: float
    median_ise: float
    sd_ise: float
    selected_m_histogram: dict[int, int]
    failures: int = 0
    fixed_m_mise: dict[int, float] = field(default_factory=dict)
    ises: np.ndarray = field(default=None, repr=False, compare=False)

    @property
    def modal_m(self) -> int:
        top = max(self.selected_m_histogram.values())
        return min(m for m, c in self.selected_m_histogram.items() if c == top)


def rng_for(seed: int, rep: int) -> np.random.Generator:
    """Independent stream for replication `rep`; depends only on (seed, rep)."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(rep,)))


def ise_values(values, density, grid) -> float:
    """Trapezoidal integral of (values - pdf)^2 over `grid`, both on the reporting scale."""
    d = np.asarray(values, dtype=float) - get_density(density).reported_pdf(grid)
    return float(np.trapezoid(d * d, grid))


def ise_grid(density, grid_points: int = DEFAULT_GRID_POINTS) -> np.ndarray:
    if grid_points < 2:
        raise ValueError("grid_points must be >= 2")
    lo, hi = get_density(density).interval
    return np.linspace(lo, hi, grid_points)


def reported_estimate(coeffs: CoefficientSet, density, grid) -> np.ndarray:
    """Estimate of the density of ``report_scale * X`` on `grid`."""
    s = get_density(density).report_scale
    return evaluate(coeffs, np.asarray(grid, dtype=float) / s) / s


def ise(coeffs: CoefficientSet, density, grid_points: int = DEFAULT_GRID_POINTS) -> float:
    grid = ise_grid(density, grid_points)
    return ise_values(reported_estimate(coeffs, density, grid), density, grid)


def simulate_observations(spec: ExperimentSpec, rep: int) -> np.ndarray:
    rng = rng_for(spec.seed, rep)
    x = spec.density.sample(rng, spec.n)
    eps = sample_noise(spec.noise, spec.n, rng)
    return x + spec.sigma * eps


def _replicate(spec: ExperimentSpec, rep: int):
    z = simulate_observations(spec, rep)
    model = make_noise(spec.estimation_noise, spec.sigma)
    try:
        sel = score_models(z, model, spec.penalty, spec.k_n, spec.m_cap)
    except (NumericalFailure, NoiseOverflowError, FloatingPointError, ValueError):
        return None
    grid = ise_grid(spec.density, spec.grid_points)
    if spec.track_fixed_m:
        per_m = {m: ise_values(reported_estimate(c, spec.density, grid), spec.density, grid)
                 for m, c in sel.coefficients.items()}
        return per_m[sel.m_hat], sel.m_hat, per_m
    return ise_values(reported_estimate(sel.estimate, spec.density, grid), spec.density, grid), sel.m_hat, {}


def _replicate_chunk(spec: ExperimentSpec, reps: range):
    return [_replicate(spec, r) for r in reps]


def default_workers() -> int:
    cap = os.environ.get("DECONV_THREADS")
    n = os.cpu_count() or 1
    if cap:
        n = min(n, max(1, int(cap)))
    return n


def _run_replications(spec: ExperimentSpec, workers: int):
    if workers <= 1 or spec.reps == 1:
        return _replicate_chunk(spec, range(spec.reps))
    size = max(1, math.ceil(spec.reps / (4 * workers)))
    chunks = [range(s, min(s + size, spec.reps)) for s in range(0, spec.reps, size)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(_replicate_chunk, [spec] * len(chunks), chunks)
        return [res for part in parts for res in part]


def run_experiment(spec: ExperimentSpec, workers: int | None = None) -> SummaryStats:
    """Run every replication and aggregate ISE statistics in replication order."""
    workers = default_workers() if workers is None else workers
    results = _run_replications(spec, workers)
    ok = [r for r in results if r is not None]
    failures = len(results) - len(ok)
    if failures > MAX_FAILURE_RATE * spec.reps:
        raise ExperimentFailed(f"{failures} of {spec.reps} replications failed numerically")
    ises = np.array([r[0] for r in ok])
    hist = Counter(r[1] for r in ok)
    fixed: dict[int, float] = {}
    if spec.track_fixed_m:
        common = set.intersection(*(set(r[2]) for r in ok))
        fixed = {m: float(np.mean([r[2][m] for r in ok])) for m in sorted(common)}
    return SummaryStats(
        spec=spec,
        mean_ise=float(np.mean(ises)),
        median_ise=float(np.median(ises)),
        sd_ise=float(np.std(ises, ddof=1)) if ises.size > 1 else 0.0,
        selected_m_histogram=dict(sorted(hist.items())),
        failures=failures,
        fixed_m_mise=fixed,
        ises=ises,
    )


@dataclass
class MisspecResult:
    correct: SummaryStats
    assumed: SummaryStats

    @property
    def ratio(self) -> float:
        return self.assumed.mean_ise / self.correct.mean_ise


def misspecification(spec: ExperimentSpec, workers: int | None = None) -> MisspecResult:
    if spec.assumed_noise is None:
        raise ValueError("misspecification needs assumed_noise")
    correct = run_experiment(replace(spec, assumed_noise=None), workers)
    if spec.assumed_noise is spec.noise:
        return MisspecResult(correct, correct)
    return MisspecResult(correct, run_experiment(spec, workers))


def misspecification_ratio(spec: ExperimentSpec, workers: int | None = None) -> float:
    """MISE assuming `spec.assumed_noise` over MISE assuming the true noise, on shared streams."""
    return misspecification(spec, workers).ratio
