"""Test densities, their samplers and the unit-variance noise samplers."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import stats

from .noise import NoiseKind

SQRT6 = math.sqrt(6.0)
SQRT548 = math.sqrt(5.48)
SQRT2 = math.sqrt(2.0)


def _chi2_pdf(x):
    return SQRT6 * stats.chi2.pdf(SQRT6 * np.asarray(x, dtype=float), df=3)


def _chi2_sample(rng, n):
    return rng.chisquare(3, size=n) / SQRT6


def _laplace_pdf(x):
    x = np.asarray(x, dtype=float)
    return np.exp(-SQRT2 * np.abs(x)) / SQRT2


def _laplace_sample(rng, n):
    # inverse CDF of the unit-variance Laplace law
    u = rng.random(n) - 0.5
    return -np.sign(u) * np.log1p(-2.0 * np.abs(u)) / SQRT2


def _mixgamma_pdf(x):
    w = SQRT548 * np.asarray(x, dtype=float)
    return SQRT548 * (0.4 * stats.gamma.pdf(w, 5) + 0.6 * stats.gamma.pdf(w, 13))


def _mixgamma_sample(rng, n):
    first = rng.random(n) < 0.4
    w = np.where(first, rng.standard_gamma(5.0, n), rng.standard_gamma(13.0, n))
    return w / SQRT548


def _cauchy_pdf(x):
    x = np.asarray(x, dtype=float)
    return 1.0 / (math.pi * (1.0 + x * x))


def _cauchy_sample(rng, n):
    return np.tan(math.pi * (rng.random(n) - 0.5))


def _gauss_pdf(x):
    return stats.norm.pdf(np.asarray(x, dtype=float))


def _gauss_sample(rng, n):
    return rng.standard_normal(n)


def _mixgauss_pdf(x):
    v = np.asarray(x, dtype=float) / SQRT2
    return (0.5 * stats.norm.pdf(v, -3.0) + 0.5 * stats.norm.pdf(v, 2.0)) / SQRT2


def _mixgauss_sample(rng, n):
    first = rng.random(n) < 0.5
    v = np.where(first, -3.0, 2.0) + rng.standard_normal(n)
    return SQRT2 * v


@dataclass(frozen=True)
class TargetDensity:
    """A simulation target X together with the interval used to score estimates.

    ``report_scale`` is the factor s such that the ISE interval refers to the
    variable s * X: the chi-square and gamma-mixture targets are simulated at unit
    variance but scored as densities of the unnormalized U and W.
    """

    id: str
    letter: str
    label: str
    interval: tuple[float, float]
    _pdf: Callable = None
    _sampler: Callable = None
    report_scale: float = 1.0

    def pdf(self, x):
        return self._pdf(x)

    def reported_pdf(self, u):
        """Density of ``report_scale * X``."""
        s = self.report_scale
        return self._pdf(np.asarray(u, dtype=float) / s) / s

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if n < 1:
            raise ValueError("n must be >= 1")
        return self._sampler(rng, n)


DENSITIES: dict[str, TargetDensity] = {
    d.id: d
    for d in [
        TargetDensity("chi2", "a", "Chi2(3)-type", (-1.0, 16.0), _chi2_pdf, _chi2_sample, SQRT6),
        TargetDensity("laplace", "b", "Laplace", (-5.0, 5.0), _laplace_pdf, _laplace_sample),
        TargetDensity("mixgamma", "c", "Mixed Gamma", (-1.5, 26.0), _mixgamma_pdf, _mixgamma_sample, SQRT548),
        TargetDensity("cauchy", "d", "Cauchy", (-10.0, 10.0), _cauchy_pdf, _cauchy_sample),
        TargetDensity("gauss", "e", "Gaussian", (-4.0, 4.0), _gauss_pdf, _gauss_sample),
        TargetDensity("mixgauss", "f", "Mixed Gaussian", (-8.0, 7.0), _mixgauss_pdf, _mixgauss_sample),
    ]
}
_BY_LETTER = {d.letter: d for d in DENSITIES.values()}


def get_density(key: str | TargetDensity) -> TargetDensity:
    """Look a density up by id (``"chi2"``) or by its letter (``"a"``)."""
    if isinstance(key, TargetDensity):
        return key
    k = key.strip().lower()
    if k in DENSITIES:
        return DENSITIES[k]
    if k in _BY_LETTER:
        return _BY_LETTER[k]
    raise KeyError(f"unknown density {key!r}; choose from {sorted(DENSITIES)} or a-f")


def pdf(density, x):
    return get_density(density).pdf(x)


def sample_target(density, n: int, rng: np.random.Generator) -> np.ndarray:
    return get_density(density).sample(rng, n)


def sample_noise(kind: NoiseKind | str, n: int, rng: np.random.Generator) -> np.ndarray:
    """Unit-variance error draws: Laplace by inverse CDF, Gaussian standard normal."""
    kind = NoiseKind(kind)
    if n < 1:
        raise ValueError("n must be >= 1")
    if kind is NoiseKind.LAPLACE:
        return _laplace_sample(rng, n)
    if kind is NoiseKind.GAUSSIAN:
        return rng.standard_normal(n)
    return np.zeros(n)
