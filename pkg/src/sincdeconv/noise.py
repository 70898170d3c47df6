"""Error densities with known characteristic function and their smoothness constants.

A noise model describes ``sigma * eps`` where ``eps`` has unit variance and a
characteristic function bounded below by
``kappa0 * (x**2 + 1)**(-gamma/2) * exp(-mu * |x|**delta)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .quadrature import integrate_doubling

# exp() overflows above this argument in double precision
_EXP_LIMIT = 709.0


class NoiseKind(str, enum.Enum):
    NONE = "none"
    LAPLACE = "laplace"
    GAUSSIAN = "gaussian"


class NoiseOverflowError(ArithmeticError):
    """The inverse characteristic function is not representable for model dimension `m`."""

    def __init__(self, m: int, message: str | None = None):
        self.m = m
        super().__init__(message or f"inverse noise characteristic function overflows at m={m}")


# squared L2 norm of the unit-variance error densities
_L2_NORM_SQ = {
    NoiseKind.LAPLACE: math.sqrt(2.0) / 4.0,
    NoiseKind.GAUSSIAN: 1.0 / (2.0 * math.sqrt(math.pi)),
}

_PRESETS = {
    NoiseKind.NONE: dict(gamma=0.0, mu=0.0, delta=0.0, kappa0=1.0),
    NoiseKind.LAPLACE: dict(gamma=2.0, mu=0.0, delta=0.0, kappa0=0.5),
    NoiseKind.GAUSSIAN: dict(gamma=0.0, mu=0.5, delta=2.0, kappa0=1.0),
}


@dataclass(frozen=True)
class NoiseModel:
    kind: NoiseKind
    sigma: float
    gamma: float
    mu: float
    delta: float
    kappa0: float

    def __post_init__(self):
        if self.sigma < 0 or not math.isfinite(self.sigma):
            raise ValueError(f"sigma must be finite and nonnegative, got {self.sigma}")
        if min(self.gamma, self.mu, self.delta) < 0:
            raise ValueError("gamma, mu and delta must be nonnegative")
        if self.kappa0 <= 0:
            raise ValueError("kappa0 must be positive")
        if self.kind is NoiseKind.NONE and (self.sigma, self.gamma, self.mu, self.delta) != (0, 0, 0, 0):
            raise ValueError("a noiseless model needs sigma = gamma = mu = delta = 0")
        if self.delta == 0 and self.mu != 0:
            raise ValueError("mu must be 0 when delta = 0")
        if self.delta > 0 and self.mu == 0:
            raise ValueError("mu must be positive when delta > 0")

    @property
    def l2_norm(self) -> float:
        """L2 norm of the unscaled error density (infinite for the noiseless model)."""
        if self.kind is NoiseKind.NONE:
            return math.inf
        return math.sqrt(_L2_NORM_SQ[self.kind])


def make_noise(kind: NoiseKind | str, sigma: float = 0.0) -> NoiseModel:
    """Preset model for a built-in kind; sigma = 0 always yields the noiseless model."""
    kind = NoiseKind(kind)
    if sigma == 0 or kind is NoiseKind.NONE:
        if kind is NoiseKind.NONE and sigma != 0:
            raise ValueError("the noiseless model has sigma = 0")
        return NoiseModel(NoiseKind.NONE, 0.0, **_PRESETS[NoiseKind.NONE])
    return NoiseModel(kind, float(sigma), **_PRESETS[kind])


def cf(model: NoiseModel, x):
    """Characteristic function of the unit error ``eps`` (not of ``sigma * eps``)."""
    x = np.asarray(x, dtype=float)
    if model.kind is NoiseKind.LAPLACE:
        return 1.0 / (1.0 + 0.5 * x * x)
    if model.kind is NoiseKind.GAUSSIAN:
        return np.exp(-0.5 * x * x)
    return np.ones_like(x)


def inverse_cf_scaled(model: NoiseModel, y, m: int):
    """``1 / f_eps^*(sigma * m * y)``, the deconvolution weight on [-pi, pi]."""
    y = np.asarray(y, dtype=float)
    s = model.sigma * m
    if model.kind is NoiseKind.LAPLACE:
        return 1.0 + 0.5 * (s * y) ** 2
    if model.kind is NoiseKind.GAUSSIAN:
        if 0.5 * (s * math.pi) ** 2 > _EXP_LIMIT:
            raise NoiseOverflowError(m)
        return np.exp(0.5 * (s * y) ** 2)
    return np.ones_like(y)


@lru_cache(maxsize=4096)
def gaussian_weight_integral(sigma: float, m: int) -> float:
    """``int_0^pi exp(sigma^2 m^2 x^2) dx`` by doubling Gauss-Legendre quadrature."""
    c = (sigma * m) ** 2
    if c * math.pi**2 > _EXP_LIMIT:
        raise NoiseOverflowError(m)
    return integrate_doubling(lambda x: np.exp(c * x * x), 0.0, math.pi)


def delta1(model: NoiseModel, m: int) -> float:
    """Variance proxy ``(m / 2pi) * int_{-pi}^{pi} |f_eps^*(m sigma x)|^-2 dx``."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if model.kind is NoiseKind.LAPLACE:
        a = (model.sigma * m * math.pi) ** 2
        return m * (1.0 + a / 3.0 + a * a / 20.0)
    if model.kind is NoiseKind.GAUSSIAN:
        return m * gaussian_weight_integral(model.sigma, m) / math.pi
    return float(m)


@dataclass(frozen=True)
class SmoothnessConstants:
    lambda1: float
    lambda2: float
    R: float
    penalty_exponent: float


def _r_factor(mu: float, delta: float, sigma: float) -> float:
    if delta == 0:
        return 1.0
    if delta <= 1:
        return 2.0 * mu * delta * sigma**delta
    return 2.0 * mu * sigma**delta


def smoothness_constants(model: NoiseModel) -> SmoothnessConstants:
    g, mu, d, k0, s = model.gamma, model.mu, model.delta, model.kappa0, model.sigma
    if d > 0 and mu == 0:
        raise ValueError("delta > 0 requires mu > 0")
    R = _r_factor(mu, d, s)
    if R <= 0:
        raise ValueError("R(mu, delta, sigma) vanishes; supersmooth noise needs sigma > 0")
    lam1 = (s**2 * math.pi**2 + 1.0) ** g / (math.pi**d * k0**2 * R)
    if d < 1.0 / 3.0:
        lam2 = 0.0
    elif d <= 1:
        lam2 = (math.sqrt(lam1) * (1.0 + s**2 * math.pi**2) ** (g / 2.0) * model.l2_norm
                / (k0 * math.sqrt(2.0 * math.pi)))
    else:
        lam2 = lam1
    expo = max(0.0, min(1.5 * d - 0.5, d))
    return SmoothnessConstants(lambda1=lam1, lambda2=lam2, R=R, penalty_exponent=expo)


def delta1_log_bound(model: NoiseModel, m: int) -> float:
    """Logarithm of the closed-form upper bound on ``delta1(model, m)``; finite even when the bound overflows."""
    g, mu, d, s = model.gamma, model.mu, model.delta, model.sigma
    R = _r_factor(mu, d, s)
    L = float(m)
    return ((1.0 - d) * math.log(math.pi * L) + g * math.log(s**2 * L**2 * math.pi**2 + 1.0)
            + 2.0 * mu * s**d * math.pi**d * L**d - math.log(math.pi * model.kappa0**2 * R))


def delta1_bound(model: NoiseModel, m: int) -> float:
    """Closed-form upper bound on ``delta1(model, m)``."""
    lb = delta1_log_bound(model, m)
    if lb > _EXP_LIMIT:
        raise NoiseOverflowError(m)
    return math.exp(lb)


def theoretical_m_max(model: NoiseModel, n: int) -> int:
    """Largest dimension allowed by the theory; tighter cap for delta > 1/3."""
    g, mu, d, s = model.gamma, model.mu, model.delta, model.sigma
    if d == 0:
        return int(math.floor(n ** (1.0 / (2.0 * g + 1.0)) / math.pi))
    c = 2.0 * mu * s**d
    log_term = math.log(n) / c
    extra = min(1.5 * d - 0.5, d) if d > 1.0 / 3.0 else 0.0
    inner = log_term + (2.0 * g + 1.0 - d + extra) / (d * c) * math.log(log_term) if log_term > 0 else 0.0
    if inner <= 0:
        return 0
    return int(math.floor(inner ** (1.0 / d) / math.pi))


def m_max(model: NoiseModel, n: int, user_cap: int | None = None,
          floor: int = 8, ceiling: int = 50) -> int:
    """Largest model dimension explored: the theoretical cap clamped into [floor, min(user_cap, ceiling)]."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    top = ceiling if user_cap is None else min(user_cap, ceiling)
    return max(1, min(max(theoretical_m_max(model, n), floor), top))
