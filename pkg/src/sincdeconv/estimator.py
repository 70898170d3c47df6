"""Projection estimator on the sinc spaces S_m spanned by sqrt(m) * sinc(m x - j), |j| <= k_n.

Coefficients are

    a_j = sqrt(m) / (2 pi) * int_{-pi}^{pi} exp(i j y) psi_n(m y) / f_eps^*(sigma m y) dy

where ``psi_n(t) = mean(exp(-i t Z))`` is the empirical characteristic function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .noise import NoiseKind, NoiseModel, inverse_cf_scaled
from .quadrature import QuadratureRule, panels_for, symmetric_rule

DEFAULT_KN = 256

# tolerances on the imaginary part of a coefficient, relative to max(1, max|a|)
IMAG_DISCARD_TOL = 1e-8
IMAG_FAIL_TOL = 1e-6

# chunk size (elements) for node x observation matrices
_CHUNK = 1 << 21


class NumericalFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class SampleBatch:
    z: np.ndarray

    def __post_init__(self):
        z = np.ascontiguousarray(self.z, dtype=float).ravel()
        if z.size == 0:
            raise ValueError("no observations")
        if not np.all(np.isfinite(z)):
            raise ValueError("observations must be finite")
        object.__setattr__(self, "z", z)

    @property
    def n(self) -> int:
        return self.z.size


def as_batch(sample) -> SampleBatch:
    return sample if isinstance(sample, SampleBatch) else SampleBatch(np.asarray(sample, dtype=float))


@dataclass(frozen=True, eq=False)
class CoefficientSet:
    m: int
    k_n: int
    a: np.ndarray
    imag_residue: float = field(default=0.0, compare=False)

    def __post_init__(self):
        if self.a.shape != (2 * self.k_n + 1,):
            raise ValueError(f"expected {2 * self.k_n + 1} coefficients, got shape {self.a.shape}")
        if not np.all(np.isfinite(self.a)):
            raise NumericalFailure(f"non-finite coefficient for m={self.m}")

    @property
    def indices(self) -> np.ndarray:
        return np.arange(-self.k_n, self.k_n + 1)

    def norm_sq(self) -> float:
        return float(np.dot(self.a, self.a))


def empirical_cf(sample, t) -> np.ndarray:
    """``mean_i exp(-i t Z_i)`` for every t."""
    z = as_batch(sample).z
    t = np.asarray(t, dtype=float)
    flat = t.ravel()
    out = np.empty(flat.size, dtype=complex)
    step = max(1, _CHUNK // z.size)
    for s in range(0, flat.size, step):
        phase = np.multiply.outer(flat[s:s + step], z)
        out[s:s + step] = np.cos(phase).mean(axis=1) - 1j * np.sin(phase).mean(axis=1)
    return out.reshape(t.shape)


def default_rule(k_n: int, m: int, zmax: float) -> QuadratureRule:
    return symmetric_rule(panels_for(k_n, m, zmax), order=8)


def compute_coefficients(sample, model: NoiseModel, m: int, k_n: int = DEFAULT_KN,
                         rule: QuadratureRule | None = None) -> CoefficientSet:
    """Coefficients by quadrature against the empirical characteristic function.

    The empirical CF is evaluated once on the rule's nodes; every coefficient is
    then a weighted trigonometric sum over those nodes.
    """
    if m < 1 or k_n < 1:
        raise ValueError("m and k_n must be >= 1")
    batch = as_batch(sample)
    if rule is None:
        rule = default_rule(k_n, m, float(np.max(np.abs(batch.z))))
    y, w = rule.nodes, rule.weights
    f = w * empirical_cf(batch, m * y) * inverse_cf_scaled(model, y, m)
    j = np.arange(-k_n, k_n + 1)
    re = np.empty(j.size)
    im = np.empty(j.size)
    step = max(1, _CHUNK // y.size)
    for s in range(0, j.size, step):
        jy = np.multiply.outer(j[s:s + step], y)
        c, sn = np.cos(jy), np.sin(jy)
        re[s:s + step] = c @ f.real - sn @ f.imag
        im[s:s + step] = c @ f.imag + sn @ f.real
    scale = math.sqrt(m) / (2.0 * math.pi)
    re *= scale
    im *= scale
    residue = float(np.max(np.abs(im)) / max(1.0, np.max(np.abs(re))))
    if residue > IMAG_FAIL_TOL:
        raise NumericalFailure(f"imaginary residue {residue:.3g} in coefficients for m={m}")
    return CoefficientSet(m=m, k_n=k_n, a=re, imag_residue=residue)


_SERIES_CUT = 1.0
_SERIES_TERMS = 18


def _series(omega: np.ndarray, power: int) -> np.ndarray:
    """``int_{-pi}^{pi} y**power cos(omega y) dy`` as a power series in omega (power even)."""
    out = np.zeros_like(omega)
    w2 = omega * omega
    term_pow = np.ones_like(omega)
    for k in range(_SERIES_TERMS):
        coef = (-1) ** k * 2.0 * math.pi ** (2 * k + power + 1) / (math.factorial(2 * k) * (2 * k + power + 1))
        out += coef * term_pow
        term_pow = term_pow * w2
    return out


def laplace_kernel(omega: np.ndarray, b: float, sin_pw=None, cos_pw=None) -> np.ndarray:
    """``int_{-pi}^{pi} exp(i omega y) (1 + b y^2) dy`` in closed form.

    ``sin_pw``/``cos_pw`` may carry precomputed sin(pi omega) and cos(pi omega).
    """
    omega = np.asarray(omega, dtype=float)
    if sin_pw is None:
        sin_pw = np.sin(math.pi * omega)
    if cos_pw is None:
        cos_pw = np.cos(math.pi * omega)
    small = np.abs(omega) < _SERIES_CUT
    w = np.where(small, 1.0, omega)
    inv = 1.0 / w
    i0 = 2.0 * sin_pw * inv
    i2 = (2.0 * math.pi**2 * sin_pw * inv + 4.0 * math.pi * cos_pw * inv * inv
          - 4.0 * sin_pw * inv * inv * inv)
    out = i0 + b * i2
    if np.any(small):
        ws = omega[small]
        out[small] = _series(ws, 0) + b * _series(ws, 2)
    return out


def laplace_closed_form_coefficients(sample, sigma: float, m: int, k_n: int = DEFAULT_KN) -> CoefficientSet:
    """Exact coefficients for Laplace noise, where 1/f_eps^* is the polynomial 1 + (sigma m y)^2 / 2."""
    if sigma <= 0:
        raise ValueError("the Laplace closed form needs sigma > 0")
    if m < 1 or k_n < 1:
        raise ValueError("m and k_n must be >= 1")
    z = as_batch(sample).z
    b = 0.5 * (sigma * m) ** 2
    j = np.arange(-k_n, k_n + 1)
    parity = np.where(j % 2 == 0, 1.0, -1.0)
    # sin(pi(j - mz)) = -(-1)^j sin(pi m z), cos(pi(j - mz)) = (-1)^j cos(pi m z)
    s = np.sin(math.pi * m * z)
    c = np.cos(math.pi * m * z)
    total = np.zeros(j.size)
    step = max(1, _CHUNK // j.size)
    for st in range(0, z.size, step):
        zz = z[st:st + step]
        omega = j[None, :] - m * zz[:, None]
        sin_pw = -parity[None, :] * s[st:st + step, None]
        cos_pw = parity[None, :] * c[st:st + step, None]
        total += laplace_kernel(omega, b, sin_pw, cos_pw).sum(axis=0)
    a = total * math.sqrt(m) / (2.0 * math.pi * z.size)
    return CoefficientSet(m=m, k_n=k_n, a=a)


def coefficients(sample, model: NoiseModel, m: int, k_n: int = DEFAULT_KN) -> CoefficientSet:
    """Fastest exact route for the given noise: closed form for Laplace, quadrature otherwise."""
    if model.kind is NoiseKind.LAPLACE:
        return laplace_closed_form_coefficients(sample, model.sigma, m, k_n)
    if model.kind is NoiseKind.NONE:
        return direct_projection(sample, m, k_n)
    return compute_coefficients(sample, model, m, k_n)


def direct_projection(sample, m: int, k_n: int = DEFAULT_KN) -> CoefficientSet:
    """Noiseless coefficients ``mean_i sqrt(m) sinc(m Z_i - j)``."""
    z = as_batch(sample).z
    j = np.arange(-k_n, k_n + 1)
    total = np.zeros(j.size)
    step = max(1, _CHUNK // j.size)
    for st in range(0, z.size, step):
        total += np.sinc(m * z[st:st + step, None] - j[None, :]).sum(axis=0)
    return CoefficientSet(m=m, k_n=k_n, a=total * math.sqrt(m) / z.size)


def contrast(c: CoefficientSet) -> float:
    """Empirical contrast of the fitted projection, ``-sum_j a_j^2``."""
    return -c.norm_sq()


def evaluate(c: CoefficientSet, grid) -> np.ndarray:
    x = np.asarray(grid, dtype=float)
    flat = x.ravel()
    out = np.empty(flat.size)
    j = c.indices
    step = max(1, _CHUNK // j.size)
    for s in range(0, flat.size, step):
        out[s:s + step] = np.sinc(c.m * flat[s:s + step, None] - j[None, :]) @ c.a
    return (math.sqrt(c.m) * out).reshape(x.shape)
