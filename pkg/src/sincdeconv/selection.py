"""Penalties and the data-driven choice of the model dimension."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .estimator import DEFAULT_KN, CoefficientSet, as_batch, coefficients, contrast
from .noise import (
    NoiseKind,
    NoiseModel,
    NoiseOverflowError,
    delta1,
    gaussian_weight_integral,
    m_max,
    smoothness_constants,
)

# models whose variance proxy delta1(m) / n exceeds this are never candidates
VARIANCE_CUTOFF = 1e3


class PenaltyMode(str, enum.Enum):
    THEORETICAL = "theoretical"
    PRACTICAL = "practical"


@dataclass(frozen=True)
class PenaltyConfig:
    mode: PenaltyMode = PenaltyMode.PRACTICAL
    a: float = 1.5

    def __post_init__(self):
        object.__setattr__(self, "mode", PenaltyMode(self.mode))
        if self.mode is PenaltyMode.THEORETICAL and not self.a > 1:
            raise ValueError(f"the theoretical penalty needs a > 1, got {self.a}")


@dataclass(frozen=True)
class ModelScore:
    m: int
    contrast: float
    pen: float

    @property
    def crit(self) -> float:
        return self.contrast + self.pen


@dataclass
class Selection:
    chosen: ModelScore
    scores: list[ModelScore]
    coefficients: dict[int, CoefficientSet] = field(repr=False)
    excluded: dict[int, str] = field(default_factory=dict)

    @property
    def m_hat(self) -> int:
        return self.chosen.m

    @property
    def estimate(self) -> CoefficientSet:
        return self.coefficients[self.chosen.m]


def _practical_penalty(model: NoiseModel, m: int, n: int) -> float:
    L = float(m)
    s2 = model.sigma**2
    base = 1.0 + math.log(L) ** 2.5 / L
    if model.kind is NoiseKind.LAPLACE:
        base += math.pi**2 * s2 * L**2 / 3.0 + math.pi**4 * s2**2 * L**4 / 20.0
        return 6.0 * math.pi * L / n * base
    if model.kind is NoiseKind.GAUSSIAN:
        base += math.pi**2 * s2 * L**2 / 3.0
        return 6.0 * math.pi * L / n * base * gaussian_weight_integral(model.sigma, m) / math.pi
    return 6.0 * math.pi * L / n * base


def _theoretical_penalty(model: NoiseModel, m: int, n: int, a: float) -> float:
    k = smoothness_constants(model)
    g, mu, d, s = model.gamma, model.mu, model.delta, model.sigma
    L = float(m)
    arg = 2.0 * mu * s**d * math.pi**d * L**d
    if arg > 709.0:
        raise NoiseOverflowError(m)
    big_gamma = L ** (2.0 * g + 1.0 - d) * math.exp(arg)
    return 2.0 * a * (k.lambda1 + mu * s**d * math.pi**d * k.lambda2) * L**k.penalty_exponent * big_gamma / n


def penalty(model: NoiseModel, m: int, n: int, cfg: PenaltyConfig | None = None) -> float:
    if m < 1 or n < 1:
        raise ValueError("m and n must be >= 1")
    cfg = cfg or PenaltyConfig()
    if cfg.mode is PenaltyMode.THEORETICAL:
        return _theoretical_penalty(model, m, n, cfg.a)
    return _practical_penalty(model, m, n)


def candidate_dimensions(model: NoiseModel, n: int, m_cap: int | None = None) -> tuple[list[int], dict[int, str]]:
    """Dimensions 1..m_max whose variance proxy stays representable and below the cutoff."""
    keep, dropped = [], {}
    for m in range(1, m_max(model, max(n, 2), m_cap) + 1):
        try:
            v = delta1(model, m) / n
        except NoiseOverflowError as exc:
            dropped[m] = str(exc)
            continue
        if v > VARIANCE_CUTOFF:
            dropped[m] = f"delta1(m)/n = {v:.3g} exceeds {VARIANCE_CUTOFF:g}"
        else:
            keep.append(m)
    return keep, dropped


def score_models(sample, model: NoiseModel, cfg: PenaltyConfig | None = None,
                 k_n: int = DEFAULT_KN, m_cap: int | None = None) -> Selection:
    batch = as_batch(sample)
    cfg = cfg or PenaltyConfig()
    ms, excluded = candidate_dimensions(model, batch.n, m_cap)
    scores, coefs = [], {}
    for m in ms:
        try:
            pen = penalty(model, m, batch.n, cfg)
        except NoiseOverflowError as exc:
            excluded[m] = str(exc)
            continue
        c = coefficients(batch, model, m, k_n)
        coefs[m] = c
        scores.append(ModelScore(m=m, contrast=contrast(c), pen=pen))
    if not scores:
        detail = "; ".join(f"m={m}: {why}" for m, why in sorted(excluded.items()))
        raise ValueError(f"every candidate dimension was excluded ({detail})")
    # strict < keeps the smallest m on ties
    best = scores[0]
    for s in scores[1:]:
        if s.crit < best.crit:
            best = s
    return Selection(chosen=best, scores=scores, coefficients=coefs, excluded=excluded)


def select(sample, model: NoiseModel, cfg: PenaltyConfig | None = None,
           k_n: int = DEFAULT_KN, m_cap: int | None = None) -> tuple[ModelScore, list[ModelScore]]:
    """Minimize contrast + penalty over the candidate dimensions."""
    sel = score_models(sample, model, cfg, k_n, m_cap)
    return sel.chosen, sel.scores
