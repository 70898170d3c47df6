"""Adaptive density deconvolution with sinc projection estimators and penalized model selection."""

from .densities import DENSITIES, TargetDensity, get_density
from .estimator import (
    CoefficientSet,
    NumericalFailure,
    SampleBatch,
    coefficients,
    contrast,
    empirical_cf,
    evaluate,
)
from .experiment import ExperimentSpec, SummaryStats, misspecification_ratio, run_experiment
from .noise import NoiseKind, NoiseModel, cf, delta1, m_max, make_noise, smoothness_constants
from .selection import PenaltyConfig, PenaltyMode, penalty, score_models, select

__all__ = [
    "DENSITIES", "TargetDensity", "get_density",
    "CoefficientSet", "NumericalFailure", "SampleBatch", "coefficients", "contrast", "empirical_cf", "evaluate",
    "ExperimentSpec", "SummaryStats", "misspecification_ratio", "run_experiment",
    "NoiseKind", "NoiseModel", "cf", "delta1", "m_max", "make_noise", "smoothness_constants",
    "PenaltyConfig", "PenaltyMode", "penalty", "score_models", "select",
]
