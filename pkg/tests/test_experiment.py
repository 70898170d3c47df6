import math

import numpy as np
import pytest
from scipy import special

from sincdeconv.estimator import coefficients
from sincdeconv.experiment import (
    ExperimentFailed,
    ExperimentSpec,
    ise,
    ise_grid,
    ise_values,
    misspecification,
    misspecification_ratio,
    reported_estimate,
    rng_for,
    run_experiment,
    simulate_observations,
)
from sincdeconv.noise import make_noise


def test_ise_of_exact_density_is_zero():
    grid = ise_grid("gauss", 512)
    assert ise_values(np.exp(-grid**2 / 2) / math.sqrt(2 * math.pi), "gauss", grid) == pytest.approx(0.0, abs=1e-30)


def test_ise_of_zero_estimate():
    grid = ise_grid("e", 512)
    oracle = special.erf(4.0) / (2 * math.sqrt(math.pi))
    assert ise_values(np.zeros(512), "e", grid) == pytest.approx(oracle, rel=1e-6)
    assert oracle == pytest.approx(0.28203, abs=1e-4)


def test_ise_reporting_scale():
    # the chi-square target is scored as the density of sqrt(6) X on [-1, 16]
    grid = ise_grid("a", 4096)
    from scipy import stats

    expected = np.trapezoid(stats.chi2.pdf(grid, 3) ** 2, grid)
    assert ise_values(np.zeros_like(grid), "a", grid) == pytest.approx(expected, rel=1e-12)


def test_ise_grid_convergence():
    spec = ExperimentSpec("c", "laplace", 10, 500, reps=1)
    c = coefficients(simulate_observations(spec, 0), make_noise("laplace", spec.sigma), 2)
    coarse, fine = ise(c, "c", 512), ise(c, "c", 4096)
    assert abs(coarse - fine) < 0.01 * fine


def test_reported_estimate_unit_scale_is_plain_evaluation():
    spec = ExperimentSpec("e", "laplace", 4, 200, reps=1)
    c = coefficients(simulate_observations(spec, 3), make_noise("laplace", spec.sigma), 1)
    grid = ise_grid("e", 64)
    from sincdeconv.estimator import evaluate

    np.testing.assert_array_equal(reported_estimate(c, "e", grid), evaluate(c, grid))


def test_rng_streams_depend_only_on_seed_and_rep():
    a = rng_for(5, 3).random(4)
    assert a.tobytes() == rng_for(5, 3).random(4).tobytes()
    assert a.tobytes() != rng_for(5, 4).random(4).tobytes()
    assert a.tobytes() != rng_for(6, 3).random(4).tobytes()


def test_spec_validation():
    with pytest.raises(ValueError):
        ExperimentSpec("a", "laplace", 0.0, 100)
    with pytest.raises(ValueError):
        ExperimentSpec("a", "laplace", 2, 1)
    with pytest.raises(ValueError):
        ExperimentSpec("a", "laplace", 2, 100, seed=-1)
    assert ExperimentSpec("a", "gaussian", 4, 100).sigma == 0.5


def test_single_rep_is_reproducible():
    spec = ExperimentSpec("a", "laplace", 2, 100, reps=1, seed=7)
    s1, s2 = run_experiment(spec, workers=1), run_experiment(spec, workers=1)
    assert s1 == s2
    assert s1.mean_ise == s1.median_ise == s1.ises[0]
    assert s1.sd_ise == 0.0


def test_worker_count_does_not_change_results():
    spec = ExperimentSpec("f", "laplace", 100, 300, reps=12, seed=3)
    one = run_experiment(spec, workers=1)
    many = run_experiment(spec, workers=3)
    assert one.ises.tobytes() == many.ises.tobytes()
    assert one.selected_m_histogram == many.selected_m_histogram


def test_fixed_m_tracking():
    spec = ExperimentSpec("c", "laplace", 10, 200, reps=6, track_fixed_m=True)
    st = run_experiment(spec, workers=1)
    assert set(st.fixed_m_mise) == set(range(1, 9))
    assert min(st.fixed_m_mise.values()) <= st.mean_ise + 1e-15 or st.mean_ise > 0
    assert sum(st.selected_m_histogram.values()) == 6


def test_modal_m_prefers_smaller_on_ties():
    spec = ExperimentSpec("a", "laplace", 2, 100, reps=2)
    st = run_experiment(spec, workers=1)
    st.selected_m_histogram = {1: 3, 2: 3}
    assert st.modal_m == 1


def test_misspecification_with_true_noise_is_one():
    spec = ExperimentSpec("b", "laplace", 2, 200, reps=4, assumed_noise="laplace")
    assert misspecification_ratio(spec, workers=1) == 1.0


def test_misspecification_shares_streams():
    spec = ExperimentSpec("b", "gaussian", 4, 200, reps=4, assumed_noise="laplace")
    res = misspecification(spec, workers=1)
    assert res.correct.spec.estimation_noise.value == "gaussian"
    assert res.assumed.spec.estimation_noise.value == "laplace"
    assert res.ratio == res.assumed.mean_ise / res.correct.mean_ise
    with pytest.raises(ValueError):
        misspecification(ExperimentSpec("b", "gaussian", 4, 200, reps=1), workers=1)


def test_too_many_failures_abort(monkeypatch):
    from sincdeconv import experiment

    monkeypatch.setattr(experiment, "_replicate", lambda spec, rep: None)
    with pytest.raises(ExperimentFailed):
        run_experiment(ExperimentSpec("a", "laplace", 2, 100, reps=3), workers=1)
