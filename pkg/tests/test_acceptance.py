"""End-to-end acceptance checks; each prints one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` or directly as a script.
Worker processes default to the CPU count, capped by DECONV_THREADS.
"""

import math

import numpy as np
import pytest
from numpy.polynomial.legendre import leggauss

from sincdeconv import csvio
from sincdeconv.estimator import (
    coefficients,
    compute_coefficients,
    contrast,
    laplace_closed_form_coefficients,
)
from sincdeconv.experiment import ExperimentSpec, misspecification, run_experiment
from sincdeconv.noise import cf, delta1, delta1_log_bound, make_noise
from sincdeconv.quadrature import symmetric_rule

REPS = 500

# (density, noise, n, s2n) -> published mean ISE x 100
MISE_CELLS = {
    ("a", "laplace", 100, 2): 2.02,
    ("a", "gaussian", 250, 10): 1.11,
    ("b", "laplace", 2500, 1000): 0.284,
    ("c", "laplace", 100, 4): 0.79,
    ("c", "gaussian", 500, 10): 0.11,
    ("f", "laplace", 1000, 100): 0.0866,
}


def report(name, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} {name}: {detail}"
    print(line, flush=True)
    return line


@pytest.fixture
def say(capsys):
    def _say(name, ok, detail):
        with capsys.disabled():
            print()
            report(name, ok, detail)
    return _say


def rel_ok(value, target, tol):
    return abs(value / target - 1) <= tol


def check_mise_cells():
    parts, ok = [], True
    for (d, noise, n, s2n), target in MISE_CELLS.items():
        st = run_experiment(ExperimentSpec(d, noise, s2n, n, reps=REPS))
        got = 100 * st.mean_ise
        good = rel_ok(got, target, 0.30)
        ok &= good
        parts.append(f"({d},{noise[:3]},n={n},s2n={s2n}) {got:.4g} vs {target} {'ok' if good else 'off'}")
    return ok, "; ".join(parts)


def check_medians():
    parts, ok = [], True
    for noise, target in (("laplace", 0.014), ("gaussian", 0.016)):
        st = run_experiment(ExperimentSpec("a", noise, 4, 100, reps=REPS))
        good = rel_ok(st.median_ise, target, 0.30)
        ok &= good
        parts.append(f"{noise} median {st.median_ise:.4g} vs {target}")
    return ok, "; ".join(parts)


def check_misspecification():
    parts, ok = [], True
    for noise, assumed, target in (("laplace", "gaussian", 1.6), ("gaussian", "laplace", 1.4)):
        res = misspecification(ExperimentSpec("b", noise, 2, 1000, reps=REPS, assumed_noise=assumed))
        good = rel_ok(res.ratio, target, 0.35)
        ok &= good
        parts.append(f"true {noise} assumed {assumed}: ratio {res.ratio:.3g} vs {target} "
                     f"(MISE {res.correct.mean_ise:.4g} -> {res.assumed.mean_ise:.4g})")
    return ok, "; ".join(parts)


def check_selected_dimension():
    st = run_experiment(ExperimentSpec("a", "laplace", 10, 750, reps=200))
    return st.modal_m == 2, f"modal m_hat {st.modal_m}, histogram {st.selected_m_histogram}"


def _gl(a, b, panels, order=16):
    x, w = leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    h = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    return (mid[:, None] + h[:, None] * x).ravel(), (h[:, None] * w).ravel()


def _direct_contrast(c, z, model):
    u, w = _gl(-math.pi * c.m, math.pi * c.m, 400)
    t_star = np.exp(1j * np.outer(u, c.indices) / c.m) @ c.a / math.sqrt(c.m)
    norm_sq = np.dot(w, np.abs(t_star) ** 2) / (2 * math.pi)
    weight = t_star / cf(model, model.sigma * u)
    u_vals = np.array([np.dot(w, np.exp(-1j * zi * u) * weight).real for zi in z]) / (2 * math.pi)
    return norm_sq - 2 * u_vals.mean()


def check_exact_math():
    rng = np.random.default_rng(20)
    worst = {}

    # noiseless coefficients are plain sinc averages
    err = 0.0
    none = make_noise("none")
    for _ in range(100):
        z = rng.standard_normal(int(rng.integers(1, 30))) * 2
        m = int(rng.integers(1, 5))
        direct = math.sqrt(m) * np.sinc(m * z[:, None] - np.arange(-32, 33)).mean(axis=0)
        err = max(err, np.max(np.abs(compute_coefficients(z, none, m, 32).a - direct)))
    worst["noiseless"] = (err, err <= 1e-8)

    # squared coefficients of a single observation sum to delta1
    reach, excess = 1.0, 0.0
    for z0 in (0.0, 0.37, 5.0):
        for m in (1, 2, 4):
            a = laplace_closed_form_coefficients([z0], 1.0, m, 4096).a
            sq = a * a
            partial = np.cumsum(np.concatenate([[sq[4096]], sq[4097:] + sq[:4096][::-1]]))
            d1 = delta1(make_noise("laplace", 1.0), m)
            reach = min(reach, partial[-1] / d1)
            excess = max(excess, np.max(partial) / d1 - 1)
    worst["parseval"] = (f"reach {reach:.5f}, excess {excess:.2e}", reach >= 0.99 and excess <= 1e-6)

    # closed-form bound on delta1, in logs so the Gaussian case cannot overflow
    from scipy import special

    ok = True
    for sigma in (0.5, 1.0):
        for m in range(1, 21):
            lap = make_noise("laplace", sigma)
            ok &= math.log(delta1(lap, m)) <= delta1_log_bound(lap, m)
            c = (sigma * m) ** 2
            log_d1 = math.log(m / math.pi) + c * math.pi**2 + math.log(special.dawsn(math.sqrt(c) * math.pi) / math.sqrt(c))
            ok &= log_d1 <= delta1_log_bound(make_noise("gaussian", sigma), m)
    worst["bound"] = ("m=1..20", ok)

    z = rng.standard_normal(50) + rng.laplace(size=50) / 2
    err = 0.0
    for sigma, m in ((1.0, 2), (0.5, 1), (0.3, 5)):
        dense = compute_coefficients(z, make_noise("laplace", sigma), m, 64, rule=symmetric_rule(8192))
        err = max(err, np.max(np.abs(laplace_closed_form_coefficients(z, sigma, m, 64).a - dense.a)))
    worst["closed form"] = (err, err <= 1e-8)

    err = 0.0
    for kind, sigma, m in (("laplace", 0.5, 2), ("gaussian", 0.4, 2)):
        model = make_noise(kind, sigma)
        c = coefficients(z, model, m, 48)
        err = max(err, abs(contrast(c) - _direct_contrast(c, z, model)))
    worst["contrast"] = (err, err <= 1e-8)

    ok = all(v[1] for v in worst.values())
    detail = "; ".join(f"{k} {v[0]:.2e}" if isinstance(v[0], float) else f"{k} {v[0]}" for k, v in worst.items())
    return ok, detail


def check_oracle():
    st = run_experiment(ExperimentSpec("c", "laplace", 10, 500, reps=REPS, track_fixed_m=True))
    best_m = min(st.fixed_m_mise, key=st.fixed_m_mise.get)
    ratio = st.mean_ise / st.fixed_m_mise[best_m]
    return ratio <= 2.5, f"selected MISE {st.mean_ise:.4g}, best fixed m={best_m} {st.fixed_m_mise[best_m]:.4g}, ratio {ratio:.3f}"


def check_determinism():
    spec = ExperimentSpec("c", "laplace", 4, 250, reps=24, seed=2024)
    texts = {w: csvio.write_results(run_experiment(spec, workers=w)) for w in (1, 4, 8)}
    again = csvio.write_results(run_experiment(spec, workers=1))
    ok = len(set(texts.values())) == 1 and again == texts[1]
    return ok, "identical CSV across 1/4/8 workers and reruns" if ok else "CSV differs"


CRITERIA = [
    ("criterion 1 (MISE table cells within 30%)", check_mise_cells),
    ("criterion 2 (median ISE within 30%)", check_medians),
    ("criterion 3 (misspecification ratios within 35%)", check_misspecification),
    ("criterion 4 (modal selected dimension is 2)", check_selected_dimension),
    ("criterion 5 (exact-math suite)", check_exact_math),
    ("criterion 6 (selected MISE within 2.5x of best fixed m)", check_oracle),
    ("criterion 7 (determinism across workers)", check_determinism),
]


@pytest.mark.parametrize("name,check", CRITERIA, ids=[f"criterion{i + 1}" for i in range(len(CRITERIA))])
def test_criterion(name, check, say):
    ok, detail = check()
    say(name, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    for name, check in CRITERIA:
        report(name, *check())
