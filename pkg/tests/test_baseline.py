import math

import numpy as np
import pytest

from oracles import rate_matrix_nullspace
from rcqme.baseline import (
    LadderRates,
    baseline_current,
    baseline_steady_populations,
    ladder_rates,
    run_baseline,
)
from rcqme.spectral import BrownianSpectrum

GAMMA = 0.0071 / math.pi
REF_LADDER = dict(eps=(0.0, 0.5, 1.0), T_hot=1.0, T_cold=0.5,
            spectrum_hot=BrownianSpectrum(0.1, 10.0, GAMMA),
            spectrum_cold=BrownianSpectrum(0.1, 10.0, GAMMA))


def test_cold_detailed_balance_example():
    r = ladder_rates(**REF_LADDER)
    assert r.k01_C / r.k10_C == pytest.approx(math.exp(-1), rel=1e-12)
    assert r.k12_H / r.k21_H == pytest.approx(math.exp(-0.5), rel=1e-12)


def test_cold_bath_freezes_out():
    r = ladder_rates(REF_LADDER["eps"], 1.0, 1e-4, REF_LADDER["spectrum_hot"], REF_LADDER["spectrum_cold"])
    assert r.k01_C == 0.0 and r.k10_C > 0


def test_rates_reject_negative():
    with pytest.raises(ValueError):
        LadderRates(-1.0, 1.0, 1.0, 1.0)


def test_equal_rates_uniform():
    p = baseline_steady_populations(LadderRates(2.0, 2.0, 2.0, 2.0))
    assert np.allclose(p, 1 / 3, atol=1e-15)


def test_vanishing_pump_empties_top():
    p = baseline_steady_populations(LadderRates(0.3, 1.0, 0.0, 0.8))
    assert p[2] == 0.0


def test_populations_match_nullspace():
    rng = np.random.default_rng(7)
    for _ in range(50):
        r = LadderRates(*rng.uniform(0.01, 5.0, 4))
        assert np.allclose(baseline_steady_populations(r), rate_matrix_nullspace(r.rate_matrix()),
                           rtol=0, atol=1e-12)


def test_equilibrium_is_gibbs():
    s = BrownianSpectrum(0.1, 10.0, GAMMA)
    eps = (0.0, 0.3, 1.1)
    p = baseline_steady_populations(ladder_rates(eps, 0.7, 0.7, s, s))
    g = np.exp(-np.array(eps) / 0.7)
    assert np.allclose(p, g / g.sum(), rtol=0, atol=1e-12)


def test_current_zero_reference_set():
    res = run_baseline(**REF_LADDER)
    assert abs(res["current"]) <= 1e-14
    assert sum(res["populations"]) == pytest.approx(1.0)


def test_current_zero_random_sets():
    rng = np.random.default_rng(11)
    rates = 10 ** rng.uniform(-4, 2, size=(10_000, 4))
    eps = (0.0, 0.5, 1.0)
    worst = 0.0
    for row in rates:
        r = LadderRates(*row)
        p = baseline_steady_populations(r)
        worst = max(worst, abs(baseline_current(r, p, eps)))
        # p0 k01 = p1 k10 = k10 k21 k01 / psi
        assert p[0] * r.k01_C == pytest.approx(p[1] * r.k10_C, rel=1e-12)
    assert worst <= 1e-14


def test_non_steady_current_positive():
    r = ladder_rates(**REF_LADDER)
    assert baseline_current(r, [1.0, 0.0, 0.0], REF_LADDER["eps"]) == pytest.approx(r.k01_C * 0.5)
    assert r.k01_C > 0
