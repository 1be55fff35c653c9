"""Second-order population rate equation for the bare three-level ladder.

Rates are built from the unmapped (Brownian) spectral densities at the bare
transition frequencies.  ``k_{i->j} = 2 Gamma(eps_i - eps_j)``: the released
energy is negative for upward jumps, which then carry the Bose factor n.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from rcqme.spectral import BrownianSpectrum, bath_rate


@dataclass(frozen=True)
class LadderRates:
    k01_C: float
    k10_C: float
    k12_H: float
    k21_H: float

    def __post_init__(self):
        for name, v in asdict(self).items():
            if not v >= 0:
                raise ValueError(f"rate {name} must be >= 0, got {v}")

    def as_array(self):
        return np.array([self.k01_C, self.k10_C, self.k12_H, self.k21_H])

    def rate_matrix(self):
        """D_C + D_H acting on (p0, p1, p2)."""
        return np.array(
            [
                [-self.k01_C, self.k10_C, 0.0],
                [self.k01_C, -self.k10_C - self.k12_H, self.k21_H],
                [0.0, self.k12_H, -self.k21_H],
            ]
        )


def ladder_rates(eps, T_hot, T_cold, spectrum_hot: BrownianSpectrum,
                 spectrum_cold: BrownianSpectrum) -> LadderRates:
    e0, e1, e2 = (float(e) for e in eps)
    if not e0 <= e1 <= e2:
        raise ValueError(f"level energies must be ordered, got {eps}")
    w10 = e1 - e0
    w21 = e2 - e1
    return LadderRates(
        k01_C=2 * bath_rate(-w10, spectrum_cold, T_cold),
        k10_C=2 * bath_rate(w10, spectrum_cold, T_cold),
        k12_H=2 * bath_rate(-w21, spectrum_hot, T_hot),
        k21_H=2 * bath_rate(w21, spectrum_hot, T_hot),
    )


def baseline_steady_populations(rates: LadderRates):
    k01, k10, k12, k21 = rates.k01_C, rates.k10_C, rates.k12_H, rates.k21_H
    psi = k01 * k12 + k01 * k21 + k10 * k21
    if psi == 0:
        raise ValueError("rate set has no unique steady state (normalization is zero)")
    return np.array([k10 * k21, k01 * k21, k01 * k12]) / psi


def baseline_current(rates: LadderRates, populations, eps) -> float:
    """Heat current from the cold bath, (p0 k01 - p1 k10)(eps1 - eps0)."""
    p0, p1 = populations[0], populations[1]
    return float((p0 * rates.k01_C - p1 * rates.k10_C) * (eps[1] - eps[0]))


def run_baseline(eps, T_hot, T_cold, spectrum_hot, spectrum_cold) -> dict:
    rates = ladder_rates(eps, T_hot, T_cold, spectrum_hot, spectrum_cold)
    pops = baseline_steady_populations(rates)
    return {
        "rates": asdict(rates),
        "populations": [float(p) for p in pops],
        "current": baseline_current(rates, pops, eps),
    }
