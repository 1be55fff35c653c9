"""Spectral densities, Bose occupation and the bath rates entering the
Redfield dissipators.

Rate convention (used everywhere in the package): the full Fourier transform
of the bath autocorrelation is ``C(w) = 2*pi*J(w)*(n(w) + 1)`` and the rate is
its half, ``Gamma(w) = C(w) / 2``.  The argument ``w`` is the energy *released
into* the bath, so ``w > 0`` is emission and ``w < 0`` absorption.  Principal
value (Lamb shift) parts are dropped.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np


@dataclass(frozen=True)
class BrownianSpectrum:
    """Peaked spectral density of an unmapped bath.

    ``lam`` is the coupling energy, ``omega0`` the peak frequency and
    ``gamma`` the dimensionless width.
    """

    lam: float
    omega0: float
    gamma: float

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError(f"lam must be >= 0, got {self.lam}")
        if self.omega0 <= 0:
            raise ValueError(f"omega0 must be > 0, got {self.omega0}")
        if self.gamma <= 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")

    def density(self, omega):
        return j_brownian(omega, self)

    def reduced(self, omega):
        """J(w)/w, finite at w = 0 and even in w."""
        w = np.asarray(omega, dtype=float)
        om2 = self.omega0**2
        den = (w**2 - om2) ** 2 + (2 * np.pi * self.gamma * self.omega0 * w) ** 2
        return 4 * self.gamma * om2 * self.lam**2 / den


@dataclass(frozen=True)
class OhmicSpectrum:
    """Ohmic spectral density with exponential cutoff, ``gamma*w*exp(-|w|/cutoff)``."""

    gamma: float
    cutoff: float

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if self.cutoff <= 0:
            raise ValueError(f"cutoff must be > 0, got {self.cutoff}")

    def density(self, omega):
        return j_ohmic(omega, self)

    def reduced(self, omega):
        w = np.asarray(omega, dtype=float)
        return self.gamma * np.exp(-np.abs(w) / self.cutoff)


Spectrum = Union[BrownianSpectrum, OhmicSpectrum]


@dataclass(frozen=True)
class BathSpec:
    """One thermal contact: temperature, residual spectrum, and the label of
    the extended-system operator it couples to."""

    temperature: float
    residual: Spectrum
    coupling_op_id: str
    label: str = ""

    def __post_init__(self):
        if not self.temperature > 0:
            raise ValueError(f"temperature must be > 0, got {self.temperature}")
        if not self.label:
            object.__setattr__(self, "label", self.coupling_op_id)


def j_brownian(omega, s: BrownianSpectrum):
    w = np.asarray(omega, dtype=float)
    om2 = s.omega0**2
    num = 4 * s.gamma * w * om2 * s.lam**2
    den = (w**2 - om2) ** 2 + (2 * np.pi * s.gamma * s.omega0 * w) ** 2
    return num / den


def j_ohmic(omega, s: OhmicSpectrum):
    w = np.asarray(omega, dtype=float)
    return s.gamma * w * np.exp(-np.abs(w) / s.cutoff)


def bose_occupation(omega, T):
    """1/(exp(w/T) - 1).  Negative ``omega`` is allowed and gives -(1 + n(|w|))."""
    if T <= 0:
        raise ValueError(f"temperature must be > 0, got {T}")
    w = np.asarray(omega, dtype=float)
    with np.errstate(over="ignore"):
        return 1.0 / np.expm1(w / T)


def _thermal_factor(x):
    # x/(1 - exp(-x)); equals (w/T)(n+1) for x>0 and |x| n(|w|) for x<0, -> 1 at x=0
    x = np.asarray(x, dtype=float)
    out = np.ones_like(x)
    nz = x != 0
    with np.errstate(over="ignore"):
        out[nz] = x[nz] / -np.expm1(-x[nz])
    return out


def _log_thermal_factor(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    neg = x < 0
    xp = x[pos]
    out[pos] = np.log(xp) - np.log1p(-np.exp(-xp))
    xn = -x[neg]
    # log(|x| / (e^|x| - 1)) = log|x| - |x| - log(1 - e^-|x|)
    out[neg] = np.log(xn) - xn - np.log1p(-np.exp(-xn))
    return out


def bath_rate(omega, spectrum: Spectrum, temperature: float):
    """Gamma(w) for an arbitrary spectrum and temperature (see module docstring)."""
    w = np.asarray(omega, dtype=float)
    scalar = w.ndim == 0
    w = np.atleast_1d(w)
    rate = np.pi * temperature * spectrum.reduced(w) * _thermal_factor(w / temperature)
    return float(rate[0]) if scalar else rate


def rate_gamma(omega, bath: BathSpec):
    """Real half-Fourier rate of ``bath`` at released energy ``omega``.

    ``pi J(w)(n(w)+1)`` for w > 0, ``pi J(|w|) n(|w|)`` for w < 0 and the
    analytic limit ``pi T lim J(w)/w`` at w = 0 (``pi*gamma*T`` for Ohmic).
    """
    return bath_rate(omega, bath.residual, bath.temperature)


def log_rate_gamma(omega, bath: BathSpec):
    """log Gamma(w); stays finite where Gamma itself underflows (w << -700 T)."""
    w = np.asarray(omega, dtype=float)
    scalar = w.ndim == 0
    w = np.atleast_1d(w)
    T = bath.temperature
    out = np.log(np.pi * T * bath.residual.reduced(w)) + _log_thermal_factor(w / T)
    return float(out[0]) if scalar else out
