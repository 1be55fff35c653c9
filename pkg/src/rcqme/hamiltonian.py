"""Extended-system Hamiltonians (system plus one reaction coordinate per bath).

Tensor-factor ordering is fixed to ``system (x) RC_L (x) RC_R`` everywhere, see
``FACTOR_ORDER``.  The L reaction coordinate belongs to the hot bath and the R
one to the cold bath.  The residual-bath counter-term quadratic in the RC
displacement is not part of the simulated extended system.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Union

import numpy as np

FACTOR_ORDER = ("system", "L", "R")

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

LOG_FLOOR = -30.0


def boson_ladder(M: int):
    """Truncated annihilation and creation operators on ``M`` Fock levels."""
    if M < 2:
        raise ValueError(f"need at least 2 levels, got M={M}")
    a = np.diag(np.sqrt(np.arange(1, M, dtype=float)), k=1).astype(complex)
    return a, a.T.copy()


def sigma_theta(theta: float):
    return math.cos(theta) * SIGMA_Z + math.sin(theta) * SIGMA_X


def _check_rc(lambda_L, lambda_R, omega_L, omega_R, M):
    if M < 2:
        raise ValueError(f"M must be >= 2, got {M}")
    if omega_L <= 0 or omega_R <= 0:
        raise ValueError("RC frequencies must be > 0")
    if lambda_L < 0 or lambda_R < 0:
        raise ValueError("RC couplings must be >= 0")


@dataclass(frozen=True)
class SpinBosonModel:
    """Generalized spin-boson model; the cold bath couples through
    ``cos(theta) sz + sin(theta) sx``."""

    delta: float = 0.1
    theta: float = math.pi / 2
    lambda_L: float = 0.01
    lambda_R: float = 0.01
    omega_L: float = 10.0
    omega_R: float = 10.0
    M: int = 4

    variant = "spin_boson"
    n_sys = 2

    def __post_init__(self):
        _check_rc(self.lambda_L, self.lambda_R, self.omega_L, self.omega_R, self.M)
        if not 0.0 <= self.theta <= math.pi / 2 + 1e-12:
            raise ValueError(f"theta must lie in [0, pi/2], got {self.theta}")


@dataclass(frozen=True)
class LadderModel:
    """Three-level ladder; the hot bath drives 1<->2, the cold bath 0<->1."""

    eps: tuple = (0.0, 0.5, 1.0)
    lambda_L: float = 0.01
    lambda_R: float = 0.01
    omega_L: float = 10.0
    omega_R: float = 10.0
    M: int = 5

    variant = "ladder"
    n_sys = 3

    def __post_init__(self):
        _check_rc(self.lambda_L, self.lambda_R, self.omega_L, self.omega_R, self.M)
        object.__setattr__(self, "eps", tuple(float(e) for e in self.eps))
        if len(self.eps) != 3:
            raise ValueError("ladder needs exactly three level energies")
        e0, e1, e2 = self.eps
        if not e0 <= e1 <= e2:
            raise ValueError(f"level energies must be ordered, got {self.eps}")

    @property
    def delta(self):
        return self.eps[1]


ModelSpec = Union[SpinBosonModel, LadderModel]


@dataclass(frozen=True)
class ExtendedSystem:
    spec: ModelSpec
    hamiltonian: np.ndarray
    coupling_ops: dict
    eigenvalues: Optional[np.ndarray] = None
    eigenvectors: Optional[np.ndarray] = None
    coupling_ops_eigen: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    @property
    def is_diagonalized(self) -> bool:
        return self.eigenvalues is not None


def _embed(sys_op, op_L, op_R):
    return np.kron(np.kron(sys_op, op_L), op_R)


def _rc_terms(spec, n_sys):
    """Bare RC energies and the RC displacement operators in the full space."""
    a, ad = boson_ladder(spec.M)
    I_s = np.eye(n_sys)
    I_m = np.eye(spec.M)
    num = ad @ a
    x = a + ad
    h_rc = spec.omega_L * _embed(I_s, num, I_m) + spec.omega_R * _embed(I_s, I_m, num)
    return h_rc, x, I_m


def build_sb_rc(spec: SpinBosonModel) -> ExtendedSystem:
    h_rc, x, I_m = _rc_terms(spec, 2)
    H = (spec.delta / 2) * _embed(SIGMA_Z, I_m, I_m) + h_rc
    H = H + spec.lambda_L * _embed(SIGMA_X, x, I_m)
    H = H + spec.lambda_R * _embed(sigma_theta(spec.theta), I_m, x)
    I_s = np.eye(2)
    ops = {"L": _embed(I_s, x, I_m), "R": _embed(I_s, I_m, x)}
    return ExtendedSystem(spec=spec, hamiltonian=_hermitize(H), coupling_ops=ops)


def ladder_operators():
    """Hot (1<->2) and cold (0<->1) transition operators of the bare ladder."""
    s_hot = np.zeros((3, 3), dtype=complex)
    s_hot[1, 2] = s_hot[2, 1] = 1
    s_cold = np.zeros((3, 3), dtype=complex)
    s_cold[0, 1] = s_cold[1, 0] = 1
    return s_hot, s_cold


def build_ladder_rc(spec: LadderModel) -> ExtendedSystem:
    h_rc, x, I_m = _rc_terms(spec, 3)
    s_hot, s_cold = ladder_operators()
    h_sys = np.diag(np.asarray(spec.eps, dtype=complex))
    h_sys = h_sys + s_hot @ s_hot * (spec.lambda_L**2 / spec.omega_L)
    h_sys = h_sys + s_cold @ s_cold * (spec.lambda_R**2 / spec.omega_R)
    H = _embed(h_sys, I_m, I_m) + h_rc
    H = H + spec.lambda_L * _embed(s_hot, x, I_m)
    H = H + spec.lambda_R * _embed(s_cold, I_m, x)
    I_s = np.eye(3)
    ops = {"L": _embed(I_s, x, I_m), "R": _embed(I_s, I_m, x)}
    return ExtendedSystem(spec=spec, hamiltonian=_hermitize(H), coupling_ops=ops)


def build_extended(spec: ModelSpec) -> ExtendedSystem:
    """Build and diagonalize the extended system for either model."""
    if isinstance(spec, SpinBosonModel):
        ext = build_sb_rc(spec)
    elif isinstance(spec, LadderModel):
        ext = build_ladder_rc(spec)
    else:
        raise TypeError(f"unknown model spec {type(spec).__name__}")
    return diagonalize(ext)


def _hermitize(H):
    return 0.5 * (H + H.conj().T)


def diagonalize(ext: ExtendedSystem) -> ExtendedSystem:
    H = ext.hamiltonian
    if not np.allclose(H, H.conj().T, rtol=0, atol=1e-12):
        raise ValueError("Hamiltonian is not Hermitian")
    try:
        evals, evecs = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"eigensolver failed for D={ext.dim}: {exc}") from exc
    eigen_ops = {}
    for key, op in ext.coupling_ops.items():
        s = evecs.conj().T @ op @ evecs
        eigen_ops[key] = 0.5 * (s + s.conj().T)
    return replace(ext, eigenvalues=evals, eigenvectors=evecs, coupling_ops_eigen=eigen_ops)


@dataclass(frozen=True)
class PolaronParams:
    renorm_delta: float
    renorm_delta_left: float
    superexchange: float
    dressing_factors: dict


def polaron_params(spec: SpinBosonModel) -> PolaronParams:
    """Effective parameters after small-polaron dressing of the RCs.

    ``renorm_delta`` dresses the splitting with both RCs (theta = pi/2 case),
    ``renorm_delta_left`` with the L one only (theta = 0 case).
    """
    dress = {
        "L": math.exp(-spec.lambda_L**2 / (2 * spec.omega_L**2)),
        "R": math.exp(-spec.lambda_R**2 / (2 * spec.omega_R**2)),
    }
    return PolaronParams(
        renorm_delta=spec.delta * dress["L"] * dress["R"],
        renorm_delta_left=spec.delta * dress["L"],
        superexchange=spec.lambda_L * spec.lambda_R / spec.omega_L,
        dressing_factors=dress,
    )


def _require_diag(ext):
    if not ext.is_diagonalized:
        raise ValueError("extended system must be diagonalized first")


def export_spectrum(ext: ExtendedSystem) -> list[dict]:
    _require_diag(ext)
    return [{"n": n, "E_n": float(e)} for n, e in enumerate(ext.eigenvalues)]


def export_coupling_map(ext: ExtendedSystem, bath: str) -> np.ndarray:
    """log10 |<n|S|m>| in the eigenbasis, floored at ``LOG_FLOOR``."""
    _require_diag(ext)
    mag = np.abs(ext.coupling_ops_eigen[bath])
    with np.errstate(divide="ignore"):
        out = np.log10(mag)
    return np.maximum(out, LOG_FLOOR)


def coupling_map_records(cmap: np.ndarray) -> list[dict]:
    n, m = np.indices(cmap.shape)
    return [
        {"n": int(i), "m": int(j), "log10_abs": float(v)}
        for i, j, v in zip(n.ravel(), m.ravel(), cmap.ravel())
    ]
