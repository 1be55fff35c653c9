"""Non-secular Redfield generator in the extended-system eigenbasis, its
steady state, and per-contact heat currents.

For a coupling operator S (eigenbasis) and rates Gamma, the rate-weighted
operator is ``Lam[m, n] = S[m, n] * Gamma(E_n - E_m)`` and the dissipator reads

    D(rho) = -[S, Lam rho - rho Lam^dagger]

which is the four-term Redfield tensor with all population/coherence
couplings kept.  Density operators are vectorized row-major, so
``vec(A X B) = kron(A, B.T) vec(X)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg as sla
import scipy.sparse.linalg as spla

from rcqme.hamiltonian import ExtendedSystem, build_extended
from rcqme.spectral import BathSpec, rate_gamma

log = logging.getLogger(__name__)

DENSE_MAX_DIM = 50
COND_LIMIT = 1e12
KERNEL_TOL = 1e-10


class SteadyStateError(RuntimeError):
    """The steady state could not be determined."""

    def __init__(self, message, *, kernel_dim=None, residual=None):
        super().__init__(message)
        self.kernel_dim = kernel_dim
        self.residual = residual


class DegenerateSteadyStateError(SteadyStateError):
    pass


@dataclass(frozen=True)
class Dissipator:
    bath_label: str
    coupling: np.ndarray
    weighted: np.ndarray

    @property
    def dim(self):
        return self.coupling.shape[0]

    def apply(self, rho):
        S, A = self.coupling, self.weighted
        Ad = A.conj().T
        return -(S @ (A @ rho)) + (S @ rho) @ Ad + (A @ rho) @ S - (rho @ Ad) @ S

    def superop(self):
        S, A = self.coupling, self.weighted
        Ad = A.conj().T
        eye = np.eye(self.dim)
        return (
            -np.kron(S @ A, eye)
            + np.kron(S, Ad.T)
            + np.kron(A, S.T)
            - np.kron(eye, (Ad @ S).T)
        )


def build_dissipator(ext: ExtendedSystem, bath: BathSpec) -> Dissipator:
    if not ext.is_diagonalized:
        raise ValueError("extended system must be diagonalized first")
    try:
        S = ext.coupling_ops_eigen[bath.coupling_op_id]
    except KeyError:
        raise ValueError(
            f"bath {bath.label!r} couples to unknown operator {bath.coupling_op_id!r}"
        ) from None
    if S.shape != (ext.dim, ext.dim):
        raise ValueError(f"coupling operator shape {S.shape} does not match D={ext.dim}")
    E = ext.eigenvalues
    released = E[None, :] - E[:, None]
    gam = rate_gamma(released.ravel(), bath).reshape(released.shape)
    return Dissipator(bath_label=bath.label, coupling=S, weighted=S * gam)


@dataclass
class Liouvillian:
    """Redfield generator over the D^2 coefficient space.

    Small systems hold the full dense matrix; larger ones are applied
    matrix-free through D x D products.
    """

    energies: np.ndarray
    dissipators: list
    dense: bool
    _matrix: Optional[np.ndarray] = field(default=None, repr=False)
    _norm: Optional[float] = field(default=None, repr=False)

    @property
    def dim(self):
        return len(self.energies)

    @property
    def size(self):
        return self.dim**2

    def apply(self, rho):
        E = self.energies
        out = -1j * (E[:, None] - E[None, :]) * rho
        for d in self.dissipators:
            out = out + d.apply(rho)
        return out

    def apply_adjoint(self, X):
        E = self.energies
        out = 1j * (E[:, None] - E[None, :]) * X
        for d in self.dissipators:
            S, A = d.coupling, d.weighted
            Ad = A.conj().T
            out = out - (Ad @ S) @ X + S @ X @ A + Ad @ X @ S - X @ (S @ A)
        return out

    def matrix(self):
        if self._matrix is None:
            E = self.energies
            D = self.dim
            m = np.diag((-1j * (E[:, None] - E[None, :])).ravel())
            for d in self.dissipators:
                m += d.superop()
            if D * D > 4096 and not self.dense:
                log.warning("materializing dense Liouvillian of size %d", D * D)
            self._matrix = m
        return self._matrix

    def matvec(self, v):
        D = self.dim
        return self.apply(v.reshape(D, D)).ravel()

    def rmatvec(self, v):
        D = self.dim
        return self.apply_adjoint(v.reshape(D, D)).ravel()

    def as_operator(self):
        n = self.size
        return spla.LinearOperator(
            (n, n), matvec=self.matvec, rmatvec=self.rmatvec, dtype=complex
        )

    def norm(self, iters=40):
        """2-norm estimate by power iteration on L^dagger L (a lower bound)."""
        if self._norm is None:
            rng = np.random.default_rng(0)
            v = rng.standard_normal(self.size) + 1j * rng.standard_normal(self.size)
            v /= np.linalg.norm(v)
            est = 0.0
            for _ in range(iters):
                w = self.rmatvec(self.matvec(v))
                est = np.sqrt(np.linalg.norm(w))
                v = w / np.linalg.norm(w)
            self._norm = float(est)
        return self._norm


def build_liouvillian(
    ext: ExtendedSystem, baths: Sequence[BathSpec], dense_max_dim: int = DENSE_MAX_DIM
) -> Liouvillian:
    if not baths:
        raise ValueError("at least one bath is required")
    dissipators = [build_dissipator(ext, b) for b in baths]
    return Liouvillian(
        energies=np.asarray(ext.eigenvalues, dtype=float),
        dissipators=dissipators,
        dense=ext.dim <= dense_max_dim,
    )


@dataclass
class SteadyState:
    rho: np.ndarray
    currents: dict = field(default_factory=dict)
    residual_norm: float = float("nan")
    solver_meta: dict = field(default_factory=dict)

    @property
    def populations(self):
        return np.real(np.diag(self.rho)).copy()


def _trace_vector(D):
    t = np.zeros(D * D, dtype=complex)
    t[:: D + 1] = 1.0
    return t


def _finalize(L, vec, meta, residual_tol):
    D = L.dim
    rho = vec.reshape(D, D)
    rho = rho / np.trace(rho)
    asym = float(np.linalg.norm(rho - rho.conj().T))
    rho = 0.5 * (rho + rho.conj().T)
    residual = float(np.linalg.norm(L.apply(rho)))
    lnorm = L.norm()
    min_eig = float(np.linalg.eigvalsh(rho)[0])
    meta.update(
        asymmetry=asym,
        min_eigenvalue=min_eig,
        liouvillian_norm=lnorm,
        dim=D,
    )
    if min_eig < -1e-8:
        log.warning("steady state has negative eigenvalue %.3e", min_eig)
    if residual > residual_tol * lnorm:
        raise SteadyStateError(
            f"steady-state residual {residual:.3e} exceeds {residual_tol:.0e} * |L| = "
            f"{residual_tol * lnorm:.3e}",
            residual=residual,
        )
    return SteadyState(rho=rho, residual_norm=residual, solver_meta=meta)


def _solve_dense(L, residual_tol, allow_degenerate):
    D = L.dim
    mat = L.matrix()
    A = mat.copy()
    A[0, :] = _trace_vector(D)
    b = np.zeros(D * D, dtype=complex)
    b[0] = 1.0
    meta = {"method": "dense-lu"}
    lu, piv = sla.lu_factor(A)
    anorm = np.linalg.norm(A, 1)
    rcond, info = sla.lapack.zgecon(lu, anorm, norm="1")
    meta["condition_estimate"] = float(1 / rcond) if rcond > 0 else float("inf")
    if rcond > 1 / COND_LIMIT:
        vec = sla.lu_solve((lu, piv), b)
        return _finalize(L, vec, meta, residual_tol)

    _, sv, vh = np.linalg.svd(mat)
    kdim = int(np.sum(sv <= KERNEL_TOL * sv[0]))
    meta["kernel_dim"] = kdim
    if kdim <= 1:
        # ill-conditioned but generic: smallest right singular vector
        meta["method"] = "dense-svd"
        return _finalize(L, vh[-1].conj(), meta, residual_tol)
    if not allow_degenerate:
        raise DegenerateSteadyStateError(
            f"Liouvillian kernel has dimension {kdim}", kernel_dim=kdim
        )
    aug = np.vstack([mat, _trace_vector(D)[None, :]])
    rhs = np.zeros(D * D + 1, dtype=complex)
    rhs[-1] = 1.0
    vec = np.linalg.lstsq(aug, rhs, rcond=None)[0]
    meta["method"] = "dense-minnorm"
    return _finalize(L, vec, meta, residual_tol)


class _SylvesterPreconditioner:
    """Inverse of X -> K X + X K^dagger - 2 shift X, with
    K = -iH - sum_a S_a Lam_a, via one Schur decomposition."""

    def __init__(self, L: Liouvillian):
        D = L.dim
        K = -1j * np.diag(L.energies).astype(complex)
        for d in L.dissipators:
            K -= d.coupling @ d.weighted
        decay = -np.real(np.diag(K))
        shift = max(float(np.median(decay)), 1e-12)
        K = K - shift * np.eye(D)
        self.T, self.Q = sla.schur(K, output="complex")
        self.D = D

    def solve(self, Y):
        Q = self.Q
        C = Q.conj().T @ Y @ Q
        X, scale, info = sla.lapack.ztrsyl(self.T, self.T, C, trana="N", tranb="C", isgn=1)
        if info < 0:
            raise SteadyStateError(f"ztrsyl failed with info={info}")
        return Q @ (X / scale) @ Q.conj().T


def _solve_iterative(L, residual_tol, tol, restart, maxiter, refinements=16):
    D = L.dim
    n = D * D
    trace = _trace_vector(D)
    b = np.eye(D, dtype=complex).ravel() / D
    pre = _SylvesterPreconditioner(L)

    def aug(v):
        return L.matvec(v) + (trace @ v) * b

    def prec(v):
        return pre.solve(v.reshape(D, D)).ravel()

    op = spla.LinearOperator((n, n), matvec=lambda y: aug(prec(y)), dtype=complex)
    x = np.zeros(n, dtype=complex)
    iters = []
    floor = 1e-24 * L.norm()
    best = np.inf
    best_x = x
    stalls = 0
    for k in range(refinements):
        if k:
            # unit trace makes the augmented residual exactly -L x
            x = x / (trace @ x)
            r = -L.matvec(x)
        else:
            r = b.copy()
        rn = np.linalg.norm(r)
        if rn <= floor:
            break
        # currents are weighted residual sums, so refine well past |L| eps
        if rn < best:
            best_x = x
        if rn < 0.5 * best:
            best, stalls = rn, 0
        else:
            stalls += 1
            if stalls >= 3:
                break
        count = [0]

        def cb(_):
            count[0] += 1

        y, info = spla.gmres(
            op, r, rtol=tol, atol=0.0, restart=restart, maxiter=maxiter,
            callback=cb, callback_type="pr_norm",
        )
        x = x + prec(y)
        iters.append(count[0])
    else:
        x = x / (trace @ x)
        if np.linalg.norm(L.matvec(x)) < best:
            best_x = x
    meta = {"method": "gmres-sylvester", "iterations": iters}
    return _finalize(L, best_x, meta, residual_tol)


def solve_steady_state(
    L: Liouvillian,
    baths=None,
    *,
    residual_tol: float = 1e-10,
    method: str = "auto",
    allow_degenerate: bool = False,
    gmres_tol: float = 1e-9,
    restart: int = 200,
    maxiter: int = 5,
) -> SteadyState:
    """Stationary density operator with unit trace.

    ``method`` is ``"dense"``, ``"iterative"`` or ``"auto"`` (dense when the
    Liouvillian was built dense).  ``baths`` is accepted for symmetry with the
    pipeline and is not needed by the solve itself.
    """
    if method == "auto":
        method = "dense" if L.dense else "iterative"
    if method == "dense":
        return _solve_dense(L, residual_tol, allow_degenerate)
    if method == "iterative":
        if allow_degenerate:
            raise ValueError("allow_degenerate is only supported by the dense solver")
        return _solve_iterative(L, residual_tol, gmres_tol, restart, maxiter)
    raise ValueError(f"unknown method {method!r}")


def heat_current(ext: ExtendedSystem, rho, dissipators) -> dict:
    """Tr[D_a(rho) H] per bath; positive when heat flows from the bath into
    the extended system."""
    E = ext.eigenvalues
    return {d.bath_label: float(np.real(np.diag(d.apply(rho)) @ E)) for d in dissipators}


def conservation_check(ss: SteadyState, rtol=1e-6, atol=1e-14) -> dict:
    vals = list(ss.currents.values())
    total = float(sum(vals))
    scale = max((abs(v) for v in vals), default=0.0)
    return {
        "sum": total,
        "relative": abs(total) / scale if scale > 0 else 0.0,
        "passed": abs(total) <= rtol * scale + atol,
    }


def steady_state(ext: ExtendedSystem, baths: Sequence[BathSpec], **solver_opts) -> SteadyState:
    """Full pipeline on a (possibly undiagonalized) extended system."""
    if not ext.is_diagonalized:
        from rcqme.hamiltonian import diagonalize

        ext = diagonalize(ext)
    dense_max = solver_opts.pop("dense_max_dim", DENSE_MAX_DIM)
    L = build_liouvillian(ext, baths, dense_max_dim=dense_max)
    ss = solve_steady_state(L, baths, **solver_opts)
    ss.currents = heat_current(ext, ss.rho, L.dissipators)
    return ss


def simulate(spec, baths: Sequence[BathSpec], **solver_opts) -> SteadyState:
    return steady_state(build_extended(spec), baths, **solver_opts)
