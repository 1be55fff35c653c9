"""Parameter sweeps, scaling-exponent fits and truncation convergence."""

from __future__ import annotations

import logging
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from rcqme.hamiltonian import LadderModel, ModelSpec, SpinBosonModel
from rcqme.redfield import SteadyStateError, simulate
from rcqme.spectral import BathSpec, OhmicSpectrum

log = logging.getLogger(__name__)

AXES = ("lambda", "delta", "omega", "theta", "M")
GAMMA_DEFAULT = 0.0071 / math.pi


@dataclass(frozen=True)
class BathParams:
    T_h: float = 1.0
    T_c: float = 0.5
    gamma: float = GAMMA_DEFAULT
    cutoff: float = 1000.0

    def specs(self):
        """Hot contact on the L reaction coordinate, cold on R."""
        res = OhmicSpectrum(self.gamma, self.cutoff)
        return [
            BathSpec(self.T_h, res, coupling_op_id="L", label="L"),
            BathSpec(self.T_c, res, coupling_op_id="R", label="R"),
        ]


def with_axis(model: ModelSpec, axis: str, value) -> ModelSpec:
    """Copy of ``model`` with the swept parameter set symmetrically on both baths."""
    if axis == "lambda":
        return replace(model, lambda_L=float(value), lambda_R=float(value))
    if axis == "omega":
        return replace(model, omega_L=float(value), omega_R=float(value))
    if axis == "M":
        return replace(model, M=int(value))
    if axis == "delta":
        if isinstance(model, LadderModel):
            e0, _, e2 = model.eps
            return replace(model, eps=(e0, float(value), e2))
        return replace(model, delta=float(value))
    if axis == "theta":
        if not isinstance(model, SpinBosonModel):
            raise ValueError("theta axis only applies to the spin-boson model")
        return replace(model, theta=float(value))
    raise ValueError(f"unknown sweep axis {axis!r}; expected one of {AXES}")


@dataclass(frozen=True)
class SweepConfig:
    model: ModelSpec
    axis: str
    grid: tuple
    baths: BathParams = BathParams()
    solver: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"unknown sweep axis {self.axis!r}; expected one of {AXES}")
        grid = tuple(float(g) for g in self.grid)
        if not grid:
            raise ValueError("sweep grid is empty")
        steps = np.diff(grid)
        if len(grid) > 1 and not (np.all(steps > 0) or np.all(steps < 0)):
            raise ValueError("sweep grid must be strictly monotone")
        object.__setattr__(self, "grid", grid)
        # fail early on grid values the model rejects
        for g in grid:
            with_axis(self.model, self.axis, g)

    def point_spec(self, i):
        return with_axis(self.model, self.axis, self.grid[i])


@dataclass(frozen=True)
class SweepRecord:
    axis: float
    j_L: float
    j_R: float
    residual: float
    M: int
    error: Optional[str] = None
    liouvillian_norm: float = float("nan")


@dataclass
class SweepResult:
    config: SweepConfig
    records: list
    fit: Optional[dict] = None

    @property
    def axis_values(self):
        return np.array([r.axis for r in self.records])

    def currents(self, which="L"):
        return np.array([getattr(r, f"j_{which}") for r in self.records])

    def rows(self):
        return [
            {"axis": r.axis, "j_L": r.j_L, "j_R": r.j_R, "residual": r.residual, "M": r.M}
            for r in self.records
        ]


def run_point(cfg: SweepConfig, i: int) -> SweepRecord:
    spec = cfg.point_spec(i)
    try:
        ss = simulate(spec, cfg.baths.specs(), **cfg.solver)
    except (SteadyStateError, np.linalg.LinAlgError) as exc:
        log.warning("point %s=%g failed: %s", cfg.axis, cfg.grid[i], exc)
        nan = float("nan")
        return SweepRecord(cfg.grid[i], nan, nan, nan, spec.M, error=str(exc))
    log.info("%s=%g j_L=%.6e", cfg.axis, cfg.grid[i], ss.currents["L"])
    return SweepRecord(
        axis=cfg.grid[i],
        j_L=ss.currents["L"],
        j_R=ss.currents["R"],
        residual=ss.residual_norm,
        M=spec.M,
        liouvillian_norm=ss.solver_meta["liouvillian_norm"],
    )


def _run_indexed(args):
    cfg, i = args
    return i, run_point(cfg, i)


def run_sweep(cfg: SweepConfig, workers: int = 1) -> SweepResult:
    n = len(cfg.grid)
    out = [None] * n
    if workers <= 1:
        for i in range(n):
            out[i] = run_point(cfg, i)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for i, rec in pool.map(_run_indexed, [(cfg, i) for i in range(n)]):
                out[i] = rec
    return SweepResult(config=cfg, records=out)


def fit_scaling_exponent(result: SweepResult, window=None, which="L"):
    """Least-squares slope of log|j| against log(axis) inside ``window``.

    Returns ``(slope, r2)``.  The window is inclusive with a relative slack of
    1e-9 so that grid points computed by ``logspace`` land inside.
    """
    x = result.axis_values
    y = result.currents(which)
    if window is not None:
        lo, hi = window
        keep = (x >= lo * (1 - 1e-9)) & (x <= hi * (1 + 1e-9))
        x, y = x[keep], y[keep]
    if len(x) < 4:
        raise ValueError(f"need at least 4 points in the fit window, got {len(x)}")
    if np.any(x <= 0):
        raise ValueError("log-log fit needs positive axis values")
    if not np.all(np.isfinite(y)) or np.any(y == 0):
        raise ValueError("fit window contains zero or failed currents")
    if np.any(np.sign(y) != np.sign(y[0])):
        raise ValueError("current changes sign inside the fit window")
    lx, ly = np.log(x), np.log(np.abs(y))
    slope, intercept = np.polyfit(lx, ly, 1)
    pred = slope * lx + intercept
    ss_res = float(np.sum((ly - pred) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    result.fit = {
        "slope": float(slope),
        "intercept": float(intercept),
        "r2": r2,
        "window": list(window) if window is not None else None,
    }
    return float(slope), r2


@dataclass
class ConvergenceResult:
    M_grid: tuple
    axis_values: np.ndarray
    currents: np.ndarray
    converged: np.ndarray

    @property
    def all_converged(self):
        return bool(np.all(self.converged))

    def rows(self):
        rows = []
        for k, M in enumerate(self.M_grid):
            for i, a in enumerate(self.axis_values):
                rows.append(
                    {"axis": float(a), "M": int(M), "j_L": float(self.currents[k, i]),
                     "converged": bool(self.converged[i])}
                )
        return rows


def convergence_study(cfg: SweepConfig, M_grid: Sequence[int], workers: int = 1,
                      rtol: float = 0.01) -> ConvergenceResult:
    """Repeat ``cfg`` at each truncation in ``M_grid``; a grid point is
    converged when the last two truncations agree to ``rtol``."""
    M_grid = tuple(int(m) for m in M_grid)
    if len(M_grid) < 2 or any(b <= a for a, b in zip(M_grid, M_grid[1:])):
        raise ValueError("M_grid must hold at least two ascending values")
    if cfg.axis == "M":
        raise ValueError("convergence study needs a sweep over a non-M axis")
    currents = []
    for M in M_grid:
        sub = replace(cfg, model=replace(cfg.model, M=M))
        currents.append(run_sweep(sub, workers).currents("L"))
    currents = np.array(currents)
    last, prev = currents[-1], currents[-2]
    converged = np.abs(last - prev) <= rtol * np.abs(last)
    return ConvergenceResult(M_grid, np.array(cfg.grid), currents, converged)


@dataclass(frozen=True)
class PeakResult:
    omega: float
    current: float
    at_boundary: bool


def omega_sweep_peak(result: SweepResult, which="L") -> PeakResult:
    """Grid argmax of |j|, refined by the parabola through its two neighbours."""
    if result.config.axis != "omega":
        raise ValueError("peak search expects an omega sweep")
    x = result.axis_values
    y = np.abs(result.currents(which))
    i = int(np.nanargmax(y))
    if i == 0 or i == len(x) - 1:
        warnings.warn(f"current maximum lies on the grid boundary (omega={x[i]:g})")
        return PeakResult(float(x[i]), float(y[i]), True)
    xs, ys = x[i - 1 : i + 2], y[i - 1 : i + 2]
    a, b, c = np.polyfit(xs, ys, 2)
    if a >= 0:
        return PeakResult(float(x[i]), float(y[i]), False)
    xv = -b / (2 * a)
    return PeakResult(float(xv), float(c - b * b / (4 * a)), False)


def sweep_summary(result: SweepResult) -> dict:
    cfg = result.config
    return {
        "model": {"variant": cfg.model.variant, **asdict(cfg.model)},
        "axis": cfg.axis,
        "grid": list(cfg.grid),
        "baths": asdict(cfg.baths),
        "solver": dict(cfg.solver),
        "fit": result.fit,
        "failures": [
            {"axis": r.axis, "error": r.error} for r in result.records if r.error
        ],
    }
