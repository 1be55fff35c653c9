"""JSON run configuration with defaults and field-path validation."""

from __future__ import annotations

import json
import math
import sys
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from rcqme.experiments import AXES, GAMMA_DEFAULT, BathParams, SweepConfig
from rcqme.hamiltonian import LadderModel, SpinBosonModel

DEFAULT_M = {"spin_boson": 4, "ladder": 5}


class ConfigError(ValueError):
    pass


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ModelBlock(_Strict):
    variant: Literal["spin_boson", "ladder"] = "spin_boson"
    delta: Optional[float] = None
    theta: float = Field(math.pi / 2, ge=0.0, le=math.pi / 2)
    eps0: float = 0.0
    eps2: float = 1.0
    lambda_L: float = Field(0.1, ge=0.0)
    lambda_R: float = Field(0.1, ge=0.0)
    omega_L: float = Field(10.0, gt=0.0)
    omega_R: float = Field(10.0, gt=0.0)

    @model_validator(mode="after")
    def _levels(self):
        if self.delta is None:
            self.delta = 0.1 if self.variant == "spin_boson" else 0.5
        if self.variant == "ladder" and not self.eps0 <= self.delta <= self.eps2:
            raise ValueError("ladder levels must satisfy eps0 <= delta <= eps2")
        return self


class BathsBlock(_Strict):
    T_h: float = Field(1.0, gt=0.0)
    T_c: float = Field(0.5, gt=0.0)
    gamma: float = Field(GAMMA_DEFAULT, gt=0.0)
    cutoff: float = Field(1000.0, gt=0.0)


class SolverBlock(_Strict):
    M: Optional[int] = Field(None, ge=2)
    residual_tol: float = Field(1e-10, gt=0.0)
    method: Literal["auto", "dense", "iterative"] = "auto"
    workers: int = Field(1, ge=1)


class ExperimentBlock(_Strict):
    axis: Optional[Literal[AXES]] = None
    grid: Optional[list[float]] = None
    start: Optional[float] = None
    stop: Optional[float] = None
    num: int = Field(8, ge=1)
    spacing: Literal["log", "linear"] = "log"
    window: Optional[tuple[float, float]] = None
    M_grid: Optional[list[int]] = None
    bath: Optional[Literal["L", "R"]] = None

    def resolved_grid(self):
        if self.grid is not None:
            return [float(g) for g in self.grid]
        if self.start is None or self.stop is None:
            return None
        if self.spacing == "log":
            return [float(v) for v in np.logspace(np.log10(self.start), np.log10(self.stop), self.num)]
        return [float(v) for v in np.linspace(self.start, self.stop, self.num)]


class RunConfig(_Strict):
    model: ModelBlock = ModelBlock()
    baths: BathsBlock = BathsBlock()
    solver: SolverBlock = SolverBlock()
    experiment: ExperimentBlock = ExperimentBlock()

    @model_validator(mode="after")
    def _defaults(self):
        if self.solver.M is None:
            self.solver.M = DEFAULT_M[self.model.variant]
        if self.experiment.grid is None and self.experiment.resolved_grid() is not None:
            self.experiment.grid = self.experiment.resolved_grid()
        if self.experiment.window is not None:
            lo, hi = self.experiment.window
            if not 0 < lo < hi:
                raise ValueError("experiment.window must satisfy 0 < lo < hi")
        # surface downstream invariants with a field path
        try:
            self.model_spec()
        except ValueError as exc:
            raise ValueError(f"model: {exc}") from None
        return self

    def model_spec(self):
        m = self.model
        common = dict(
            lambda_L=m.lambda_L, lambda_R=m.lambda_R,
            omega_L=m.omega_L, omega_R=m.omega_R, M=self.solver.M,
        )
        if m.variant == "spin_boson":
            return SpinBosonModel(delta=m.delta, theta=m.theta, **common)
        return LadderModel(eps=(m.eps0, m.delta, m.eps2), **common)

    def bath_params(self):
        b = self.baths
        return BathParams(T_h=b.T_h, T_c=b.T_c, gamma=b.gamma, cutoff=b.cutoff)

    def solver_options(self):
        return {"residual_tol": self.solver.residual_tol, "method": self.solver.method}

    def sweep_config(self):
        exp = self.experiment
        if exp.axis is None or not exp.grid:
            raise ConfigError("sweep needs experiment.axis and a grid (grid or start/stop/num)")
        try:
            return SweepConfig(
                model=self.model_spec(), axis=exp.axis, grid=tuple(exp.grid),
                baths=self.bath_params(), solver=self.solver_options(),
            )
        except ValueError as exc:
            raise ConfigError(f"experiment: {exc}") from None

    def echo(self):
        return self.model_dump(mode="json")


def _format_errors(err: ValidationError):
    lines = []
    for e in err.errors():
        path = ".".join(str(p) for p in e["loc"]) or "<root>"
        lines.append(f"{path}: {e['msg']}")
    return "; ".join(lines)


def parse_config(source=None) -> RunConfig:
    """Read a JSON config from a path, '-' / None for stdin, or a dict."""
    if isinstance(source, dict):
        data = source
    else:
        try:
            if source is None or str(source) == "-":
                text = sys.stdin.read()
            else:
                with open(source) as fh:
                    text = fh.read()
            data = json.loads(text) if text.strip() else {}
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed JSON config: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config document must be a JSON object")
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(_format_errors(exc)) from None
