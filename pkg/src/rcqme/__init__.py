"""Steady-state heat transport through dissipative few-level systems with
reaction-coordinate mapping and a non-secular Redfield solver."""

from rcqme.spectral import (
    BathSpec,
    BrownianSpectrum,
    OhmicSpectrum,
    bose_occupation,
    j_brownian,
    j_ohmic,
    log_rate_gamma,
    rate_gamma,
)
from rcqme.hamiltonian import (
    ExtendedSystem,
    LadderModel,
    PolaronParams,
    SpinBosonModel,
    boson_ladder,
    build_extended,
    build_ladder_rc,
    build_sb_rc,
    diagonalize,
    export_coupling_map,
    export_spectrum,
    polaron_params,
)
from rcqme.redfield import (
    Dissipator,
    Liouvillian,
    SteadyState,
    SteadyStateError,
    build_dissipator,
    build_liouvillian,
    conservation_check,
    heat_current,
    solve_steady_state,
    steady_state,
)

__version__ = "0.1.0"
