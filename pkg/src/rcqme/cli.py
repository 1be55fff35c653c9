"""Command-line entry point.

    rcqme SUBCOMMAND --config cfg.json --out DIR [--workers N]

Subcommands: run, sweep, spectrum, coupling-map, ladder-baseline, polaron,
converge.  Every artifact set includes a JSON file echoing the resolved
configuration.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from rcqme import io
from rcqme.baseline import run_baseline
from rcqme.config import ConfigError, parse_config
from rcqme.experiments import (
    convergence_study,
    fit_scaling_exponent,
    omega_sweep_peak,
    run_sweep,
    sweep_summary,
)
from rcqme.hamiltonian import (
    build_extended,
    coupling_map_records,
    export_coupling_map,
    export_spectrum,
    polaron_params,
)
from rcqme.redfield import SteadyStateError, conservation_check, simulate
from rcqme.spectral import BrownianSpectrum

log = logging.getLogger("rcqme")

SUBCOMMANDS = ("run", "sweep", "spectrum", "coupling-map", "ladder-baseline", "polaron", "converge")

SWEEP_COLUMNS = ["axis", "j_L", "j_R", "residual", "M"]


def cmd_run(cfg, out, workers):
    ss = simulate(cfg.model_spec(), cfg.bath_params().specs(), **cfg.solver_options())
    payload = {
        "config": cfg.echo(),
        "currents": ss.currents,
        "residual": ss.residual_norm,
        "populations": ss.populations,
        "conservation": conservation_check(ss),
        "solver": ss.solver_meta,
    }
    return [io.write_json(payload, out / "run.json")]


def cmd_sweep(cfg, out, workers):
    sweep = cfg.sweep_config()
    result = run_sweep(sweep, workers=workers)
    window = cfg.experiment.window
    fit_error = None
    try:
        fit_scaling_exponent(result, window)
    except ValueError as exc:
        fit_error = str(exc)
    summary = {"config": cfg.echo(), **sweep_summary(result), "fit_error": fit_error}
    if sweep.axis == "omega":
        peak = omega_sweep_peak(result)
        summary["peak"] = asdict(peak)
    return [
        io.write_csv(result.rows(), out / "sweep.csv", SWEEP_COLUMNS),
        io.write_json(summary, out / "sweep.json"),
    ]


def cmd_spectrum(cfg, out, workers):
    ext = build_extended(cfg.model_spec())
    recs = export_spectrum(ext)
    return [
        io.write_csv(recs, out / "spectrum.csv", ["n", "E_n"]),
        io.write_json({"config": cfg.echo(), "spectrum": recs}, out / "spectrum.json"),
    ]


def cmd_coupling_map(cfg, out, workers):
    ext = build_extended(cfg.model_spec())
    baths = [cfg.experiment.bath] if cfg.experiment.bath else ["L", "R"]
    files = []
    for b in baths:
        cmap = export_coupling_map(ext, b)
        files.append(
            io.write_csv(coupling_map_records(cmap), out / f"coupling_map_{b}.csv",
                         ["n", "m", "log10_abs"])
        )
    files.append(io.write_json({"config": cfg.echo(), "baths": baths}, out / "coupling_map.json"))
    return files


def cmd_ladder_baseline(cfg, out, workers):
    m, b = cfg.model, cfg.baths
    eps = (m.eps0, m.delta, m.eps2)
    res = run_baseline(
        eps, b.T_h, b.T_c,
        BrownianSpectrum(m.lambda_L, m.omega_L, b.gamma),
        BrownianSpectrum(m.lambda_R, m.omega_R, b.gamma),
    )
    return [io.write_json({"config": cfg.echo(), **res}, out / "ladder_baseline.json")]


def cmd_polaron(cfg, out, workers):
    spec = cfg.model_spec()
    params = polaron_params(spec)
    ext = build_extended(spec)
    gap = float(ext.eigenvalues[1] - ext.eigenvalues[0])
    payload = {
        "config": cfg.echo(),
        **asdict(params),
        "numerical_gap": gap,
        "gap_relative_deviation": abs(gap - params.renorm_delta) / params.renorm_delta
        if params.renorm_delta else None,
    }
    return [io.write_json(payload, out / "polaron.json")]


def cmd_converge(cfg, out, workers):
    sweep = cfg.sweep_config()
    M_grid = cfg.experiment.M_grid or [cfg.solver.M, cfg.solver.M + 1, cfg.solver.M + 2]
    res = convergence_study(sweep, M_grid, workers=workers)
    summary = {
        "config": cfg.echo(),
        "M_grid": list(res.M_grid),
        "converged": res.converged,
        "all_converged": res.all_converged,
    }
    return [
        io.write_csv(res.rows(), out / "converge.csv", ["axis", "M", "j_L", "converged"]),
        io.write_json(summary, out / "converge.json"),
    ]


HANDLERS = {
    "run": cmd_run,
    "sweep": cmd_sweep,
    "spectrum": cmd_spectrum,
    "coupling-map": cmd_coupling_map,
    "ladder-baseline": cmd_ladder_baseline,
    "polaron": cmd_polaron,
    "converge": cmd_converge,
}


def _load_raw(path):
    if path is None or path == "-":
        text = sys.stdin.read()
    else:
        text = Path(path).read_text()
    try:
        return json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON config: {exc}") from None


def dispatch(raw: dict, subcommand: str, out: Path, workers: int = 1, axis=None):
    if subcommand not in HANDLERS:
        raise ConfigError(f"unknown subcommand {subcommand!r}; choose from {', '.join(SUBCOMMANDS)}")
    if not isinstance(raw, dict):
        raise ConfigError("config document must be a JSON object")
    raw = json.loads(json.dumps(raw))
    if axis is not None:
        raw.setdefault("experiment", {})["axis"] = axis
    if subcommand == "ladder-baseline":
        model = raw.setdefault("model", {})
        if model.setdefault("variant", "ladder") != "ladder":
            raise ConfigError("model.variant: ladder-baseline needs the ladder model")
    if subcommand == "polaron":
        if raw.get("model", {}).get("variant", "spin_boson") != "spin_boson":
            raise ConfigError("model.variant: polaron analysis needs the spin-boson model")
    cfg = parse_config(raw)
    if cfg.solver.workers > 1 and workers == 1:
        workers = cfg.solver.workers
    out.mkdir(parents=True, exist_ok=True)
    return HANDLERS[subcommand](cfg, out, workers)


def build_parser():
    p = argparse.ArgumentParser(prog="rcqme", description=__doc__.splitlines()[0])
    p.add_argument("subcommand", nargs="?", choices=SUBCOMMANDS)
    p.add_argument("--subcommand", dest="subcommand_flag", choices=SUBCOMMANDS)
    p.add_argument("--config", default=None, help="JSON config path ('-' for stdin)")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--axis", default=None, help="override experiment.axis")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    sub = args.subcommand or args.subcommand_flag
    if sub is None:
        print("rcqme: a subcommand is required", file=sys.stderr)
        return 2
    try:
        raw = _load_raw(args.config) if args.config is not None else {}
        files = dispatch(raw, sub, Path(args.out), args.workers, args.axis)
    except ConfigError as exc:
        print(f"rcqme: config error: {exc}", file=sys.stderr)
        return 2
    except (SteadyStateError, OSError, RuntimeError) as exc:
        print(f"rcqme: {sub} failed: {exc}", file=sys.stderr)
        return 1
    for f in files:
        print(f)
    return 0


if __name__ == "__main__":
    sys.exit(main())
