"""
Batch command-line front end.

Sub-commands write their outputs below ``<output dir>/<command>/`` together with ``run.log``.
Exit codes: 0 on success, 1 for invalid configuration or input files, 2 for numerical
failures (eigensolver breakdown, aborted adiabatic sweep).
"""

import argparse
import os
import sys
from dataclasses import replace
from functools import partial

import numpy as np
import pandas as pd
from matplotlib import pyplot as plt

from floquet_engineering import io
from floquet_engineering.base import ConfigError, NumericalError, SectorError, SweepAbortedError
from floquet_engineering.basis import Sector
from floquet_engineering.config import RunConfig
from floquet_engineering.drives import ChainDrive
from floquet_engineering.floquet import (
    adiabatic_sweep,
    floquet_from_controls,
    stroboscopic_evolve,
    target_unitary,
)
from floquet_engineering.grape import Objective, optimize
from floquet_engineering.numerics import expm_i
from floquet_engineering.operators import build_target_boson, build_target_spin_jw
from floquet_engineering.results import (
    _file_logger,
    _log_and_fig,
    fidelity_grid,
    lift_fidelities,
    logger,
    tmin_scaling,
)
from floquet_engineering.targets import graphs, molecules, sat
from floquet_engineering.util import plot_controls, plot_matrix


# Argument parsing
def _int_list(text):
    """Integers as ``"5..10"`` (inclusive range) or ``"2,4,8"``."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return list(range(int(lo), int(hi) + 1))
        return [int(x) for x in text.split(",")]
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"Invalid integer list {text!r}.") from err


def _float_list(text):
    try:
        return [float(x) for x in text.split(",")]
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"Invalid number list {text!r}.") from err


def _add_common(parser):
    parser.add_argument("--config", help="JSON configuration file")
    parser.add_argument("--output", help="output directory (default $FLOQUET_ENG_OUTPUT)")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--verbose", action="count", default=0)
    parser.add_argument("--images", action="store_true", default=None, help="save figures")

    group = parser.add_argument_group("sector")
    group.add_argument("--L", type=_int_list, help="site count, or range 'a..b' for sweeps")
    group.add_argument("--M", type=int)
    group.add_argument("--statistics", choices=["bosonic", "hardcore"])

    group = parser.add_argument_group("target")
    group.add_argument("--target", dest="family")
    group.add_argument("--K", type=float, help="graph coupling strength")
    group.add_argument("--G", type=float, help="graph onsite energy")
    group.add_argument("--hub", type=int, help="star center site (1-based)")
    group.add_argument("--U", type=float, help="anharmonicity of chain and target")
    group.add_argument("--matrix", help="matrix file (*_real.csv or .json)")
    group.add_argument("--clauses", help="clause file")
    group.add_argument("--scale", type=float, help="LiH matrix multiplier")
    group.add_argument("--omega", type=float, help="satisfiability energy scale")

    group = parser.add_argument_group("drive")
    group.add_argument("--drive", dest="drive_controls", choices=["g", "gJ"])
    group.add_argument("--gmax", type=float)
    group.add_argument("--Jmax", type=float)
    group.add_argument("--J", type=float, help="static coupling")
    group.add_argument("--N", type=int, help="time steps per period")
    group.add_argument("--T", type=float, help="period, units of 1/J")
    group.add_argument("--convention", choices=["number", "pauli"])

    group = parser.add_argument_group("optimizer")
    group.add_argument("--objective", choices=["abs", "real"])
    group.add_argument("--restarts", type=int)
    group.add_argument("--max-iter", type=int)
    group.add_argument("--n-jobs", type=int, help="worker processes")


def make_parser():
    parser = argparse.ArgumentParser(
        prog="floquet-eng",
        description="Engineer effective Hamiltonians of a driven qubit chain.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_ in [
        ("basis", "list the occupation basis of a sector"),
        ("target", "build and export a target Hamiltonian"),
        ("optimize", "optimize a drive for a target"),
    ]:
        _add_common(sub.add_parser(name, help=help_))

    p = sub.add_parser("evolve", help="stroboscopic evolution under an optimized drive")
    _add_common(p)
    p.add_argument("--controls", dest="controls_file", help="control sequence file")
    p.add_argument("--periods", type=int)
    p.add_argument("--state", type=int, help="initial basis state (1-based)")

    p = sub.add_parser("adiabatic", help="adiabatic Floquet sweep to a satisfiability target")
    _add_common(p)
    p.add_argument("--cycles", type=int)
    p.add_argument("--schedule", choices=["linear", "smoothstep"])
    p.add_argument("--fidelity-floor", type=float)
    p.add_argument("--archive", action="store_true", default=None, help="dill archive of controls")

    p = sub.add_parser("sweep", help="fidelity grids, minimal periods and many-body lifts")
    _add_common(p)
    p.add_argument("--mode", choices=["grid", "tmin", "lift"])
    p.add_argument("--T-values", type=_float_list)
    p.add_argument("--N-values", type=_int_list)
    p.add_argument("--M-values", type=_int_list)
    p.add_argument("--tau", type=float)
    p.add_argument("--threshold", type=float)
    p.add_argument("--N-max", type=int)
    return parser


def _overrides(args):
    a = vars(args)
    L_values = a.get("L")
    overrides = {
        "sector": {
            "L": None if L_values is None else L_values[0],
            "M": a.get("M"),
            "statistics": a.get("statistics"),
        },
        "target": {
            key: a.get(key)
            for key in ("family", "K", "G", "hub", "U", "matrix", "clauses", "scale", "omega")
        },
        "drive": {key: a.get(key) for key in ("gmax", "Jmax", "J", "N", "T")}
        | {"controls": a.get("drive_controls"), "U": a.get("U")}
        | {"convention": a.get("convention")},
        "optimizer": {
            "objective": a.get("objective"),
            "restarts": a.get("restarts"),
            "max_iter": a.get("max_iter"),
        },
        "sweep": {
            "mode": a.get("mode"),
            "T_values": a.get("T_values"),
            "N_values": a.get("N_values"),
            "L_values": L_values if L_values is not None and len(L_values) > 1 else None,
            "M_values": a.get("M_values"),
            "tau": a.get("tau"),
            "threshold": a.get("threshold"),
            "N_max": a.get("N_max"),
            "n_jobs": a.get("n_jobs"),
        },
        "adiabatic": {
            "cycles": a.get("cycles"),
            "schedule": a.get("schedule"),
            "fidelity_floor": a.get("fidelity_floor"),
            "archive": a.get("archive"),
        },
        "evolve": {
            "periods": a.get("periods"),
            "state": a.get("state"),
            "controls": a.get("controls_file"),
        },
        "output": {"dir": a.get("output"), "images": a.get("images")},
        "seed": a.get("seed"),
    }
    if a.get("command") != "sweep" and a.get("n_jobs") is not None:
        overrides["optimizer"]["n_jobs"] = a["n_jobs"]
    return overrides


# Builders
def build_target(cfg, sector=None):
    """Target Hamiltonian of the configured family in `sector` (default: configured sector)."""
    t = cfg["target"]
    sector = cfg.sector() if sector is None else sector
    family = t["family"]

    if family in graphs.GRAPHS:
        graph = graphs.make_graph(family, sector.L, t["K"], t["G"], t["hub"])
        if sector.hardcore:
            return build_target_spin_jw(sector.L, graph, sector.M)
        return build_target_boson(sector, graph, t["U"])
    if family == "lih":
        return molecules.lih_hamiltonian(t["scale"])
    if family == "sat":
        H = sat.sat_hamiltonian(t["omega"], _clause_system(cfg))
    else:
        H = io.read_matrix(t["matrix"])
    if H.dim != sector.dim:
        raise ConfigError(f"Target of dimension {H.dim} does not fit {sector} ({sector.dim}).")
    return H.in_sector(sector)


def _clause_system(cfg):
    path = cfg["target"]["clauses"]
    return sat.EXAMPLE_SYSTEM if path is None else sat.load_clauses(path)


def build_drive(cfg, L=None):
    d = cfg["drive"]
    L = cfg["sector"]["L"] if L is None else L
    U = np.inf if d["U"] is None else d["U"]
    kwargs = dict(U=U, convention=d["convention"])
    if d["controls"] == "g":
        return ChainDrive.onsite(L, gmax=d["gmax"], J=d["J"], **kwargs)
    return ChainDrive.onsite_coupling(L, gmax=d["gmax"], Jmax=d["Jmax"], **kwargs)


def _drive_for_length(data, L):
    return build_drive(RunConfig(data), L)


def _target_for_length(data, L):
    cfg = RunConfig(data)
    return build_target(cfg, Sector(L, cfg["sector"]["M"], cfg["sector"]["statistics"]))


def _relative_error(H_eff, H):
    return float(np.linalg.norm(H_eff.matrix - H.matrix) / np.linalg.norm(H.matrix))


# Commands
def cmd_basis(cfg, out, verbose=0):
    sector = cfg.sector()
    io.write_basis(sector, out / "basis.csv", cfg.to_dict())
    logger.info(f"{sector}: {sector.dim} states")


def cmd_target(cfg, out, verbose=0):
    H = build_target(cfg)
    io.write_matrix(H, out / "target", cfg.to_dict())
    if cfg["target"]["family"] == "sat":
        system = _clause_system(cfg)
        io.write_csv(sat.objective_frame(system), out / "truth_table.csv", cfg.to_dict())
        terms = sat.objective_to_pauli(sat.system_objective(system))
        io.write_csv(terms.to_frame(), out / "pauli_terms.csv", cfg.to_dict())

    fig = None
    if cfg["output"]["images"]:
        fig, ax = plt.subplots()
        plot_matrix(H, ax=ax)
    _log_and_fig(H.summary(), fig, out / "target.png")


def _optimize(cfg, H, verbose=0, options=None):
    d = cfg["drive"]
    drive = build_drive(cfg)
    problem = drive.problem(cfg.sector(), d["N"], d["T"])
    options = cfg.grape_options() if options is None else options
    seq, report = optimize(problem, target_unitary(H, d["T"]), options, verbose)
    return drive, problem, seq, report


def cmd_optimize(cfg, out, verbose=0):
    """Optimizes under the phase-sensitive objective; H_eff is exported with its absolute phase."""
    H = build_target(cfg)
    if cfg["optimizer"]["objective"] != Objective.REAL.value:
        logger.info("optimize: using the real objective so that H_eff matches the target")
    options = replace(cfg.grape_options(), objective=Objective.REAL)
    _, problem, seq, report = _optimize(cfg, H, verbose, options)
    result = floquet_from_controls(problem, seq, H, Objective.REAL)


    config = cfg.to_dict()
    io.write_controls(seq, out / "controls.csv", config)
    io.write_controls(seq, out / "controls.json", config)
    io.write_report(report, out / "report.json", config)
    io.write_matrix(result.H_eff, out / "H_eff", config)
    df = pd.DataFrame({"index": np.arange(result.quasienergies.size)})
    df["quasienergy"] = result.quasienergies
    io.write_csv(df, out / "quasienergies.csv", config)

    summary = {
        "fidelity": result.fidelity_to_target,
        "H_eff_relative_error": _relative_error(result.H_eff, H),
        "near_branch_cut": bool(result.meta.get("near_branch_cut", False)),
    }
    io.write_json(summary, out / "summary.json", config)

    fig = None
    if cfg["output"]["images"]:
        fig, ax = plt.subplots()
        plot_controls(seq, problem.T, ax=ax)
    message = f"{report.summary()}\n\n{result.summary()}"
    message += f"\n\nRelative error of H_eff: {summary['H_eff_relative_error']:.3e}"
    _log_and_fig(message, fig, out / "controls.png")


def cmd_evolve(cfg, out, verbose=0):
    H = build_target(cfg)
    d, e = cfg["drive"], cfg["evolve"]
    sector = cfg.sector()
    if not 1 <= e["state"] <= sector.dim:
        raise ConfigError(f"Initial state must lie in [1, {sector.dim}], got {e['state']}.")

    drive = build_drive(cfg)
    problem = drive.problem(sector, d["N"], d["T"])
    if e["controls"] is not None:
        seq = io.read_controls(e["controls"])
    else:
        _, _, seq, _ = _optimize(cfg, H, verbose)
        io.write_controls(seq, out / "controls.csv", cfg.to_dict())
    result = floquet_from_controls(problem, seq, H)

    psi0 = np.zeros(sector.dim, dtype=complex)
    psi0[e["state"] - 1] = 1.0
    states = stroboscopic_evolve(result.floquet_op, psi0, e["periods"])
    exact = stroboscopic_evolve(target_unitary(H, d["T"]), psi0, e["periods"])

    df = pd.DataFrame(np.abs(states) ** 2, columns=[f"p_{i + 1}" for i in range(sector.dim)])
    df.insert(0, "t", d["T"] * np.arange(e["periods"] + 1))
    df.insert(0, "period", np.arange(e["periods"] + 1))
    df["target_overlap"] = np.abs(np.einsum("ni,ni->n", exact.conj(), states)) ** 2
    io.write_csv(df, out / "populations.csv", cfg.to_dict())

    logger.info(
        f"Stroboscopic evolution over {e['periods']} periods\n"
        + df[["period", "t", "target_overlap"]].to_markdown(
            tablefmt="github", floatfmt=".6f", index=False
        )
    )


def cmd_adiabatic(cfg, out, verbose=0):
    if cfg["target"]["family"] != "sat":
        raise ConfigError("The adiabatic sweep runs on satisfiability targets (--target sat).")
    d, a = cfg["drive"], cfg["adiabatic"]
    system = _clause_system(cfg)
    sector = cfg.sector()
    n_qubits = sat.DEFAULT_ENCODING.n_qubits
    if 2**n_qubits != sector.L or system.n_vars != n_qubits:
        raise ConfigError(f"The sweep requires {n_qubits} variables on {2**n_qubits} sites.")

    H_final = build_target(cfg)
    H_diag = sat.diag_initial_hamiltonian(n_qubits, cfg["target"]["omega"])
    cost = sat.cost_operator(system).in_sector(sector)
    config = cfg.to_dict()

    try:
        trajectory = adiabatic_sweep(
            H_diag,
            H_final,
            a["cycles"],
            build_drive(cfg),
            d["N"],
            d["T"],
            options=cfg.grape_options(),
            schedule=a["schedule"],
            fidelity_floor=a["fidelity_floor"],
            cost=cost,
            readout=sat.readout_assignment,
            verbose=verbose,
        )
    except SweepAbortedError as err:
        io.write_trajectory(err.trajectory, out / "trajectory.csv", config)
        raise

    io.write_trajectory(trajectory, out / "trajectory.csv", config)
    io.write_trajectory(trajectory, out / "trajectory.json", config)
    if a["archive"]:
        io.save_archive(trajectory.controls, out / "controls.pkl")

    bits = trajectory.final["bits"]
    summary = {
        "bits": None if bits is None else list(bits),
        "ground_fidelity": trajectory.final["ground_fidelity"],
        "satisfied": None if bits is None else sat.evaluate_system(system, bits) == 0,
    }
    io.write_json(summary, out / "summary.json", config)
    decoded = "ambiguous" if bits is None else "".join(map(str, bits))
    logger.info(f"Decoded assignment (a1, a2, a3): {decoded}")


def cmd_sweep(cfg, out, verbose=0):
    s, d = cfg["sweep"], cfg["drive"]
    n_jobs = os.cpu_count() if s["n_jobs"] is None else s["n_jobs"]
    options = cfg.grape_options()
    config = cfg.to_dict()

    if s["mode"] == "grid":
        df = fidelity_grid(
            build_drive(cfg),
            cfg.sector(),
            build_target(cfg),
            s["T_values"],
            s["N_values"],
            options,
            n_jobs,
            verbose,
        )
        io.write_csv(df, out / "grid.csv", config)

    elif s["mode"] == "tmin":
        df, fit = tmin_scaling(
            partial(_drive_for_length, config),
            partial(_target_for_length, config),
            s["L_values"],
            s["tau"],
            s["threshold"],
            s["N_max"],
            options,
            n_jobs,
            verbose,
        )
        io.write_csv(df, out / "tmin.csv", config)
        io.write_json(fit, out / "fit.json", config)

    else:
        sector = cfg.sector()
        if not sector.hardcore:
            raise SectorError("Many-body lifts require hardcore statistics.")
        single = Sector(sector.L, 1, "hardcore")
        H_single = build_target(cfg, single)
        drive = build_drive(cfg)
        problem = drive.problem(single, d["N"], d["T"])
        seq, _ = optimize(problem, expm_i(H_single, d["T"]), options)
        df = lift_fidelities(drive, seq, d["T"], s["M_values"], H_single)
        io.write_controls(seq, out / "controls.csv", config)
        io.write_csv(df, out / "lift.csv", config)


COMMANDS = {
    "basis": cmd_basis,
    "target": cmd_target,
    "optimize": cmd_optimize,
    "evolve": cmd_evolve,
    "adiabatic": cmd_adiabatic,
    "sweep": cmd_sweep,
}


def main(argv=None):
    args = make_parser().parse_args(argv)
    try:
        cfg = RunConfig.resolve(args.config, _overrides(args))
    except ConfigError as err:
        logger.error(f"Configuration error: {err}")
        return 1

    out = cfg.output_dir / args.command
    with _file_logger(out / "run.log"):
        try:
            COMMANDS[args.command](cfg, out, args.verbose)
        except ValueError as err:
            logger.error(f"Configuration error: {err}")
            return 1
        except (NumericalError, SweepAbortedError) as err:
            logger.error(f"Numerical failure: {err}")
            return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
