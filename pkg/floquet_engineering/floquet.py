"""Floquet operators, effective Hamiltonians, stroboscopic and adiabatic evolution."""

import logging
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
import pandas as pd
from tqdm import trange

from floquet_engineering.base import AmbiguousReadoutError, SectorError, SweepAbortedError
from floquet_engineering.basis import Sector
from floquet_engineering.grape import GrapeOptions, Objective, optimize, propagate
from floquet_engineering.numerics import (
    UnitaryOperator,
    compound_matrix,
    eigh,
    expm_i,
    fidelity_abs,
    fidelity_real,
    floquet_spectrum,
    logm_unitary,
)
from floquet_engineering.operators import HermitianOperator

logger = logging.getLogger(__name__)

SCHEDULES = {
    "linear": lambda s: s,
    "smoothstep": lambda s: s * s * (3 - 2 * s),
}


def target_unitary(H, T):
    """One-period propagator ``exp(-i H T)`` of a target Hamiltonian."""
    return expm_i(H, T)


@dataclass
class FloquetResult:
    """
    One-period propagator with its effective Hamiltonian and quasienergies.

    Parameters
    ----------
    floquet_op : UnitaryOperator
    H_eff : HermitianOperator
        Principal-branch generator, ``expm_i(H_eff, T) == floquet_op``.
    quasienergies : numpy.ndarray
        Ascending, in ``(-pi/T, pi/T]``.
    T : float
        Period in units of 1/J.
    fidelity_to_target : float, optional
    meta : dict, optional

    """

    floquet_op: UnitaryOperator
    H_eff: HermitianOperator
    quasienergies: np.ndarray
    T: float
    fidelity_to_target: Optional[float] = None
    meta: dict = field(default_factory=dict)

    def summary(self):
        series = pd.Series(
            {
                "dimension": self.floquet_op.dim,
                "period T": self.T,
                "fidelity": np.nan if self.fidelity_to_target is None else self.fidelity_to_target,
                "min quasienergy": self.quasienergies[0],
                "max quasienergy": self.quasienergies[-1],
            },
            name="value",
        )
        return f"FloquetResult\n{series.to_markdown(tablefmt='github', floatfmt='.6f')}"


def floquet_from_controls(problem, seq, target=None, objective=Objective.ABS):
    """
    Floquet operator, effective Hamiltonian and quasienergies of a control sequence.

    Parameters
    ----------
    problem : ControlProblem
    seq : ControlSequence
    target : UnitaryOperator or HermitianOperator, optional
        Target propagator, or target Hamiltonian evolved over one period.
    objective : Objective or str, optional
        Fidelity used for the comparison with `target`.

    Returns
    -------
    FloquetResult

    """
    F = propagate(problem, seq)
    H_eff = logm_unitary(F, problem.T)
    quasienergies = floquet_spectrum(F, problem.T).eigenvalues

    fidelity = None
    if target is not None:
        if isinstance(target, HermitianOperator):
            target = target_unitary(target, problem.T)
        fid_func = fidelity_real if Objective(objective) is Objective.REAL else fidelity_abs
        fidelity = fid_func(target, F)
    return FloquetResult(F, H_eff, quasienergies, problem.T, fidelity, dict(H_eff.meta))


def stroboscopic_evolve(F, psi0, n_periods):
    """
    States ``F^n psi0`` for ``n = 0 .. n_periods``.

    Parameters
    ----------
    F : UnitaryOperator or array_like
    psi0 : array_like
        Normalized initial state.
    n_periods : int

    Returns
    -------
    numpy.ndarray
        Shape (n_periods + 1, D).

    """
    F = np.asarray(getattr(F, "matrix", F))
    psi = np.asarray(psi0, dtype=complex)
    if psi.shape != (F.shape[0],):
        raise ValueError(f"State of shape {psi.shape} does not match dimension {F.shape[0]}.")
    if abs(np.linalg.norm(psi) - 1) > 1e-9:
        raise ValueError("Initial state must be normalized.")
    if n_periods < 0:
        raise ValueError(f"Number of periods must be non-negative, got {n_periods}.")

    out = np.empty((n_periods + 1, psi.size), dtype=complex)
    out[0] = psi
    for n in range(n_periods):
        out[n + 1] = F @ out[n]
    return out


def lift_single_particle(drive, seq, T, sector, target_single):
    """
    Replay a single-excitation control sequence in a many-excitation hardcore sector.

    Parameters
    ----------
    drive : ChainDrive
    seq : ControlSequence
        Sequence optimized for one excitation.
    T : float
        Period in units of 1/J.
    sector : Sector
        Hardcore sector to evolve.
    target_single : HermitianOperator
        Single-excitation target; its free-fermion propagator in `sector` is the reference.

    Returns
    -------
    FloquetResult
        With ``fidelity_to_target`` (AbsTrace) and ``meta["oracle_error"]``, the largest
        deviation from the free-fermion propagator of the same drive.

    """
    if not sector.hardcore:
        raise SectorError("The single-particle lift requires hardcore statistics.")

    single = drive.problem(Sector(sector.L, 1, "hardcore"), seq.N, T)
    F_1 = propagate(single, seq)
    problem = drive.problem(sector, seq.N, T)

    result = floquet_from_controls(problem, seq)
    oracle = compound_matrix(F_1, sector.M)
    reference = compound_matrix(target_unitary(target_single, T), sector.M)

    result.fidelity_to_target = fidelity_abs(reference, result.floquet_op)
    result.meta["oracle_error"] = float(np.abs(result.floquet_op.matrix - oracle.matrix).max())
    return result


@dataclass
class AdiabaticTrajectory:
    """Per-cycle records of an adiabatic sweep and the control sequence of every cycle."""

    records: list = field(default_factory=list)
    controls: list = field(default_factory=list)

    def __len__(self):
        return len(self.records)

    @property
    def final(self):
        return self.records[-1]

    def to_frame(self):
        """One row per cycle; quasienergies in columns ``e_0 .. e_{D-1}``."""
        rows = []
        for rec in self.records:
            row = {k: v for k, v in rec.items() if k not in ("quasienergies", "bits")}
            row["bits"] = "" if rec["bits"] is None else "".join(map(str, rec["bits"]))
            row |= {f"e_{i}": e for i, e in enumerate(rec["quasienergies"])}
            rows.append(row)
        return pd.DataFrame(rows)

    def summary(self):
        df = self.to_frame()[["cycle", "lambda", "fidelity", "ground_fidelity", "cost_expectation"]]
        if len(df) > 10:
            df = df.iloc[np.unique(np.linspace(0, len(df) - 1, 10).astype(int))]
        str_ = df.to_markdown(tablefmt="github", floatfmt=".4f", index=False)
        return f"AdiabaticTrajectory ({len(self)} cycles)\n{str_}"


def adiabatic_sweep(
    H_diag,
    H_final,
    cycles,
    drive,
    N,
    T,
    options=None,
    schedule="linear",
    fidelity_floor=0.999,
    centered=True,
    cost=None,
    readout=None,
    verbose=0,
):
    """
    Track the ground state of ``(1 - lam) H_diag + lam H_final`` with one drive period per step.

    At every cycle the drive is re-optimized (RealTrace) for the current interpolated target,
    warm-started from the previous cycle, and the state is advanced by one Floquet period. A
    cycle whose target equals the previous one keeps the previous drive.

    Parameters
    ----------
    H_diag, H_final : HermitianOperator
        Initial and final single-excitation Hamiltonians on ``drive.L`` sites.
    cycles : int
        Number of deformation steps; ``lam`` runs over ``cycles + 1`` values from 0 to 1.
    drive : ChainDrive
    N : int
        Time steps per period.
    T : float
        Period in units of 1/J.
    options : GrapeOptions, optional
        Settings of the first (cold-start) optimization; later cycles use one warm restart.
    schedule : {"linear", "smoothstep"}, optional
        Map from ``n / cycles`` to ``lam``.
    fidelity_floor : float, optional
        Minimum optimized fidelity per cycle.
    centered : bool, optional
        Remove the trace of every target so its spectrum fits the quasienergy zone.
    cost : HermitianOperator, optional
        Observable recorded as ``cost_expectation``; defaults to `H_final`.
    readout : callable, optional
        Maps the state to an assignment; ambiguous readouts are recorded as None.
    verbose : int, optional
        Progress bar over cycles.

    Returns
    -------
    AdiabaticTrajectory

    Raises
    ------
    SweepAbortedError
        If a cycle's optimized fidelity falls below `fidelity_floor`; carries the trajectory up
        to and including that cycle.

    """
    if cycles < 1:
        raise ValueError(f"At least one cycle is required, got {cycles}.")
    if schedule not in SCHEDULES:
        raise ValueError(f"Unknown schedule {schedule!r}; choose from {sorted(SCHEDULES)}.")
    if options is None:
        options = GrapeOptions()
    options = replace(options, objective=Objective.REAL, n_jobs=1)

    sector = Sector(drive.L, 1, "hardcore")
    H_diag, H_final = H_diag.in_sector(sector), H_final.in_sector(sector)
    cost = H_final if cost is None else cost
    problem = drive.problem(sector, N, T)

    def target(lam):
        H = H_diag + lam * (H_final - H_diag)
        return H.centered() if centered else H

    psi = eigh(target(0.0)).ground_state.astype(complex)
    trajectory = AdiabaticTrajectory()
    seq, H_prev = None, None
    for n in trange(cycles + 1, desc="Cycles", disable=not verbose):
        lam = float(SCHEDULES[schedule](n / cycles))
        H_lam = target(lam)
        if H_prev is None or not np.array_equal(H_lam.matrix, H_prev.matrix):
            opts = options if seq is None else replace(options, init=seq.u, restarts=1)
            if seq is not None and options.seed is not None:
                child = np.random.SeedSequence([options.seed, n]).generate_state(1)[0]
                opts = replace(opts, seed=int(child))
            seq, report = optimize(problem, target_unitary(H_lam, T), opts)
            F = propagate(problem, seq)
            spectrum = floquet_spectrum(F, T)
        H_prev = H_lam

        psi = F @ psi
        bits = None
        if readout is not None:
            try:
                bits = tuple(readout(psi))
            except AmbiguousReadoutError:
                pass

        record = {
            "cycle": n,
            "lambda": lam,
            "fidelity": report.best_fidelity,
            "ground_fidelity": float(np.abs(np.vdot(spectrum.ground_state, psi)) ** 2),
            "cost_expectation": float(np.vdot(psi, cost.matrix @ psi).real),
            "quasienergies": spectrum.eigenvalues,
            "bits": bits,
        }
        trajectory.records.append(record)
        trajectory.controls.append(seq)
        logger.debug(
            f"Cycle {n}: lambda = {lam:.4f}, F = {record['fidelity']:.6f}, "
            f"ground fidelity = {record['ground_fidelity']:.6f}"
        )

        if report.best_fidelity < fidelity_floor:
            raise SweepAbortedError(
                f"Cycle {n} reached fidelity {report.best_fidelity:.6f} below the floor "
                f"{fidelity_floor}.",
                trajectory,
            )

    logger.info(trajectory.summary())
    return trajectory
