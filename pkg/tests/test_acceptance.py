"""Desk-scale reproductions of the reference experiments; run with ``pytest -m slow``."""

from dataclasses import replace
from functools import partial

import numpy as np
import pytest

from floquet_engineering.basis import Sector
from floquet_engineering.drives import ChainDrive
from floquet_engineering.floquet import (
    adiabatic_sweep,
    floquet_from_controls,
    lift_single_particle,
    target_unitary,
)
from floquet_engineering.grape import GrapeOptions, Objective, optimize
from floquet_engineering.numerics import eigh
from floquet_engineering.operators import build_target_boson, build_target_spin_jw
from floquet_engineering.results import tmin_scaling
from floquet_engineering.targets import graphs, molecules, sat

pytestmark = pytest.mark.slow

options = GrapeOptions(restarts=10, seed=0)


def _star_target(L, K=0.1):
    return build_target_spin_jw(L, graphs.make_graph("star", L, K), 1)


def _best_fidelity(drive, sector, H, N, T):
    problem = drive.problem(sector, N, T)
    _, report = optimize(problem, target_unitary(H, T), options)
    return report.best_fidelity


def test_star():
    F = _best_fidelity(ChainDrive.onsite(9), Sector(9, 1, "hardcore"), _star_target(9), 10, 10.0)
    assert F >= 0.999


def test_all_to_all_bosons():
    sector = Sector(8, 2, "bosonic")
    H = build_target_boson(sector, graphs.all_to_all(8, K=0.1), U=4.0)
    drive = ChainDrive.onsite_coupling(8, U=4.0)
    assert _best_fidelity(drive, sector, H, 30, 15.0) >= 0.99


def test_ring_lift():
    L, N, T = 8, 10, 10.0
    drive = ChainDrive.onsite(L)
    H_single = build_target_spin_jw(L, graphs.ring(L, K=0.1), 1)
    problem = drive.problem(Sector(L, 1, "hardcore"), N, T)
    seq, report = optimize(problem, target_unitary(H_single, T), options)

    for M in (2, 3, 4):
        result = lift_single_particle(drive, seq, T, Sector(L, M, "hardcore"), H_single)
        assert result.meta["oracle_error"] <= 1e-9
        assert abs(result.fidelity_to_target - report.best_fidelity) <= 0.05


def test_step_count_thresholds():
    sector = Sector(9, 1, "hardcore")
    H = _star_target(9)
    F_4 = _best_fidelity(ChainDrive.onsite(9), sector, H, 4, 10.0)
    F_10 = _best_fidelity(ChainDrive.onsite(9), sector, H, 10, 10.0)
    assert F_4 < F_10 - 0.01
    assert _best_fidelity(ChainDrive.onsite_coupling(9), sector, H, 4, 10.0) >= 0.99


def test_tmin_slope():
    df, fit = tmin_scaling(
        ChainDrive.onsite,
        partial(_star_target, K=0.1),
        range(5, 11),
        tau=1.0,
        threshold=0.999,
        options=options,
    )
    assert df["T_min"].notna().all()
    assert np.all(np.diff(df["T_min"]) >= 0)
    assert 0.30 <= fit["slope"] <= 0.65


def test_adiabatic_sat():
    omega = 0.25
    trajectory = adiabatic_sweep(
        sat.diag_initial_hamiltonian(3, omega),
        sat.sat_hamiltonian(omega),
        200,
        ChainDrive.onsite(8),
        N=11,
        T=6.38,
        options=options,
        cost=sat.cost_operator(),
        readout=sat.readout_assignment,
    )
    df = trajectory.to_frame()
    assert trajectory.final["ground_fidelity"] >= 0.9
    assert df["ground_fidelity"].min() >= 0.5
    assert trajectory.final["bits"] == (0, 0, 1)


def test_lih():
    """
    LiH as a 16-site single-excitation target.

    The tabulated matrix is centered and rescaled so that its spectrum spans 90% of the
    quasienergy zone at T = 16; unscaled, its eigenvalues exceed pi/T and the effective
    Hamiltonian of the optimized drive would fold.
    """
    N, T = 16, 16.0
    H = molecules.lih_hamiltonian()
    w = eigh(H.centered()).eigenvalues
    H = molecules.lih_hamiltonian(scale=0.9 * np.pi / (T * np.abs(w).max())).centered()

    problem = ChainDrive.onsite(16).problem(H.sector, N, T)
    real_options = replace(options, objective=Objective.REAL)
    seq, report = optimize(problem, target_unitary(H, T), real_options)
    result = floquet_from_controls(problem, seq, H)

    assert report.best_fidelity >= 0.99
    error = np.linalg.norm(result.H_eff.matrix - H.matrix) / np.linalg.norm(H.matrix)
    assert error <= 0.1
