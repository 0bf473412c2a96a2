"""Batch evaluation of drives: fidelity grids, minimal-period scaling, many-body lifts."""

import logging
import sys
from contextlib import contextmanager
from dataclasses import replace
from multiprocessing import Pool
from pathlib import Path

import numpy as np
import pandas as pd
from matplotlib import pyplot as plt
from tqdm import tqdm

from floquet_engineering.basis import Sector
from floquet_engineering.floquet import lift_single_particle, target_unitary
from floquet_engineering.grape import GrapeOptions, optimize

# Logging
logger = logging.getLogger("floquet_engineering")
logger.setLevel(logging.INFO)
out_handler = logging.StreamHandler(stream=sys.stdout)
out_formatter = logging.Formatter("\n# %(asctime)s\n%(message)s\n", datefmt="%Y-%m-%d %H:%M:%S")
out_handler.setFormatter(out_formatter)
logger.addHandler(out_handler)


@contextmanager
def _file_logger(file, file_format="\n# %(asctime)s\n%(message)s\n"):
    if file is not None:
        file = Path(file)
        file.parent.mkdir(parents=True, exist_ok=True)

        file_handler = logging.FileHandler(file)
        file_formatter = logging.Formatter(file_format, datefmt="%Y-%m-%d %H:%M:%S")
        file_handler.setFormatter(file_formatter)

        logger.addHandler(file_handler)
        try:
            yield logger
        finally:
            logger.removeHandler(file_handler)
            file_handler.close()
    else:
        yield logger


def _log_and_fig(message, fig=None, img_path=None):
    """Log the message; save the figure and link it relative to the log directory."""
    if fig is not None and img_path is not None:
        img_path = Path(img_path)
        img_path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(img_path)
        plt.close(fig)
        message += f"\n\n![]({img_path.name})"
    logger.info(message)


def _point_seeds(seed, n):
    """Independent integer seeds for `n` grid points."""
    children = np.random.SeedSequence(seed).spawn(n)
    return [int(child.generate_state(1)[0]) for child in children]


def _map(func, tasks, n_jobs, verbose, desc):
    """Evaluate grid points in order, on a worker pool if requested; results collected here."""
    if n_jobs is not None and n_jobs > 1 and len(tasks) > 1:
        with Pool(min(n_jobs, len(tasks))) as pool:
            it = pool.imap(func, tasks)
            return list(tqdm(it, total=len(tasks), desc=desc, disable=not verbose))
    return [func(task) for task in tqdm(tasks, desc=desc, disable=not verbose)]


def _grid_point(args):
    drive, sector, H_target, T, N, options = args
    problem = drive.problem(sector, N, T)
    _, report = optimize(problem, target_unitary(H_target, T), options)
    return {
        "T": T,
        "N": N,
        "tau": T / N,
        "fidelity": report.best_fidelity,
        "iterations": report.iterations,
        "best_restart": report.best_restart,
    }


def fidelity_grid(drive, sector, H_target, T_values, N_values, options=None, n_jobs=1, verbose=0):
    """
    Best fidelity over a grid of periods and step counts.

    Parameters
    ----------
    drive : ChainDrive
    sector : Sector
    H_target : HermitianOperator
    T_values : Sequence of float
        Periods in units of 1/J.
    N_values : Sequence of int
        Numbers of time steps.
    options : GrapeOptions, optional
        Optimizer settings; each grid point receives its own seed spawned from ``options.seed``.
    n_jobs : int, optional
        Worker processes for grid points.
    verbose : int, optional
        Progress bar.

    Returns
    -------
    pandas.DataFrame
        One row per ``(T, N)`` grid point.

    """
    options = GrapeOptions() if options is None else options
    points = [(T, N) for T in T_values for N in N_values]
    seeds = _point_seeds(options.seed, len(points))
    tasks = [
        (drive, sector, H_target, float(T), int(N), replace(options, seed=s, n_jobs=1))
        for (T, N), s in zip(points, seeds)
    ]
    df = pd.DataFrame(_map(_grid_point, tasks, n_jobs, verbose, "Grid"))
    logger.info(
        "Fidelity grid\n"
        + df.pivot(index="T", columns="N", values="fidelity").to_markdown(
            tablefmt="github", floatfmt=".4f"
        )
    )
    return df


def _tmin_search(args):
    L, make_drive, make_target, tau, threshold, N_max, options = args
    drive, H_target = make_drive(L), make_target(L)
    sector = H_target.sector or Sector(L, 1, "hardcore")

    row = {"L": L, "T_min": np.nan, "N": np.nan, "fidelity": np.nan}
    for N in range(1, N_max + 1):
        T = N * tau
        problem = drive.problem(sector, N, T)
        seed = int(np.random.SeedSequence([options.seed, N]).generate_state(1)[0])
        _, report = optimize(problem, target_unitary(H_target, T), replace(options, seed=seed))
        row["fidelity"] = report.best_fidelity
        if report.best_fidelity > threshold:
            row |= {"T_min": T, "N": N}
            break
    return row


def tmin_scaling(
    make_drive,
    make_target,
    L_values,
    tau=1.0,
    threshold=0.999,
    N_max=40,
    options=None,
    n_jobs=1,
    verbose=0,
):
    """
    Minimal period reaching a fidelity threshold at fixed step length, versus chain length.

    For every `L` the number of steps grows from 1 until the best fidelity exceeds `threshold`;
    the resulting ``T_min = N * tau`` values are fitted with a straight line.

    Parameters
    ----------
    make_drive : callable
        Maps `L` to a `ChainDrive`; must be picklable when ``n_jobs > 1``.
    make_target : callable
        Maps `L` to the target `HermitianOperator`; must be picklable when ``n_jobs > 1``.
    L_values : Sequence of int
    tau : float, optional
        Step length in units of 1/J.
    threshold : float, optional
        Fidelity to exceed.
    N_max : int, optional
        Largest number of steps tried.
    options : GrapeOptions, optional
    n_jobs : int, optional
        Worker processes, one chain length each.
    verbose : int, optional
        Progress bar.

    Returns
    -------
    pandas.DataFrame
        Columns ``L, T_min, N, fidelity``; ``T_min`` is NaN if `N_max` steps do not suffice.
    dict
        Least-squares fit ``T_min = slope * L + intercept`` over the lengths that succeeded.

    """
    options = GrapeOptions() if options is None else options
    seeds = _point_seeds(options.seed, len(L_values))
    tasks = [
        (int(L), make_drive, make_target, tau, threshold, N_max, replace(options, seed=s, n_jobs=1))
        for L, s in zip(L_values, seeds)
    ]
    df = pd.DataFrame(_map(_tmin_search, tasks, n_jobs, verbose, "Chain lengths"))

    found = df.dropna(subset=["T_min"])
    if len(found) >= 2:
        slope, intercept = np.polyfit(found["L"], found["T_min"], 1)
    else:
        slope = intercept = np.nan
    fit = {"slope": float(slope), "intercept": float(intercept)}

    logger.info(
        f"Minimal period at tau = {tau}\n{df.to_markdown(tablefmt='github', floatfmt='.4f')}"
        f"\n\nT_min = {fit['slope']:.4f} L + {fit['intercept']:.4f}"
    )
    return df, fit


def lift_fidelities(drive, seq, T, M_values, target_single):
    """
    Fidelity of one single-excitation drive in hardcore sectors with `M` excitations.

    Parameters
    ----------
    drive : ChainDrive
    seq : ControlSequence
    T : float
        Period in units of 1/J.
    M_values : Sequence of int
    target_single : HermitianOperator
        Single-excitation target Hamiltonian.

    Returns
    -------
    pandas.DataFrame
        Columns ``M, dim, fidelity, oracle_error``.

    """
    rows = []
    for M in M_values:
        result = lift_single_particle(drive, seq, T, Sector(drive.L, M, "hardcore"), target_single)
        rows.append(
            {
                "M": M,
                "dim": result.floquet_op.dim,
                "fidelity": result.fidelity_to_target,
                "oracle_error": result.meta["oracle_error"],
            }
        )
    df = pd.DataFrame(rows)
    logger.info(f"Many-body lift\n{df.to_markdown(tablefmt='github', floatfmt='.6f', index=False)}")
    return df
