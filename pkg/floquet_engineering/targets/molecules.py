"""Molecular target Hamiltonians stored as data tables."""

from pathlib import Path

import numpy as np

from floquet_engineering.basis import Sector
from floquet_engineering.operators import HermitianOperator

DATA_DIR = Path(__file__).parent / "data"


def load_matrix(path):
    """Whitespace-separated real matrix; the table must already be symmetric."""
    matrix = np.loadtxt(path, dtype=float, ndmin=2)
    if matrix.shape[0] != matrix.shape[1] or not np.array_equal(matrix, matrix.T):
        raise ValueError(f"Matrix table {path} is not square and symmetric.")
    return matrix


def lih_hamiltonian(scale=1.0):
    """
    Four-qubit LiH Hamiltonian at bond distance, as a single-excitation target on 16 sites.

    Parameters
    ----------
    scale : float, optional
        Multiplier of the tabulated entries (units of J).

    Returns
    -------
    HermitianOperator
        Operator on ``Sector(16, 1, "hardcore")``.

    """
    matrix = load_matrix(DATA_DIR / "lih.txt")
    return HermitianOperator(scale * matrix, Sector(16, 1, "hardcore"))
