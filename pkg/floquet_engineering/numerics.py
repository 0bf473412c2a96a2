"""Dense Hermitian and unitary linear algebra: spectra, exponentials, logarithms, fidelities."""

from dataclasses import dataclass, field
from typing import Optional
from warnings import warn

import numpy as np
from scipy import linalg

from floquet_engineering.base import FloquetWarning, NumericalError, RandomGeneratorMixin
from floquet_engineering.basis import Sector
from floquet_engineering.operators import HermitianOperator

UNITARY_ATOL = 1e-9
BRANCH_CUT_TOL = 1e-12


def _as_array(op):
    return op.matrix if hasattr(op, "matrix") else np.asarray(op, dtype=complex)


@dataclass(frozen=True)
class EigenSystem:
    """Ascending eigenvalues and the unitary matrix of column eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __iter__(self):
        return iter((self.eigenvalues, self.eigenvectors))

    @property
    def ground_state(self):
        return self.eigenvectors[:, 0]


@dataclass(frozen=True)
class UnitaryOperator:
    """
    Dense unitary matrix, e.g. a step propagator or a Floquet operator.

    Parameters
    ----------
    matrix : array_like
        Square complex matrix.
    sector : Sector, optional
        Basis the matrix is written in.
    check : bool, optional
        Validate unitarity to `UNITARY_ATOL`.

    """

    matrix: np.ndarray
    sector: Optional[Sector] = None
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"Operator matrix must be square, got shape {matrix.shape}.")
        if self.check:
            deviation = unitarity_error(matrix)
            if deviation > UNITARY_ATOL:
                raise ValueError(f"Matrix is not unitary (max deviation {deviation:.3e}).")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def H(self):
        return UnitaryOperator(self.matrix.conj().T, self.sector, check=False)

    def __matmul__(self, other):
        if isinstance(other, UnitaryOperator):
            return UnitaryOperator(self.matrix @ other.matrix, self.sector, check=False)
        return self.matrix @ np.asarray(other)

    @classmethod
    def identity(cls, dim, sector=None):
        return cls(np.eye(dim, dtype=complex), sector)


def unitarity_error(U):
    U = _as_array(U)
    return np.abs(U.conj().T @ U - np.eye(U.shape[0])).max(initial=0.0)


def is_unitary(U, atol=1e-10):
    """Check ``U^dag U = I`` elementwise to `atol`."""
    return unitarity_error(U) <= atol


def eigh(H):
    """
    Eigendecomposition of a Hermitian operator.

    Parameters
    ----------
    H : HermitianOperator or array_like

    Returns
    -------
    EigenSystem
        Ascending eigenvalues and column eigenvectors.

    Raises
    ------
    NumericalError
        If the LAPACK driver does not converge.

    """
    matrix = _as_array(H)
    try:
        w, v = linalg.eigh(matrix, check_finite=True)
    except (linalg.LinAlgError, ValueError) as err:
        diagnostics = {
            "dim": matrix.shape[0],
            "max_abs": float(np.nanmax(np.abs(matrix))) if matrix.size else 0.0,
            "finite": bool(np.isfinite(matrix).all()),
            "lapack": str(err),
        }
        raise NumericalError("Hermitian eigensolver did not converge.", diagnostics) from err
    return EigenSystem(w, v)


def expm_i(H, t):
    """
    Propagator ``exp(-i H t)`` via the spectral decomposition of `H`.

    Parameters
    ----------
    H : HermitianOperator or array_like
    t : float
        Duration in units of 1/J.

    Returns
    -------
    UnitaryOperator

    """
    w, v = eigh(H)
    U = (v * np.exp(-1j * w * t)) @ v.conj().T
    return UnitaryOperator(U, getattr(H, "sector", None))


def _quasienergies(F, T):
    """Eigenphases of a unitary folded to ``(-pi/T, pi/T]``, with the Schur basis."""
    if T <= 0:
        raise ValueError(f"Period must be positive, got {T}.")
    matrix = _as_array(F)
    try:
        S, Z = linalg.schur(matrix, output="complex")
    except (linalg.LinAlgError, ValueError) as err:
        raise NumericalError("Schur decomposition failed.", {"dim": matrix.shape[0]}) from err

    phases = np.angle(np.diag(S))
    near_cut = bool(np.any(np.abs(phases) > np.pi - BRANCH_CUT_TOL))
    eps = -phases / T
    eps[eps <= -np.pi / T] += 2 * np.pi / T
    return eps, Z, near_cut


def logm_unitary(F, T):
    """
    Effective Hamiltonian ``(i/T) log F`` on the principal branch.

    Quasienergies are confined to ``(-pi/T, pi/T]``. Eigenphases within `BRANCH_CUT_TOL`
    of the cut are not unwrapped: a `FloquetWarning` is emitted and the flag
    ``meta["near_branch_cut"]`` is set on the result.

    Parameters
    ----------
    F : UnitaryOperator or array_like
    T : float
        Period in units of 1/J.

    Returns
    -------
    HermitianOperator

    """
    eps, Z, near_cut = _quasienergies(F, T)
    if near_cut:
        warn(
            "Floquet eigenphase at the branch cut; effective Hamiltonian is ambiguous.",
            FloquetWarning,
        )

    H = (Z * eps) @ Z.conj().T
    H = (H + H.conj().T) / 2
    return HermitianOperator(H, getattr(F, "sector", None), meta={"near_branch_cut": near_cut})


def floquet_spectrum(F, T):
    """
    Quasienergies and Floquet states of a one-period propagator.

    Parameters
    ----------
    F : UnitaryOperator or array_like
    T : float
        Period in units of 1/J.

    Returns
    -------
    EigenSystem
        Quasienergies in ``(-pi/T, pi/T]``, ascending, with the Floquet states as columns.

    """
    eps, Z, _ = _quasienergies(F, T)
    order = np.argsort(eps, kind="stable")
    return EigenSystem(eps[order], Z[:, order])


def fidelity_abs(F_target, F_trial):
    """Phase-insensitive overlap ``|tr(F_target^dag F_trial)| / D``."""
    A, B = _as_array(F_target), _as_array(F_trial)
    return float(np.abs(np.vdot(A, B)) / A.shape[0])


def fidelity_real(F_target, F_trial):
    """Phase-sensitive overlap ``Re tr(F_target^dag F_trial) / D``."""
    A, B = _as_array(F_target), _as_array(F_trial)
    return float(np.vdot(A, B).real / A.shape[0])


def compound_matrix(U1, M):
    """
    M-th exterior power of a single-particle unitary.

    Element ``(S', S)`` is the determinant of the ``M x M`` submatrix of `U1` whose rows are
    the occupied sites of `S'` and columns the occupied sites of `S`, i.e. the propagator of
    `M` free fermions in the hardcore occupation basis.

    Parameters
    ----------
    U1 : UnitaryOperator or array_like
        ``L x L`` single-particle unitary.
    M : int
        Number of particles.

    Returns
    -------
    UnitaryOperator
        Operator on ``Sector(L, M, "hardcore")``.

    """
    U1 = _as_array(U1)
    L = U1.shape[0]
    sector = Sector(L, M, "hardcore")
    if M == 0:
        return UnitaryOperator(np.ones((1, 1), dtype=complex), sector)

    occ = np.array([np.flatnonzero(state) for state in sector.states])  # (D, M)
    minors = U1[occ[:, None, :, None], occ[None, :, None, :]]  # (D, D, M, M)
    return UnitaryOperator(np.linalg.det(minors), sector)


def random_hermitian(dim, rng=None, scale=1.0):
    """Random dense Hermitian matrix with Gaussian entries of standard deviation `scale`."""
    rng = RandomGeneratorMixin.make_rng(rng)
    A = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return HermitianOperator(scale * (A + A.conj().T) / 2)
