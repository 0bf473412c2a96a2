import numpy as np
import pytest
from scipy.stats import unitary_group

from floquet_engineering.base import FloquetWarning, NumericalError
from floquet_engineering.basis import Sector
from floquet_engineering.numerics import (
    UnitaryOperator,
    compound_matrix,
    eigh,
    expm_i,
    fidelity_abs,
    fidelity_real,
    floquet_spectrum,
    is_unitary,
    logm_unitary,
    random_hermitian,
)
from floquet_engineering.operators import PAULI

seeds = range(10)


def test_expm_unitary():
    for seed in seeds:
        H = random_hermitian(7, rng=seed, scale=2.0)
        U = expm_i(H, 1.3)
        assert is_unitary(U, atol=1e-10)


def test_expm_group_property():
    for seed in seeds:
        H = random_hermitian(5, rng=seed)
        t1, t2 = 0.4 + 0.1 * seed, 1.7
        product = expm_i(H, t1).matrix @ expm_i(H, t2).matrix
        assert np.abs(expm_i(H, t1 + t2).matrix - product).max() <= 1e-10

    assert np.allclose(expm_i(PAULI["X"], np.pi).matrix, -np.eye(2), atol=1e-12)
    assert np.allclose(expm_i(np.zeros((3, 3)), 2.0).matrix, np.eye(3), atol=1e-15)


def test_logm_diagonal():
    T = 2.0
    eps = np.array([0.3, -1.2, 1.5])
    H_eff = logm_unitary(np.diag(np.exp(-1j * eps * T)), T)
    assert np.allclose(H_eff.matrix, np.diag(eps), atol=1e-12)

    # just inside the zone edge the phase is kept, just outside it folds to the other side
    delta = 1e-6
    edge = logm_unitary(np.diag(np.exp(-1j * np.array([np.pi - delta, np.pi + delta]))), 1.0)
    assert np.allclose(np.diag(edge.matrix).real, [np.pi - delta, -np.pi + delta], atol=1e-9)
    assert not edge.meta["near_branch_cut"]



def test_log_exp_round_trip():
    """Spectra inside the quasienergy zone are recovered exactly."""
    T = 1.5
    for seed in seeds:
        H = random_hermitian(6, rng=seed, scale=0.1)
        assert np.abs(eigh(H).eigenvalues).max() < np.pi / T
        H_eff = logm_unitary(expm_i(H, T), T)
        assert np.abs(H_eff.matrix - H.matrix).max() <= 1e-9
        assert not H_eff.meta["near_branch_cut"]


def test_quasienergy_zone():
    T = 2.0
    for seed in seeds:
        F = unitary_group.rvs(6, random_state=seed)
        eps = floquet_spectrum(F, T).eigenvalues
        assert np.all(eps > -np.pi / T) and np.all(eps <= np.pi / T)
        assert np.all(np.diff(eps) >= 0)

        # Floquet states diagonalize F
        _, Z = floquet_spectrum(F, T)
        assert np.allclose(F @ Z, Z * np.exp(-1j * eps * T), atol=1e-10)


def test_branch_cut():
    F = np.diag([-1.0, 1.0]).astype(complex)
    with pytest.warns(FloquetWarning):
        H_eff = logm_unitary(F, 1.0)
    assert H_eff.meta["near_branch_cut"]

    eps = floquet_spectrum(F, 1.0).eigenvalues
    assert np.allclose(eps, [0.0, np.pi])


def test_fidelities():
    U = unitary_group.rvs(5, random_state=1)
    phi = 0.4
    assert fidelity_abs(U, U) == pytest.approx(1.0)
    assert fidelity_abs(U, np.exp(1j * phi) * U) == pytest.approx(1.0)
    assert fidelity_real(U, np.exp(1j * phi) * U) == pytest.approx(np.cos(phi))


def test_unitary_check():
    with pytest.raises(ValueError):
        UnitaryOperator(2 * np.eye(3))
    identity = UnitaryOperator.identity(3)
    assert np.array_equal((identity @ identity).matrix, np.eye(3))


def test_compound_matrix():
    L = 6
    for seed in seeds:
        U = unitary_group.rvs(L, random_state=seed)
        V = unitary_group.rvs(L, random_state=100 + seed)

        assert np.allclose(compound_matrix(U, 1).matrix, U, atol=1e-12)
        assert np.allclose(compound_matrix(U, 0).matrix, [[1.0]])
        assert np.isclose(compound_matrix(U, L).matrix[0, 0], np.linalg.det(U))

        for M in (2, 3):
            C = compound_matrix(U @ V, M)
            assert C.sector == Sector(L, M, "hardcore")
            product = compound_matrix(U, M) @ compound_matrix(V, M)
            assert np.abs(C.matrix - product.matrix).max() <= 1e-9
            assert is_unitary(C, atol=1e-10)


def test_eigh_failure():
    H = np.full((3, 3), np.nan)
    with pytest.raises(NumericalError) as exc_info:
        eigh(H)
    assert exc_info.value.diagnostics["dim"] == 3
    assert not exc_info.value.diagnostics["finite"]
