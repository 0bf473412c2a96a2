from itertools import product

import numpy as np
import pytest

from floquet_engineering.basis import Sector
from floquet_engineering.operators import (
    PAULI,
    ChainDriveFrame,
    CouplingGraph,
    HermitianOperator,
    PauliTermList,
    build_chain,
    build_target_boson,
    build_target_spin_jw,
    hopping_operator,
    pauli_to_matrix,
)
from floquet_engineering.targets.graphs import RandomGraph, all_to_all, chain_graph

g = np.array([0.3, -1.2, 0.7, 2.0])
J = np.array([1.0, -0.5, 0.8])


def test_single_excitation_chain():
    """One excitation: onsite energies on the diagonal, couplings on the first off-diagonals."""
    H = build_chain(Sector(4, 1, "hardcore"), ChainDriveFrame(g, J))
    expected = np.diag(g) + np.diag(J, 1) + np.diag(J, -1)
    assert np.allclose(H.matrix, expected, atol=1e-14)


def test_bosonic_factors():
    sector = Sector(2, 2, "bosonic")
    H = build_chain(sector, ChainDriveFrame([0.0, 0.0], [1.0], U=2.0))
    expected = np.array(
        [
            [2.0, np.sqrt(2), 0.0],
            [np.sqrt(2), 0.0, np.sqrt(2)],
            [0.0, np.sqrt(2), 2.0],
        ]
    )
    assert np.allclose(H.matrix, expected, atol=1e-14)


def test_bosonic_requires_finite_U():
    with pytest.raises(ValueError):
        build_chain(Sector(3, 2, "bosonic"), ChainDriveFrame(g[:3], J[:2]))


def test_pauli_convention():
    frame = ChainDriveFrame([1.0, 3.0], [0.0])
    H = build_chain(Sector(2, 1, "hardcore"), frame, convention="pauli")
    assert np.allclose(np.diag(H.matrix).real, [-1.0, 1.0])


def test_target_matches_chain():
    """A nearest-neighbour coupling graph reproduces the instantaneous chain Hamiltonian."""
    G = np.array([0.3, -0.2, 0.5])
    for sector, U in [(Sector(3, 2, "bosonic"), 4.0), (Sector(3, 2, "hardcore"), np.inf)]:
        graph = chain_graph(3, K=0.7, G=G)
        H_target = build_target_boson(sector, graph, U=0.0 if sector.hardcore else U)
        H_chain = build_chain(sector, ChainDriveFrame(G, [0.7, 0.7], U=U))
        assert np.abs(H_target.matrix - H_chain.matrix).max() <= 1e-14


def test_spin_target_single_excitation():
    for graph in RandomGraph(5, density=0.6, rng=0)(10):
        H = build_target_spin_jw(5, graph, 1)
        assert np.abs(H.matrix - graph.single_particle()).max() <= 1e-14


def test_jordan_wigner_sign():
    """Hopping over an occupied site picks up a minus sign in the spin picture."""
    K = np.zeros((3, 3))
    K[0, 2] = K[2, 0] = 1.0
    graph = CouplingGraph(np.zeros(3), K)
    sector = Sector(3, 2, "hardcore")

    H_spin = build_target_spin_jw(3, graph, 2).matrix
    H_boson = build_target_boson(sector, graph).matrix
    # (0, 1, 1) -> (1, 1, 0) passes the occupied middle site
    assert H_spin[0, 2] == -1 and H_spin[2, 0] == -1
    assert H_boson[0, 2] == 1
    assert np.all(H_spin[1] == 0)


def test_jordan_wigner_bosonic_error():
    with pytest.raises(ValueError):
        hopping_operator(Sector(3, 1, "bosonic"), 0, 2, jw=True)


def test_hermiticity_check():
    with pytest.raises(ValueError):
        HermitianOperator(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        HermitianOperator(np.eye(3), Sector(3, 2, "bosonic"))

    # the tolerance is relative to the largest entry, also for small operators
    small = 1e-3 * np.array([[0.0, 1.0], [1.0, 0.0]])
    with pytest.raises(ValueError):
        HermitianOperator(small + np.array([[0.0, 1e-14], [0.0, 0.0]]))
    HermitianOperator(small + np.array([[0.0, 1e-17], [0.0, 0.0]]))
    HermitianOperator(np.zeros((2, 2)))


def _fock_target(graph, M, U, n_max=2):
    """Target in the full truncated Fock space, projected to `M` bosons in descending order."""
    L = len(graph.G)
    a = np.diag(np.sqrt(np.arange(1.0, n_max + 1)), 1)
    eye = np.eye(n_max + 1)

    def site(op, l):
        out = np.ones((1, 1))
        for m in range(L):
            out = np.kron(out, op if m == l else eye)
        return out

    n = a.T @ a
    H = sum(graph.G[l] * site(n, l) + U / 2 * site(n @ (n - eye), l) for l in range(L))
    for l in range(L):
        for m in range(L):
            if l != m:
                H = H + graph.K[l, m] * site(a.T, l) @ site(a, m)

    states = sorted(
        (occ for occ in product(range(n_max + 1), repeat=L) if sum(occ) == M), reverse=True
    )
    idx = [int(np.ravel_multi_index(occ, (n_max + 1,) * L)) for occ in states]
    return H[np.ix_(idx, idx)]


def test_long_range_bosonic_target():
    graph = all_to_all(3, K=0.3, G=[0.1, -0.4, 0.25])
    H = build_target_boson(Sector(3, 2, "bosonic"), graph, U=4.0)
    assert np.abs(H.matrix - _fock_target(graph, M=2, U=4.0)).max() <= 1e-12



def test_invalid_inputs():
    with pytest.raises(ValueError):
        ChainDriveFrame([0.0, 1.0, 2.0], [1.0])
    with pytest.raises(ValueError):
        CouplingGraph(np.zeros(2), np.array([[0.0, 1.0], [0.5, 0.0]]))
    with pytest.raises(ValueError):
        PauliTermList([(1.0, "XA")])


def test_pauli_to_matrix():
    assert np.all(pauli_to_matrix([], 2).matrix == 0)

    ZI = pauli_to_matrix([(1.0, "ZI")], 2).matrix
    assert np.allclose(np.diag(ZI), [1, 1, -1, -1])

    terms_a, terms_b = [(0.5, "XZ")], [(-1.5, "YY"), (2.0, "IX")]
    H_sum = pauli_to_matrix(terms_a + terms_b, 2).matrix
    H_a, H_b = pauli_to_matrix(terms_a, 2).matrix, pauli_to_matrix(terms_b, 2).matrix
    assert np.allclose(H_sum, H_a + H_b)
    assert np.allclose(H_a, 0.5 * np.kron(PAULI["X"], PAULI["Z"]))

    with pytest.raises(ValueError):
        pauli_to_matrix([(1.0, "XXX")], 2)
