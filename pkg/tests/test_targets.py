from itertools import product

import numpy as np
import pytest
import sympy

from floquet_engineering.base import AmbiguousReadoutError, ConfigError
from floquet_engineering.basis import Sector
from floquet_engineering.numerics import eigh
from floquet_engineering.targets import graphs, molecules, sat
from floquet_engineering.targets.sat import (
    EXAMPLE_SYSTEM,
    Clause,
    ClauseSystem,
    ClauseSyntaxError,
    boolean_symbols,
    clause_objective,
    cost_operator,
    evaluate_system,
    load_clauses,
    multilinear,
    objective_coefficients,
    objective_to_pauli,
    parse_clauses,
    readout_assignment,
    system_objective,
    truth_table,
)

TABLE = [2, 0, 2, 1, 2, 3, 1, 1]


# Graphs
def test_star():
    graph = graphs.star_graph(5, hub=3, K=0.5)
    assert len(graph.edges) == 4
    assert np.all(graph.K[2, [0, 1, 3, 4]] == 0.5)
    assert graph.K[0, 1] == 0

    assert np.array_equal(graphs.make_graph("star", 5, K=0.5).K, graph.K)
    with pytest.raises(ValueError):
        graphs.star_graph(5, hub=6)


def test_families():
    assert len(graphs.all_to_all(6).edges) == 15
    ring = graphs.ring(6, K=0.2)
    assert len(ring.edges) == 6 and ring.K[0, 5] == 0.2
    assert len(graphs.chain_graph(6).edges) == 5
    with pytest.raises(ValueError):
        graphs.ring(1)
    with pytest.raises(ValueError):
        graphs.make_graph("hexagon", 6)


def test_random_graphs():
    graphs_a = list(graphs.RandomGraph(4, rng=3)(5))
    graphs_b = list(graphs.RandomGraph(4, rng=3)(5))
    for a, b in zip(graphs_a, graphs_b):
        assert np.array_equal(a.K, b.K) and np.array_equal(a.G, b.G)
        assert np.all(np.abs(a.K) <= 1)


# Satisfiability
def test_objective():
    poly = system_objective(EXAMPLE_SYSTEM)
    a1, a2, a3 = boolean_symbols(3)
    expected = 2 - 2 * a3 + 3 * a1 * a3 + a2 * a3 - a1 * a2 - 2 * a1 * a2 * a3
    assert sympy.expand(poly - expected) == 0
    assert objective_coefficients(poly) == {
        (): 2,
        (3,): -2,
        (1, 3): 3,
        (2, 3): 1,
        (1, 2): -1,
        (1, 2, 3): -2,
    }
    assert sympy.Poly(poly).total_degree() == 3
    assert truth_table(poly, 3).tolist() == TABLE


def test_multilinear_reduction():
    a1, a2 = boolean_symbols(2)
    assert multilinear(a1**2 * a2**3 + 2 * a1**3) == a1 * a2 + 2 * a1
    assert multilinear(sympy.Integer(4)) == 4
    assert objective_coefficients(sympy.Integer(0)) == {}

    # a clause and its negation add up to one
    clause = Clause(0, ((1,), (1, 2), ()))
    total = clause_objective(clause) + clause_objective(Clause(1, clause.monomials))
    assert multilinear(total) == 1


def test_objective_counts_violations():
    """Polynomial values agree with direct Z2 evaluation on random systems."""
    rng = np.random.default_rng(0)
    for __ in range(20):
        clauses = []
        for __ in range(4):
            monomials = [
                tuple(rng.choice(4, size=rng.integers(1, 3), replace=False) + 1)
                for __ in range(rng.integers(1, 4))
            ]
            clauses.append(Clause(int(rng.integers(2)), tuple(monomials)))
        system = ClauseSystem(tuple(clauses), n_vars=4)

        values = truth_table(system_objective(system), 4)
        for bits, value in zip(product((0, 1), repeat=4), values):
            assert value == evaluate_system(system, bits)


def test_pauli_terms():
    terms = objective_to_pauli(system_objective(EXAMPLE_SYSTEM))
    assert dict((label, c) for c, label in terms) == {
        "IIX": 0.25,
        "IXI": -0.25,
        "XII": 0.25,
        "IXX": -0.5,
        "XIX": -0.5,
        "XXX": 0.25,
    }


def test_cost_spectrum():
    """Cost eigenvalues are the truth-table values less the dropped constant."""
    w = eigh(cost_operator()).eigenvalues
    assert np.allclose(w, np.sort(np.array(TABLE) - 1.5), atol=1e-12)


def test_ground_state_readout():
    H = sat.sat_hamiltonian(omega=0.25)
    ground = eigh(H).ground_state
    assert readout_assignment(ground) == (0, 0, 1)
    assert evaluate_system(EXAMPLE_SYSTEM, (0, 0, 1)) == 0


def test_readout_examples():
    uniform = np.full(8, 1 / np.sqrt(8))
    assert np.allclose(sat.correlators(uniform), [1, 1, 0])
    assert readout_assignment(uniform) == (1, 1, 0)

    localized = np.zeros(8)
    localized[0] = 1.0
    with pytest.raises(AmbiguousReadoutError) as exc_info:
        readout_assignment(localized)
    assert np.allclose(exc_info.value.correlators, 0.5)

    with pytest.raises(ValueError):
        sat.correlators(np.ones(4) / 2)


def test_clause_file():
    system = load_clauses("example3sat.txt")
    assert system == EXAMPLE_SYSTEM
    assert len(system) == 3
    assert str(system).splitlines()[0] == "1 = a2 + a3 + a1*a3"


def test_clause_syntax_errors():
    with pytest.raises(ClauseSyntaxError) as exc_info:
        parse_clauses("1 = a1 +\n")
    assert (exc_info.value.line, exc_info.value.column) == (1, 9)

    with pytest.raises(ClauseSyntaxError) as exc_info:
        parse_clauses("1 = a1\n1 = a1 $ a2")
    assert (exc_info.value.line, exc_info.value.column) == (2, 8)

    for text in ["2 = a1", "1 a1", "1 = a0", "= a1"]:
        with pytest.raises(ClauseSyntaxError):
            parse_clauses(text)
    with pytest.raises(ConfigError):
        parse_clauses("# nothing here\n")
    with pytest.raises(ConfigError):
        parse_clauses("1 = a4", n_vars=3)
    with pytest.raises(ConfigError):
        load_clauses("missing_clauses.txt")


# Molecules
def test_lih_matrix():
    H = molecules.lih_hamiltonian()
    matrix = H.matrix.real
    assert H.sector == Sector(16, 1, "hardcore")
    assert matrix[0, 0] == pytest.approx(0.00846)
    assert matrix[0, 1] == pytest.approx(-0.33392)
    assert np.array_equal(matrix, matrix.T)
    assert np.trace(matrix) == pytest.approx(1e-5, abs=1e-9)
    assert matrix.sum() == pytest.approx(-5.61527, abs=1e-6)
    assert np.sum(matrix**2) == pytest.approx(7.4414248117, abs=1e-9)

    assert np.allclose(molecules.lih_hamiltonian(scale=0.5).matrix, 0.5 * H.matrix)
