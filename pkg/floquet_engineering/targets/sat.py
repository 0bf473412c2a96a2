"""
Boolean satisfiability targets.

Clauses are equations over Z2 in algebraic normal form, e.g. ``1 = a2 + a3 + a1*a3``. Each
clause becomes an integer multilinear sympy polynomial counting whether it is violated; the sum
over clauses is mapped onto spin operators through ``a_i -> (1 + s_i mu^x_i) / 2``.
"""

import re
from dataclasses import dataclass
from itertools import product
from pathlib import Path

import numpy as np
import pandas as pd
import sympy
from scipy.linalg import hadamard

from floquet_engineering.base import AmbiguousReadoutError, ConfigError
from floquet_engineering.operators import HermitianOperator, PauliTermList, pauli_to_matrix

DATA_DIR = Path(__file__).parent / "data"


def _monomial(variables):
    vars_ = tuple(sorted(set(int(i) for i in variables)))
    if any(i < 1 for i in vars_):
        raise ValueError(f"Variable indices start at 1, got {vars_}.")
    return vars_


@dataclass(frozen=True)
class Clause:
    """Equation ``rhs = m_1 + m_2 + ...`` over Z2, monomials given as variable-index tuples."""

    rhs: int
    monomials: tuple

    def __post_init__(self):
        if self.rhs not in (0, 1):
            raise ValueError(f"Clause right-hand side must be 0 or 1, got {self.rhs}.")
        object.__setattr__(self, "monomials", tuple(_monomial(m) for m in self.monomials))

    def __str__(self):
        terms = ["*".join(f"a{i}" for i in m) or "1" for m in self.monomials]
        return f"{self.rhs} = {' + '.join(terms) or '0'}"

    def satisfied(self, assignment):
        parity = sum(all(assignment[i - 1] for i in m) for m in self.monomials) % 2
        return parity == self.rhs


@dataclass(frozen=True)
class ClauseSystem:
    """
    Collection of Z2 clauses over variables ``a_1 .. a_n``.

    Parameters
    ----------
    clauses : Sequence of Clause
    n_vars : int, optional
        Number of variables; defaults to the largest index used.

    """

    clauses: tuple
    n_vars: int = None

    def __post_init__(self):
        clauses = tuple(self.clauses)
        used = max((i for c in clauses for m in c.monomials for i in m), default=0)
        n_vars = used if self.n_vars is None else self.n_vars
        if used > n_vars:
            raise ValueError(f"Clauses use variable a{used} but only {n_vars} are declared.")
        object.__setattr__(self, "clauses", clauses)
        object.__setattr__(self, "n_vars", n_vars)

    def __len__(self):
        return len(self.clauses)

    def __str__(self):
        return "\n".join(str(c) for c in self.clauses)


@dataclass(frozen=True)
class VariableEncoding:
    """
    Map of boolean variables onto qubits, ``a_i -> (1 + signs[i-1] mu^x_{qubits[i-1]}) / 2``.

    Qubit ``q`` is label position ``q`` of a Pauli string, position 0 being the most
    significant bit of the basis index.
    """

    signs: tuple
    qubits: tuple

    def __post_init__(self):
        signs, qubits = tuple(int(s) for s in self.signs), tuple(int(q) for q in self.qubits)
        if len(signs) != len(qubits):
            raise ValueError("One sign and one qubit per variable are required.")
        if any(s not in (1, -1) for s in signs):
            raise ValueError(f"Signs must be +1 or -1, got {signs}.")
        if sorted(qubits) != list(range(len(qubits))):
            raise ValueError(f"Qubit assignment must be a permutation, got {qubits}.")
        object.__setattr__(self, "signs", signs)
        object.__setattr__(self, "qubits", qubits)

    @classmethod
    def from_ordering(cls, ordering, signs):
        """
        Encoding from the variable order of the qubit register.

        Parameters
        ----------
        ordering : Sequence of int
            ``ordering[p]`` is the (1-based) variable held by label position `p`; e.g.
            ``(3, 2, 1)`` places ``a_3`` on the most significant qubit.
        signs : Sequence of int
            Sign of each variable, in variable order.

        """
        ordering = [int(i) for i in ordering]
        if sorted(ordering) != list(range(1, len(ordering) + 1)):
            raise ValueError(f"Ordering must be a permutation of 1..{len(ordering)}.")
        qubits = [ordering.index(i) for i in range(1, len(ordering) + 1)]
        return cls(tuple(signs), tuple(qubits))

    @property
    def n_qubits(self):
        return len(self.qubits)

    def decode(self, mu):
        """Assignment from the ``mu^x`` eigenvalues (+1/-1) of each label position."""
        return tuple(int((1 + s * mu[q]) // 2) for s, q in zip(self.signs, self.qubits))


DEFAULT_ENCODING = VariableEncoding.from_ordering((3, 2, 1), (1, 1, -1))

EXAMPLE_SYSTEM = ClauseSystem(
    (
        Clause(1, ((2,), (3,), (1, 3))),
        Clause(1, ((1,), (3,), (1, 2))),
        Clause(0, ((1,), (2,), (2, 3))),
    ),
    n_vars=3,
)


# Parsing
class ClauseSyntaxError(ConfigError):
    """Malformed clause text, with the 1-based line and column of the offending character."""

    def __init__(self, message, line, column):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


_TOKEN = re.compile(r"\s*(?:(?P<var>a(?P<idx>[0-9]+))|(?P<const>[01])(?![0-9])|(?P<op>[=+*]))")


def _tokens(text, line_no):
    pos = 0
    while text[pos:].strip():
        match = _TOKEN.match(text, pos)
        if match is None:
            col = len(text) - len(text[pos:].lstrip()) + 1
            raise ClauseSyntaxError(f"unexpected character {text[col - 1]!r}", line_no, col)
        if match["var"]:
            kind, value = "var", int(match["idx"])
        elif match["const"]:
            kind, value = "const", int(match["const"])
        else:
            kind, value = match["op"], None
        yield kind, value, match.start(match.lastgroup) + 1
        pos = match.end()


def _describe(kind, value):
    if kind == "end":
        return "end of line"
    if kind == "var":
        return f"'a{value}'"
    return repr(kind if value is None else str(value))


def _parse_line(text, line_no):
    tokens = list(_tokens(text, line_no)) + [("end", None, len(text) + 1)]

    def expect(i, kinds, what):
        kind, value, col = tokens[i]
        if kind not in kinds:
            found = _describe(kind, value)
            raise ClauseSyntaxError(f"expected {what}, found {found}", line_no, col)
        if kind == "var" and value < 1:
            raise ClauseSyntaxError("variable indices start at 1", line_no, col)
        return value

    rhs = expect(0, ("const",), "0 or 1")
    expect(1, ("=",), "'='")
    i, monomials = 2, []
    while True:
        if tokens[i][0] == "const":
            if tokens[i][1] == 1:
                monomials.append(())
            i += 1
        else:
            variables = [expect(i, ("var",), "term")]
            i += 1
            while tokens[i][0] == "*":
                variables.append(expect(i + 1, ("var",), "variable"))
                i += 2
            monomials.append(tuple(variables))
        if tokens[i][0] == "end":
            return Clause(rhs, tuple(monomials))
        expect(i, ("+",), "'+' or end of line")
        i += 1


def parse_clauses(text, n_vars=None):
    """
    Parse a clause system, one clause per line.

    Lines read ``rhs = term + term + ...`` with ``rhs`` 0 or 1 and terms ``1``, ``a1`` or
    products such as ``a1*a3``. Blank lines and ``#`` comments are skipped.

    Parameters
    ----------
    text : str
    n_vars : int, optional
        Number of variables; defaults to the largest index used.

    Returns
    -------
    ClauseSystem

    Raises
    ------
    ClauseSyntaxError
        With the line and column of the first malformed token.

    """
    clauses = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        content = line.split("#", 1)[0]
        if content.strip():
            clauses.append(_parse_line(content, line_no))
    if not clauses:
        raise ConfigError("Clause text contains no clauses.")
    try:
        return ClauseSystem(tuple(clauses), n_vars)
    except ValueError as err:
        raise ConfigError(str(err)) from None


def load_clauses(path, n_vars=None):
    """Read a clause file; bare names also resolve against the bundled data directory."""
    path = Path(path)
    if not path.exists() and (DATA_DIR / path.name).exists():
        path = DATA_DIR / path.name
    try:
        text = path.read_text()
    except OSError as err:
        raise ConfigError(f"Cannot read clause file {path}: {err}") from None
    return parse_clauses(text, n_vars)


# Objectives
def boolean_symbols(n):
    """Symbols ``a1 .. an`` of the boolean variables."""
    return sympy.symbols(f"a1:{n + 1}")


def _variable_index(symbol):
    name = str(symbol)
    if not re.fullmatch(r"a[1-9][0-9]*", name):
        raise ValueError(f"Objective symbols must be boolean variables a1, a2, ..., got {name}.")
    return int(name[1:])


def _reduce_powers(expr, symbols, reduce):
    """Rebuild a polynomial with each exponent mapped through `reduce`."""
    poly = sympy.Poly(sympy.expand(expr), *symbols)
    return sympy.Add(
        *(
            coef * sympy.Mul(*(s ** reduce(e) for s, e in zip(symbols, exps)))
            for exps, coef in poly.terms()
        )
    )


def multilinear(expr):
    """Reduce a polynomial in boolean variables with ``a_i**2 = a_i``."""
    symbols = sorted(sympy.sympify(expr).free_symbols, key=_variable_index)
    if not symbols:
        return sympy.sympify(expr)
    return _reduce_powers(expr, symbols, lambda e: min(e, 1))


def clause_objective(clause):
    """
    Polynomial equal to 0 when the clause holds and 1 otherwise.

    The parity of the monomials is expanded with ``x XOR m = x + m - 2 x m``.
    """
    parity = sympy.Integer(0)
    for m in clause.monomials:
        term = sympy.Mul(*(sympy.Symbol(f"a{i}") for i in m))
        parity = multilinear(parity + term - 2 * parity * term)
    return parity if clause.rhs == 0 else 1 - parity


def system_objective(system):
    """Number of violated clauses as a single multilinear sympy polynomial."""
    return multilinear(sympy.Add(*(clause_objective(c) for c in system.clauses)))


def objective_coefficients(expr):
    """Map from sorted variable-index tuples (empty for the constant) to coefficients."""
    expr = sympy.sympify(expr)
    symbols = sorted(expr.free_symbols, key=_variable_index)
    if not symbols:
        return {(): expr} if expr != 0 else {}
    poly = sympy.Poly(expr, *symbols)
    return {
        tuple(_variable_index(s) for s, e in zip(symbols, exps) if e): coef
        for exps, coef in sorted(poly.terms(), key=lambda term: sum(term[0]))
        if coef != 0
    }


def evaluate_system(system, assignment):
    """Count of violated clauses by direct Z2 arithmetic."""
    return sum(not c.satisfied(assignment) for c in system.clauses)


def truth_table(expr, n):
    """Values over all assignments of ``a_1 .. a_n`` in lexicographic order (``a_1`` slowest)."""
    symbols = boolean_symbols(n)
    return np.array(
        [float(expr.subs(dict(zip(symbols, bits)))) for bits in product((0, 1), repeat=n)]
    )


def objective_to_pauli(expr, encoding=DEFAULT_ENCODING, drop_identity=True):
    """
    Spin-operator image of a polynomial under ``a_i -> (1 + s_i mu^x_i) / 2``.

    Parameters
    ----------
    expr : sympy.Expr
        Polynomial in ``a1 .. an``.
    encoding : VariableEncoding, optional
    drop_identity : bool, optional
        Omit the identity term, which only shifts the spectrum.

    Returns
    -------
    PauliTermList

    """
    expr = sympy.sympify(expr)
    n = encoding.n_qubits
    if any(_variable_index(s) > n for s in expr.free_symbols):
        raise ValueError(f"Encoding covers {n} variables, polynomial uses more.")

    z = sympy.symbols(f"z1:{n + 1}")
    spins = {a: (1 + s * zi) / 2 for a, s, zi in zip(boolean_symbols(n), encoding.signs, z)}
    spin_poly = _reduce_powers(expr.subs(spins, simultaneous=True), z, lambda e: e % 2)

    out = []
    for exps, coef in sympy.Poly(spin_poly, *z).terms():
        chosen = [i for i, e in enumerate(exps) if e]
        if coef == 0 or (drop_identity and not chosen):
            continue
        label = ["I"] * n
        for i in chosen:
            label[encoding.qubits[i]] = "X"
        out.append((float(coef), "".join(label)))
    return PauliTermList(tuple(sorted(out, key=lambda term: term[1])))


def cost_operator(system=EXAMPLE_SYSTEM, encoding=DEFAULT_ENCODING):
    """Traceless cost operator of a clause system."""
    terms = objective_to_pauli(system_objective(system), encoding)
    return pauli_to_matrix(terms, encoding.n_qubits)


def sat_hamiltonian(omega=1.0, system=EXAMPLE_SYSTEM, encoding=DEFAULT_ENCODING):
    """
    Three-body problem Hamiltonian ``omega * C`` of a clause system.

    Parameters
    ----------
    omega : float, optional
        Energy scale, units of J.
    system : ClauseSystem, optional
    encoding : VariableEncoding, optional

    Returns
    -------
    HermitianOperator
        Operator on the qubit register; its ground state encodes the assignment that
        violates the fewest clauses.

    """
    return omega * cost_operator(system, encoding)


def diag_initial_hamiltonian(n_qubits, omega=1.0):
    """Diagonal ``omega * popcount(k)``; eigenvalue ``k`` has multiplicity ``binomial(n, k)``."""
    weights = [bin(k).count("1") for k in range(2**n_qubits)]
    return HermitianOperator(omega * np.diag(np.array(weights, dtype=complex)))


# Readout
READOUT_PAIRS = {
    1: (1, ((1, 5), (2, 6), (3, 7), (4, 8))),
    2: (1, ((1, 3), (2, 4), (5, 7), (6, 8))),
    3: (-1, ((1, 2), (3, 4), (5, 6), (7, 8))),
}
DEFINITE_TOL = 0.25


def correlators(state):
    """
    Two-point estimates of ``a_1, a_2, a_3`` from an 8-site single-excitation state.

    Each value is ``(1 + sign * sum <sigma^x_l sigma^x_m + sigma^y_l sigma^y_m> / 2) / 2`` over
    the listed (1-based) site pairs.
    """
    psi = np.asarray(state, dtype=complex)
    if psi.shape != (8,):
        raise ValueError(f"Readout expects an 8-site single-excitation state, got {psi.shape}.")
    values = []
    for sign, pairs in READOUT_PAIRS.values():
        hop = sum(2 * (psi[l - 1].conj() * psi[m - 1]).real for l, m in pairs)
        values.append((1 + sign * hop) / 2)
    return np.array(values)


def amplitude_bits(state, encoding=DEFAULT_ENCODING):
    """Decode the dominant amplitude of a state after a Hadamard transform to the x basis."""
    psi = np.asarray(state, dtype=complex)
    n = encoding.n_qubits
    index = int(np.argmax(np.abs(hadamard(2**n) @ psi)))
    bits = [(index >> (n - 1 - p)) & 1 for p in range(n)]
    return encoding.decode([1 - 2 * b for b in bits])


def readout_assignment(state, encoding=DEFAULT_ENCODING):
    """
    Assignment encoded in a normalized 8-site single-excitation state.

    Parameters
    ----------
    state : array_like
        Amplitudes on sites 1..8.
    encoding : VariableEncoding, optional

    Returns
    -------
    tuple of int
        ``(a_1, a_2, a_3)``.

    Raises
    ------
    AmbiguousReadoutError
        If a correlator is not within `DEFINITE_TOL` of 0 or 1, or the correlator bits
        disagree with the amplitude decoding.

    """
    values = correlators(state)
    bits = amplitude_bits(state, encoding)
    rounded = tuple(int(round(v)) for v in values)
    if np.any(np.abs(values - np.round(values)) > DEFINITE_TOL) or rounded != bits:
        raise AmbiguousReadoutError(
            f"Correlators {np.round(values, 3).tolist()} disagree with amplitude bits {bits}.",
            values,
            bits,
        )
    return rounded


def objective_frame(system=EXAMPLE_SYSTEM):
    """Truth table of a clause system with per-assignment objective and violated-clause count."""
    values = truth_table(system_objective(system), system.n_vars)
    rows = []
    for bits, value in zip(product((0, 1), repeat=system.n_vars), values):
        row = {f"a{i + 1}": b for i, b in enumerate(bits)}
        rows.append(row | {"C": int(value), "violated": evaluate_system(system, bits)})
    return pd.DataFrame(rows)
