"""Dense Hermitian operators on excitation sectors and qubit registers."""

from dataclasses import dataclass, field
from functools import reduce
from typing import Optional

import numpy as np
import pandas as pd

from floquet_engineering.basis import MAX_DIM, Sector, index_of

HERMITIAN_RTOL = 1e-12

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _frozen(arr, dtype=complex):
    arr = np.array(arr, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class HermitianOperator:
    """
    Dense Hermitian matrix in a sector basis (or on a qubit register if `sector` is None).

    Parameters
    ----------
    matrix : array_like
        Square complex matrix, energies in units of J.
    sector : Sector, optional
        Basis the matrix is written in.
    meta : dict, optional
        Diagnostics attached by numerical routines (e.g. branch-cut flags).

    """

    matrix: np.ndarray
    sector: Optional[Sector] = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        matrix = _frozen(self.matrix)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"Operator matrix must be square, got shape {matrix.shape}.")
        if self.sector is not None and self.sector.dim != matrix.shape[0]:
            raise ValueError(f"Matrix of size {matrix.shape[0]} does not match {self.sector}.")

        scale = np.abs(matrix).max(initial=0.0)
        deviation = np.abs(matrix - matrix.conj().T).max(initial=0.0)
        if deviation > HERMITIAN_RTOL * scale:
            raise ValueError(f"Matrix is not Hermitian (max deviation {deviation:.3e}).")
        object.__setattr__(self, "matrix", matrix)

    @property
    def dim(self):
        return self.matrix.shape[0]

    def __add__(self, other):
        if isinstance(other, HermitianOperator):
            return HermitianOperator(self.matrix + other.matrix, self.sector)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, HermitianOperator):
            return HermitianOperator(self.matrix - other.matrix, self.sector)
        return NotImplemented

    def __mul__(self, scalar):
        return HermitianOperator(float(scalar) * self.matrix, self.sector)

    __rmul__ = __mul__

    def in_sector(self, sector):
        """Same matrix read in another basis of equal dimension (e.g. qubit register to sites)."""
        return HermitianOperator(self.matrix, sector, dict(self.meta))

    def centered(self):
        """Traceless part, ``H - tr(H)/D``."""
        shift = np.trace(self.matrix).real / self.dim
        matrix = self.matrix - shift * np.eye(self.dim)
        return HermitianOperator(matrix, self.sector, dict(self.meta))

    def summary(self):
        from floquet_engineering.util import summarize_matrix

        name = "HermitianOperator" if self.sector is None else str(self.sector)
        return f"{name}\n{summarize_matrix(self.matrix)}"


@dataclass(frozen=True)
class ChainDriveFrame:
    """
    Instantaneous parameters of the driven chain during one time step.

    Parameters
    ----------
    g : array_like
        Onsite energies, length L.
    J : array_like
        Nearest-neighbour couplings, length L - 1.
    U : float, optional
        Anharmonicity; ``inf`` for hardcore bosons.

    """

    g: np.ndarray
    J: np.ndarray
    U: float = np.inf

    def __post_init__(self):
        object.__setattr__(self, "g", _frozen(self.g, float))
        object.__setattr__(self, "J", _frozen(self.J, float))
        if self.J.shape != (max(len(self.g) - 1, 0),):
            raise ValueError(f"Expected {len(self.g) - 1} couplings for {len(self.g)} sites.")

    @property
    def L(self):
        return len(self.g)


@dataclass(frozen=True)
class CouplingGraph:
    """
    Target connectivity: onsite energies `G` and symmetric couplings `K`.

    Parameters
    ----------
    G : array_like
        Effective onsite energies, length L.
    K : array_like
        Real symmetric L x L coupling matrix with zero diagonal.

    """

    G: np.ndarray
    K: np.ndarray

    def __post_init__(self):
        G, K = _frozen(self.G, float), _frozen(self.K, float)
        L = len(G)
        if K.shape != (L, L):
            raise ValueError(f"Coupling matrix must have shape {(L, L)}, got {K.shape}.")
        if not np.array_equal(K, K.T):
            raise ValueError("Coupling matrix must be symmetric.")
        if np.any(np.diag(K) != 0):
            raise ValueError("Coupling matrix must have a zero diagonal.")
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "K", K)

    @property
    def L(self):
        return len(self.G)

    @property
    def edges(self):
        """Upper-triangle site pairs with non-zero coupling."""
        rows, cols = np.nonzero(np.triu(self.K, k=1))
        return list(zip(rows.tolist(), cols.tolist()))

    def single_particle(self):
        """Single-excitation matrix ``diag(G) + K``."""
        return np.diag(self.G) + self.K


@dataclass(frozen=True)
class PauliTermList:
    """
    Real linear combination of Pauli strings.

    Parameters
    ----------
    terms : Sequence of (float, str)
        Coefficients and labels over ``{I, X, Y, Z}``; label position 0 is the most
        significant qubit of the basis index.

    """

    terms: tuple = ()

    def __post_init__(self):
        terms = tuple((float(c), str(label)) for c, label in self.terms)
        for _, label in terms:
            bad = set(label) - set(PAULI)
            if bad:
                raise ValueError(f"Invalid Pauli label characters {sorted(bad)} in {label!r}.")
        object.__setattr__(self, "terms", terms)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def to_frame(self):
        return pd.DataFrame(self.terms, columns=["coefficient", "label"])


# Primitive operators
def number_operator(sector, site):
    """Occupation operator of a (0-based) site, as a diagonal matrix."""
    return np.diag(sector.states[:, site].astype(complex))


def _hop(sector, l, m, jw=False):
    """Matrix of ``a_l^dag a_m + h.c.`` with bosonic factors or fermionic string signs."""
    if l == m:
        raise ValueError("Hopping requires two distinct sites.")
    states = sector.states
    out = np.zeros((sector.dim, sector.dim), dtype=complex)
    lo, hi = min(l, m), max(l, m)
    for col, state in enumerate(states):
        for src, dst in ((m, l), (l, m)):
            if state[src] == 0 or (sector.hardcore and state[dst] == 1):
                continue
            new = state.copy()
            new[src] -= 1
            new[dst] += 1
            if sector.hardcore:
                amp = 1.0
                if jw:
                    amp = (-1.0) ** int(state[lo + 1 : hi].sum())
            else:
                amp = np.sqrt(state[src] * (state[dst] + 1))
            out[index_of(sector, new), col] += amp
    return out


def hopping_operator(sector, l, m, jw=False):
    """
    Hopping operator between two (0-based) sites.

    Parameters
    ----------
    sector : Sector
    l, m : int
        Distinct sites.
    jw : bool, optional
        Attach the Jordan-Wigner sign ``(-1)**(occupied sites strictly between l and m)``;
        hardcore sectors only.

    Returns
    -------
    numpy.ndarray

    """
    if jw and not sector.hardcore:
        raise ValueError("Jordan-Wigner strings are only defined for hardcore sectors.")
    return _hop(sector, l, m, jw)


def interaction_operator(sector):
    """Diagonal of ``sum_l n_l (n_l - 1) / 2``; zero for hardcore sectors."""
    n = sector.states
    return np.diag((n * (n - 1) / 2).sum(axis=1).astype(complex))


def _onsite(sector, g, convention):
    if convention not in ("number", "pauli"):
        raise ValueError(f"Unknown onsite convention {convention!r}.")
    diag = sector.states @ np.asarray(g, dtype=float)
    if convention == "pauli":
        if not sector.hardcore:
            raise ValueError("The Pauli onsite convention applies to hardcore sectors only.")
        diag = diag - np.sum(g) / 2  # (g/2) sigma^z = g n - g/2
    return np.diag(diag.astype(complex))


def _check_sites(sector, L):
    if L != sector.L:
        raise ValueError(f"Parameters describe {L} sites but {sector} has {sector.L}.")


# Hamiltonians
def build_chain(sector, frame, convention="number"):
    """
    Instantaneous Hamiltonian of the nearest-neighbour chain.

    Parameters
    ----------
    sector : Sector
    frame : ChainDriveFrame
        Onsite energies, couplings and anharmonicity of the time step.
    convention : {"number", "pauli"}, optional
        Onsite term as ``g n`` or, for hardcore sectors, as ``(g/2) sigma^z``.

    Returns
    -------
    HermitianOperator

    """
    _check_sites(sector, frame.L)
    if not sector.hardcore and not np.isfinite(frame.U):
        raise ValueError("Bosonic sectors require a finite anharmonicity U.")

    H = _onsite(sector, frame.g, convention)
    for l, J in enumerate(frame.J):
        if J != 0:
            H += J * _hop(sector, l, l + 1)
    if not sector.hardcore and frame.U != 0:
        H += frame.U * interaction_operator(sector)
    return HermitianOperator(H, sector)


def build_target_boson(sector, graph, U=0.0):
    """
    Target Hamiltonian with arbitrary connectivity for (hardcore) bosons.

    Parameters
    ----------
    sector : Sector
    graph : CouplingGraph
    U : float, optional
        Anharmonicity, ignored for hardcore sectors.

    Returns
    -------
    HermitianOperator

    """
    _check_sites(sector, graph.L)
    H = _onsite(sector, graph.G, "number")
    for l, m in graph.edges:
        H += graph.K[l, m] * _hop(sector, l, m)
    if not sector.hardcore and U != 0:
        H += U * interaction_operator(sector)
    return HermitianOperator(H, sector)


def build_target_spin_jw(L, graph, M):
    """
    Free-fermion target Hamiltonian in the hardcore occupation basis.

    Long-range hops ``f_l^dag f_m`` carry the sign of the Jordan-Wigner string between
    the two sites.

    Parameters
    ----------
    L : int
        Number of sites.
    graph : CouplingGraph
    M : int
        Number of excitations.

    Returns
    -------
    HermitianOperator

    """
    sector = Sector(L, M, "hardcore")
    _check_sites(sector, graph.L)
    H = _onsite(sector, graph.G, "number")
    for l, m in graph.edges:
        H += graph.K[l, m] * _hop(sector, l, m, jw=True)
    return HermitianOperator(H, sector)


def pauli_to_matrix(terms, n):
    """
    Matrix of a Pauli term list on `n` qubits.

    Parameters
    ----------
    terms : PauliTermList or Sequence of (float, str)
    n : int
        Number of qubits; every label must have length `n`.

    Returns
    -------
    HermitianOperator

    """
    if not isinstance(terms, PauliTermList):
        terms = PauliTermList(terms)
    if 2**n > MAX_DIM:
        raise ValueError(f"{n} qubits exceed the dimension limit {MAX_DIM}.")

    H = np.zeros((2**n, 2**n), dtype=complex)
    for coef, label in terms:
        if len(label) != n:
            raise ValueError(f"Label {label!r} does not have length {n}.")
        H += coef * reduce(np.kron, (PAULI[c] for c in label), np.ones((1, 1), dtype=complex))
    return HermitianOperator(H)
