"""Fixed-excitation-number occupation bases for bosons and hardcore bosons."""

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np

from floquet_engineering.base import SectorError

MAX_DIM = 2**16


class Statistics(str, Enum):
    BOSONIC = "bosonic"
    HARDCORE = "hardcore"


@dataclass(frozen=True)
class Sector:
    """
    Excitation-number-conserving subspace of an `L`-site chain.

    Parameters
    ----------
    L : int
        Number of sites.
    M : int
        Number of excitations.
    statistics : Statistics or str
        Bosonic (any occupation) or hardcore (occupations 0 and 1).

    """

    L: int
    M: int
    statistics: Statistics = Statistics.BOSONIC

    def __post_init__(self):
        object.__setattr__(self, "statistics", Statistics(self.statistics))
        if int(self.L) != self.L or self.L < 1:
            raise SectorError(f"Site count must be a positive integer, got {self.L}.")
        if int(self.M) != self.M or self.M < 0:
            raise SectorError(f"Excitation count must be a non-negative integer, got {self.M}.")
        if self.statistics is Statistics.HARDCORE and self.M > self.L:
            raise SectorError(f"Hardcore sector is empty: M={self.M} exceeds L={self.L}.")

    def __str__(self):
        return f"Sector(L={self.L}, M={self.M}, {self.statistics.value})"

    @property
    def hardcore(self):
        return self.statistics is Statistics.HARDCORE

    @property
    def dim(self):
        return dim(self)

    @property
    def states(self):
        """Occupation array of shape (dim, L), rows in basis order."""
        return _basis_array(self)

    def to_dict(self):
        return {"L": self.L, "M": self.M, "statistics": self.statistics.value}


def dim(sector):
    """
    Basis cardinality of a sector.

    Parameters
    ----------
    sector : Sector

    Returns
    -------
    int

    """
    if sector.hardcore:
        if sector.M > sector.L:
            raise SectorError(f"Hardcore sector is empty: M={sector.M} exceeds L={sector.L}.")
        return comb(sector.L, sector.M)
    return comb(sector.M + sector.L - 1, sector.M)


def _bosonic_states(L, M):
    """Yield occupation tuples in descending lexicographic order."""
    if L == 1:
        yield (M,)
        return
    for n in range(M, -1, -1):
        for rest in _bosonic_states(L - 1, M - n):
            yield (n,) + rest


def _hardcore_states(L, M):
    # `combinations` emits occupied-site sets in lexicographic order, which is descending
    # lexicographic order of the occupation tuples.
    for sites in combinations(range(L), M):
        occ = [0] * L
        for site in sites:
            occ[site] = 1
        yield tuple(occ)


@lru_cache(maxsize=None)
def _basis_array(sector):
    n_states = dim(sector)
    if n_states > MAX_DIM:
        raise SectorError(f"{sector} has dimension {n_states}, above the limit {MAX_DIM}.")

    gen = _hardcore_states if sector.hardcore else _bosonic_states
    states = np.array(list(gen(sector.L, sector.M)), dtype=int).reshape(n_states, sector.L)
    states.setflags(write=False)
    return states


@lru_cache(maxsize=None)
def _index_map(sector):
    return {tuple(state): i for i, state in enumerate(_basis_array(sector).tolist())}


def enumerate_basis(sector):
    """
    Ordered occupation basis of a sector.

    States are sorted in descending lexicographic order, so that ``(M, 0, ..., 0)`` comes
    first.

    Parameters
    ----------
    sector : Sector

    Returns
    -------
    list of tuple of int

    """
    return [tuple(state) for state in _basis_array(sector).tolist()]


def index_of(sector, state):
    """
    Position of an occupation state in the sector basis.

    Parameters
    ----------
    sector : Sector
    state : Sequence of int
        Per-site occupations.

    Returns
    -------
    int

    Raises
    ------
    SectorError
        If the state does not belong to the sector.

    """
    try:
        return _index_map(sector)[tuple(int(n) for n in state)]
    except KeyError:
        raise SectorError(f"State {tuple(state)} is not in {sector}.") from None
