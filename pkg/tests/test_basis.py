from math import comb

import pytest

from floquet_engineering.base import SectorError
from floquet_engineering.basis import Sector, dim, enumerate_basis, index_of


def test_dims():
    assert dim(Sector(3, 2, "bosonic")) == 6
    assert dim(Sector(9, 1, "hardcore")) == 9
    assert dim(Sector(8, 3, "hardcore")) == 56
    assert dim(Sector(8, 2, "bosonic")) == 36
    assert Sector(4, 0).dim == 1


def test_order():
    """States come in descending lexicographic order."""
    assert enumerate_basis(Sector(2, 2, "bosonic")) == [(2, 0), (1, 1), (0, 2)]
    assert enumerate_basis(Sector(3, 2, "hardcore")) == [(1, 1, 0), (1, 0, 1), (0, 1, 1)]
    assert enumerate_basis(Sector(3, 1, "hardcore"))[0] == (1, 0, 0)


def test_round_trip():
    """Every basis state maps back to its own index."""
    for L in range(1, 11):
        for M in range(5):
            for statistics in ("bosonic", "hardcore"):
                if statistics == "hardcore" and M > L:
                    continue
                sector = Sector(L, M, statistics)
                states = enumerate_basis(sector)
                assert len(states) == sector.dim
                assert len(set(states)) == sector.dim
                for i, state in enumerate(states):
                    assert sum(state) == M
                    assert index_of(sector, state) == i
                if statistics == "hardcore":
                    assert sector.dim == comb(L, M)
                    assert all(max(state, default=0) <= 1 for state in states)


def test_errors():
    with pytest.raises(SectorError):
        Sector(3, 4, "hardcore")
    with pytest.raises(SectorError):
        Sector(3, -1)
    with pytest.raises(SectorError):
        Sector(0, 1)
    with pytest.raises(SectorError):
        index_of(Sector(3, 1, "hardcore"), (1, 1, 0))
    with pytest.raises(SectorError):
        index_of(Sector(3, 2, "hardcore"), (2, 0, 0))
    with pytest.raises(ValueError):
        Sector(3, 1, "fermionic")


def test_dimension_guard():
    sector = Sector(20, 10, "hardcore")
    assert sector.dim == comb(20, 10)
    with pytest.raises(SectorError):
        sector.states
