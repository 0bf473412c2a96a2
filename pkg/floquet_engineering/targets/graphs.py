"""Coupling graphs of target Hamiltonians."""

import numpy as np

from floquet_engineering.base import RandomGeneratorMixin
from floquet_engineering.operators import CouplingGraph


def _graph(L, K, G, edges):
    if L < 1:
        raise ValueError(f"Site count must be positive, got {L}.")
    mat = np.zeros((L, L))
    for l, m in edges:
        mat[l, m] = mat[m, l] = K
    return CouplingGraph(np.broadcast_to(np.asarray(G, dtype=float), (L,)), mat)


def star_graph(L, hub, K=1.0, G=0.0):
    """
    Star connectivity: the (1-based) `hub` site couples to every other site.

    Parameters
    ----------
    L : int
        Number of sites.
    hub : int
        Center site, ``1 <= hub <= L``.
    K : float, optional
        Coupling strength, units of J.
    G : float or array_like, optional
        Onsite energies, units of J.

    Returns
    -------
    CouplingGraph

    """
    if not 1 <= hub <= L:
        raise ValueError(f"Hub site must lie in [1, {L}], got {hub}.")
    return _graph(L, K, G, [(hub - 1, m) for m in range(L) if m != hub - 1])


def all_to_all(L, K=1.0, G=0.0):
    """Every pair of sites coupled with strength `K`."""
    return _graph(L, K, G, [(l, m) for l in range(L) for m in range(l + 1, L)])


def ring(L, K=1.0, G=0.0):
    """Nearest-neighbour chain closed by a coupling between the first and last site."""
    if L < 2:
        raise ValueError(f"A ring requires at least two sites, got {L}.")
    return _graph(L, K, G, [(l, l + 1) for l in range(L - 1)] + [(0, L - 1)])


def chain_graph(L, K=1.0, G=0.0):
    """Open nearest-neighbour chain."""
    return _graph(L, K, G, [(l, l + 1) for l in range(L - 1)])


GRAPHS = {"star": star_graph, "all_to_all": all_to_all, "ring": ring, "chain": chain_graph}


def make_graph(name, L, K=1.0, G=0.0, hub=None):
    """Named graph family; `hub` defaults to the central site of a star."""
    if name not in GRAPHS:
        raise ValueError(f"Unknown graph family {name!r}; choose from {sorted(GRAPHS)}.")
    if name == "star":
        return star_graph(L, (L + 1) // 2 if hub is None else hub, K, G)
    return GRAPHS[name](L, K, G)


class RandomGraph(RandomGeneratorMixin):
    """
    Generator of random coupling graphs.

    Parameters
    ----------
    L : int
        Number of sites.
    K_lim : tuple of float, optional
        Uniform range of the couplings.
    G_lim : tuple of float, optional
        Uniform range of the onsite energies.
    density : float, optional
        Probability that a site pair is coupled.
    rng : int or RandomState or Generator, optional
        Random number generator seed or object.

    """

    def __init__(self, L, K_lim=(-1.0, 1.0), G_lim=(-1.0, 1.0), density=1.0, rng=None):
        super().__init__(rng)
        self.L = L
        self.K_lim = K_lim
        self.G_lim = G_lim
        self.density = density

    def __call__(self, n_gen, rng=None):
        """Yield `n_gen` random graphs."""
        rng = self._get_rng(rng)
        for __ in range(n_gen):
            K = np.triu(rng.uniform(*self.K_lim, size=(self.L, self.L)), k=1)
            K *= rng.random(size=K.shape) < self.density
            G = rng.uniform(*self.G_lim, size=self.L)
            yield CouplingGraph(G, K + K.T)
