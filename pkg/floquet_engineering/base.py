"""Core package objects: random state handling, exceptions and warnings."""

from datetime import datetime

import numpy as np

UNITS = "energies in units of J, times in units of 1/J, hbar = 1"


def get_now():
    return datetime.now().replace(microsecond=0).isoformat()


# Exceptions
class SectorError(ValueError):
    """Invalid or empty excitation sector, or a state outside of it."""


class NumericalError(RuntimeError):
    """
    Dense linear algebra failure.

    Parameters
    ----------
    message : str
        Error description.
    diagnostics : dict, optional
        Solver information (matrix size, norms, iteration counts).

    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = {} if diagnostics is None else dict(diagnostics)


class AmbiguousReadoutError(ValueError):
    """
    Readout routes of a satisfiability ground state disagree.

    Parameters
    ----------
    message : str
        Error description.
    correlators : numpy.ndarray
        Raw correlator values per variable.
    amplitude_bits : tuple of int
        Bits decoded from the dominant basis amplitude.

    """

    def __init__(self, message, correlators, amplitude_bits):
        super().__init__(message)
        self.correlators = correlators
        self.amplitude_bits = amplitude_bits


class SweepAbortedError(RuntimeError):
    """
    Adiabatic sweep stopped because a cycle fell below the fidelity floor.

    Parameters
    ----------
    message : str
        Error description.
    trajectory : floquet_engineering.floquet.AdiabaticTrajectory
        Records of every completed cycle, including the failing one.

    """

    def __init__(self, message, trajectory):
        super().__init__(message)
        self.trajectory = trajectory


class ConfigError(ValueError):
    """Invalid run configuration or input file."""


class FloquetWarning(UserWarning):
    """Soft numerical condition that is also recorded in result metadata."""


class RandomGeneratorMixin:
    """
    Mixin class providing a random number generating attribute and methods.

    Parameters
    ----------
    rng : int or RandomState or Generator, optional
        Random number generator seed or object.

    """

    def __init__(self, rng=None):
        self.rng = rng

    @property
    def rng(self):
        r"""NumPy random number generator."""
        return self._rng

    @rng.setter
    def rng(self, value):
        self._rng = self.make_rng(value)

    def _get_rng(self, rng=None):
        if rng is None:
            return self.rng
        else:
            return self.make_rng(rng)

    @staticmethod
    def make_rng(rng):
        """
        Return a random number generator.

        Parameters
        ----------
        rng : int or SeedSequence or Generator, optional
            Random number generator seed or object.

        Returns
        -------
        Generator

        """
        if rng is None:
            return np.random.default_rng()
        elif isinstance(rng, (int, np.integer, np.random.SeedSequence)):
            return np.random.default_rng(rng)
        elif isinstance(rng, (np.random.Generator, np.random.RandomState)):
            return rng
        else:
            raise TypeError("Input must be None, int, or a valid NumPy random number generator.")
