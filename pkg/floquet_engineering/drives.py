"""Control problems of a driven nearest-neighbour chain."""

import numpy as np

from floquet_engineering.basis import Sector
from floquet_engineering.grape import ControlProblem
from floquet_engineering.operators import (
    ChainDriveFrame,
    HermitianOperator,
    build_chain,
    hopping_operator,
    number_operator,
)


class ChainDrive:
    """
    Chain of `L` sites whose onsite energies and/or couplings are piecewise-constant controls.

    The same drive describes every excitation sector, so a sequence optimized for one
    excitation can be replayed in any other sector via :meth:`problem`.

    Parameters
    ----------
    L : int
        Number of sites.
    drive_g : bool, optional
        Onsite energies ``g_l`` are controls; otherwise they are held at `g_static`.
    drive_J : bool, optional
        Couplings ``J_l`` are controls; otherwise they are held at `J_static`.
    g_bounds : tuple of float, optional
        Control range of each onsite energy, units of J.
    J_bounds : tuple of float, optional
        Control range of each coupling, units of J.
    g_static : float or array_like, optional
        Undriven onsite energies.
    J_static : float or array_like, optional
        Undriven couplings.
    U : float, optional
        Anharmonicity of bosonic sectors; ignored for hardcore sectors.
    convention : {"number", "pauli"}, optional
        Onsite term ``g n`` or ``(g/2) sigma^z``.

    """

    def __init__(
        self,
        L,
        drive_g=True,
        drive_J=False,
        g_bounds=(-5.0, 5.0),
        J_bounds=(-1.0, 1.0),
        g_static=0.0,
        J_static=1.0,
        U=np.inf,
        convention="number",
    ):
        if not (drive_g or drive_J):
            raise ValueError("At least one of the onsite energies or couplings must be driven.")
        if drive_J and L < 2:
            raise ValueError("Coupling drive requires at least two sites.")
        self.L = int(L)
        self.drive_g = drive_g
        self.drive_J = drive_J
        self.g_bounds = tuple(map(float, g_bounds))
        self.J_bounds = tuple(map(float, J_bounds))
        self.g_static = np.broadcast_to(np.asarray(g_static, dtype=float), (self.L,)).copy()
        self.J_static = np.broadcast_to(np.asarray(J_static, dtype=float), (self.L - 1,)).copy()
        self.U = float(U)
        self.convention = convention

    def __repr__(self):
        driven = "+".join(name for name, on in (("g", self.drive_g), ("J", self.drive_J)) if on)
        return f"ChainDrive(L={self.L}, drive={driven}, U={self.U})"

    @classmethod
    def onsite(cls, L, gmax=5.0, J=1.0, **kwargs):
        """Onsite energies driven within ``[-gmax, gmax]``, static couplings `J`."""
        return cls(L, drive_g=True, drive_J=False, g_bounds=(-gmax, gmax), J_static=J, **kwargs)

    @classmethod
    def onsite_coupling(cls, L, gmax=5.0, Jmax=1.0, **kwargs):
        """Onsite energies within ``[-gmax, gmax]`` and couplings within ``[-Jmax, Jmax]``."""
        kwargs = dict(g_bounds=(-gmax, gmax), J_bounds=(-Jmax, Jmax)) | kwargs
        return cls(L, drive_g=True, drive_J=True, **kwargs)

    @property
    def names(self):
        names = []
        if self.drive_g:
            names += [f"g{l + 1}" for l in range(self.L)]
        if self.drive_J:
            names += [f"J{l + 1}" for l in range(self.L - 1)]
        return tuple(names)

    @property
    def bounds(self):
        bounds = []
        if self.drive_g:
            bounds += [self.g_bounds] * self.L
        if self.drive_J:
            bounds += [self.J_bounds] * (self.L - 1)
        return np.array(bounds)

    def _static_frame(self):
        g = np.zeros(self.L) if self.drive_g else self.g_static
        J = np.zeros(self.L - 1) if self.drive_J else self.J_static
        return ChainDriveFrame(g, J, self.U)

    def problem(self, sector, N, T):
        """
        Control problem of the drive restricted to an excitation sector.

        Parameters
        ----------
        sector : Sector
        N : int
            Number of time steps.
        T : float
            Period in units of 1/J.

        Returns
        -------
        ControlProblem

        """
        if not isinstance(sector, Sector):
            sector = Sector(*sector)
        if sector.L != self.L:
            raise ValueError(f"Drive has {self.L} sites but {sector} has {sector.L}.")

        drift = build_chain(sector, self._static_frame(), self.convention)
        shift = 0.5 * np.eye(sector.dim) if self.convention == "pauli" else 0.0

        controls = []
        if self.drive_g:
            controls += [
                HermitianOperator(number_operator(sector, l) - shift, sector) for l in range(self.L)
            ]
        if self.drive_J:
            controls += [
                HermitianOperator(hopping_operator(sector, l, l + 1), sector)
                for l in range(self.L - 1)
            ]
        return ControlProblem(drift, controls, self.bounds, N, T, self.names)

    def frames(self, seq):
        """Instantaneous chain parameters of every step of a control sequence."""
        u = np.asarray(getattr(seq, "u", seq), dtype=float)
        if u.shape[0] != len(self.names):
            raise ValueError(f"Sequence has {u.shape[0]} controls, drive has {len(self.names)}.")

        base = self._static_frame()
        n_g = self.L if self.drive_g else 0
        frames = []
        for u_j in u.T:
            g = base.g + (u_j[:n_g] if self.drive_g else 0.0)
            J = base.J + (u_j[n_g:] if self.drive_J else 0.0)
            frames.append(ChainDriveFrame(g, J, self.U))
        return frames

    def to_dict(self):
        return {
            "L": self.L,
            "drive_g": self.drive_g,
            "drive_J": self.drive_J,
            "g_bounds": list(self.g_bounds),
            "J_bounds": list(self.J_bounds),
            "g_static": self.g_static.tolist(),
            "J_static": self.J_static.tolist(),
            "U": None if np.isinf(self.U) else self.U,
            "convention": self.convention,
        }
