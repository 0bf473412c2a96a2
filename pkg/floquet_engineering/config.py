"""
Run configuration of the command-line interface.

A configuration is a JSON object with the sections below; every key is optional and missing
keys take the values of `DEFAULTS`. Command-line flags are applied last and win. ::

    {
      "sector":    {"L": 9, "M": 1, "statistics": "hardcore"},
      "target":    {"family": "star", "K": 0.1, "G": 0.0, "hub": null, "U": 0.0,
                    "matrix": null, "clauses": null, "scale": 1.0, "omega": 0.25},
      "drive":     {"controls": "g", "gmax": 5.0, "Jmax": 1.0, "J": 1.0, "U": null,
                    "N": 10, "T": 10.0, "convention": "number"},
      "optimizer": {"max_iter": 1000, "restarts": 10, "objective": "abs", ...},
      "sweep":     {"mode": "grid", "T_values": [...], "N_values": [...], "L_values": [...],
                    "tau": 1.0, "threshold": 0.999, "N_max": 40, "M_values": [1, 2, 3, 4],
                    "n_jobs": null},
      "adiabatic": {"cycles": 200, "schedule": "linear", "fidelity_floor": 0.999,
                    "archive": false},
      "evolve":    {"periods": 10, "state": 1, "controls": null},
      "output":    {"dir": null, "images": false},
      "seed": 0
    }

``target.family`` is one of the graph families (``star``, ``all_to_all``, ``ring``, ``chain``),
``lih``, ``sat`` (clauses from ``target.clauses`` or the built-in example) or ``matrix``
(operator file given by ``target.matrix``). ``drive.controls`` is ``g`` or ``gJ``. A ``null``
output directory resolves to ``$FLOQUET_ENG_OUTPUT`` and then ``./results``. Without
``evolve.controls`` (a control sequence file) the drive is optimized before evolving.
"""

import copy
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from floquet_engineering.base import ConfigError
from floquet_engineering.basis import MAX_DIM, Sector
from floquet_engineering.floquet import SCHEDULES
from floquet_engineering.grape import GrapeOptions, Objective
from floquet_engineering.targets.graphs import GRAPHS

OUTPUT_ENV = "FLOQUET_ENG_OUTPUT"

TARGET_FAMILIES = tuple(GRAPHS) + ("lih", "sat", "matrix")
FIXED_SITES = {"lih": 16, "sat": 8}  # single-excitation encodings of 4 and 3 qubits

DEFAULTS = {
    "sector": {"L": 9, "M": 1, "statistics": "hardcore"},
    "target": {
        "family": "star",
        "K": 0.1,
        "G": 0.0,
        "hub": None,
        "U": 0.0,
        "matrix": None,
        "clauses": None,
        "scale": 1.0,
        "omega": 0.25,
    },
    "drive": {
        "controls": "g",
        "gmax": 5.0,
        "Jmax": 1.0,
        "J": 1.0,
        "U": None,
        "N": 10,
        "T": 10.0,
        "convention": "number",
    },
    "optimizer": {
        "max_iter": 1000,
        "restarts": 10,
        "objective": "abs",
        "convergence_tol": 1e-10,
        "gtol": 1e-8,
        "memory": 10,
        "n_jobs": 1,
        "jitter": 0.0,
    },
    "sweep": {
        "mode": "grid",
        "T_values": [2.0, 4.0, 6.0, 8.0, 10.0],
        "N_values": [2, 4, 6, 8, 10],
        "L_values": [5, 6, 7, 8, 9, 10],
        "tau": 1.0,
        "threshold": 0.999,
        "N_max": 40,
        "M_values": [1, 2, 3, 4],
        "n_jobs": None,
    },
    "adiabatic": {"cycles": 200, "schedule": "linear", "fidelity_floor": 0.999, "archive": False},
    "evolve": {"periods": 10, "state": 1, "controls": None},
    "output": {"dir": None, "images": False},
    "seed": 0,
}

SECTIONS = tuple(key for key, value in DEFAULTS.items() if isinstance(value, dict))


def merge(base, overrides):
    """Section-wise update of a configuration; `None` values in `overrides` are skipped."""
    out = copy.deepcopy(base)
    for key, value in overrides.items():
        if key not in DEFAULTS:
            raise ConfigError(f"Unknown configuration key {key!r}.")
        if key in SECTIONS:
            if not isinstance(value, dict):
                raise ConfigError(f"Configuration section {key!r} must be an object.")
            unknown = set(value) - set(DEFAULTS[key])
            if unknown:
                raise ConfigError(f"Unknown keys {sorted(unknown)} in section {key!r}.")
            out[key] |= {k: v for k, v in value.items() if v is not None}
        elif value is not None:
            out[key] = value
    return out


def load_config(path):
    """Read a JSON configuration file."""
    try:
        with Path(path).open() as fid:
            data = json.load(fid)
    except FileNotFoundError as err:
        raise ConfigError(f"Configuration file {path} does not exist.") from err
    except json.JSONDecodeError as err:
        raise ConfigError(f"Configuration file {path} is not valid JSON: {err}") from err
    if not isinstance(data, dict):
        raise ConfigError(f"Configuration file {path} must contain a JSON object.")
    return data


@dataclass
class RunConfig:
    """
    Resolved, validated configuration of one command.

    Parameters
    ----------
    data : dict
        Complete configuration, see `DEFAULTS`.

    """

    data: dict = field(default_factory=lambda: copy.deepcopy(DEFAULTS))

    def __post_init__(self):
        self.validate()

    @classmethod
    def resolve(cls, path=None, overrides=None):
        """Defaults, then the JSON file at `path`, then `overrides` (command-line flags)."""
        data = copy.deepcopy(DEFAULTS)
        explicit = set()
        for layer in (load_config(path) if path is not None else {}, overrides or {}):
            data = merge(data, layer)
            explicit |= {k for k, v in layer.get("sector", {}).items() if v is not None}

        family = data["target"]["family"]
        if family in FIXED_SITES and "L" not in explicit:
            data["sector"] |= {"L": FIXED_SITES[family], "M": 1, "statistics": "hardcore"}
        if data["output"]["dir"] is None:
            data["output"]["dir"] = os.environ.get(OUTPUT_ENV, "results")
        return cls(data)

    def __getitem__(self, key):
        return self.data[key]

    def to_dict(self):
        return copy.deepcopy(self.data)

    @property
    def output_dir(self):
        return Path(self.data["output"]["dir"])

    @property
    def seed(self):
        return self.data["seed"]

    def sector(self):
        return Sector(**self.data["sector"])

    def grape_options(self):
        return GrapeOptions(seed=self.seed, **self.data["optimizer"])

    def validate(self):
        """Check every section against the preconditions of the routines it configures."""
        sector, target, drive = self["sector"], self["target"], self["drive"]
        try:
            s = self.sector()
        except (TypeError, ValueError) as err:
            raise ConfigError(f"Invalid sector: {err}") from err
        if s.dim > MAX_DIM:
            raise ConfigError(f"{s} has dimension {s.dim}, above the limit {MAX_DIM}.")
        if not s.hardcore and drive["U"] is None:
            raise ConfigError("Bosonic sectors require a finite drive.U.")

        if target["family"] not in TARGET_FAMILIES:
            raise ConfigError(
                f"Unknown target family {target['family']!r}; choose from {list(TARGET_FAMILIES)}."
            )
        if target["family"] in FIXED_SITES and (s.M != 1 or not s.hardcore):
            raise ConfigError(f"Target {target['family']!r} needs one hardcore excitation.")
        if target["family"] == "matrix" and target["matrix"] is None:
            raise ConfigError("Target family 'matrix' requires target.matrix.")
        if target["family"] == "star" and target["hub"] is not None:
            if not 1 <= target["hub"] <= sector["L"]:
                raise ConfigError(f"Hub site must lie in [1, {sector['L']}].")

        if drive["controls"] not in ("g", "gJ"):
            raise ConfigError(f"drive.controls must be 'g' or 'gJ', got {drive['controls']!r}.")
        if drive["convention"] not in ("number", "pauli"):
            raise ConfigError(f"Unknown onsite convention {drive['convention']!r}.")
        if int(drive["N"]) != drive["N"] or drive["N"] < 1:
            raise ConfigError(f"drive.N must be a positive integer, got {drive['N']}.")
        if drive["T"] <= 0:
            raise ConfigError(f"drive.T must be positive, got {drive['T']}.")
        if drive["gmax"] <= 0 or drive["Jmax"] <= 0:
            raise ConfigError("Control bounds gmax and Jmax must be positive.")

        opt = self["optimizer"]
        try:
            Objective(opt["objective"])
            self.grape_options()
        except (TypeError, ValueError) as err:
            raise ConfigError(f"Invalid optimizer settings: {err}") from err

        sweep = self["sweep"]
        if sweep["mode"] not in ("grid", "tmin", "lift"):
            raise ConfigError(f"sweep.mode must be grid, tmin or lift, got {sweep['mode']!r}.")
        if sweep["tau"] <= 0 or not 0 < sweep["threshold"] < 1:
            raise ConfigError("sweep.tau must be positive and sweep.threshold in (0, 1).")

        adiabatic = self["adiabatic"]
        if adiabatic["cycles"] < 1:
            raise ConfigError(f"adiabatic.cycles must be positive, got {adiabatic['cycles']}.")
        if adiabatic["schedule"] not in SCHEDULES:
            raise ConfigError(f"Unknown schedule {adiabatic['schedule']!r}.")

        if self["evolve"]["periods"] < 0 or self["evolve"]["state"] < 1:
            raise ConfigError("evolve.periods must be non-negative and evolve.state positive.")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError(f"Seed must be a non-negative integer, got {self.seed!r}.")
