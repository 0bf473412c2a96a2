"""
CSV/JSON readers and writers for operators, control sequences, reports and trajectories.

Every file starts with a timestamp, the unit convention and the resolved run configuration.
In CSV files these are ``#`` comment lines; in JSON files they are the top-level keys
``generated``, ``units`` and ``config`` next to ``data``. Only the timestamp differs between
two runs of the same configuration.
"""

import json
from pathlib import Path

import dill
import numpy as np
import pandas as pd

from floquet_engineering.base import UNITS, ConfigError, get_now
from floquet_engineering.basis import Sector
from floquet_engineering.grape import ControlSequence
from floquet_engineering.operators import HermitianOperator

FLOAT_FORMAT = "%.17g"


def _prepare(path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _config_json(config):
    return json.dumps({} if config is None else config, sort_keys=True, default=_default)


def _default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, Path):
        return obj.as_posix()
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    if hasattr(obj, "value"):  # enums
        return obj.value
    raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable.")


# Generic tables and documents
def write_csv(df, path, config=None, index=False):
    """Write a table below the ``#`` header lines."""
    path = _prepare(path)
    with path.open("w", newline="") as fid:
        fid.write(f"# generated: {get_now()}\n")
        fid.write(f"# units: {UNITS}\n")
        fid.write(f"# config: {_config_json(config)}\n")
        df.to_csv(fid, index=index, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def read_header(path):
    """Header fields of a CSV file written by `write_csv`."""
    header = {}
    with Path(path).open() as fid:
        for line in fid:
            if not line.startswith("#"):
                break
            key, _, value = line[1:].strip().partition(": ")
            header[key] = json.loads(value) if key == "config" else value
    return header


def read_csv(path, **kwargs):
    return pd.read_csv(path, comment="#", float_precision="round_trip", **kwargs)


def write_json(data, path, config=None):
    """Write ``{"generated", "units", "config", "data"}`` with sorted keys."""
    path = _prepare(path)
    doc = {"generated": get_now(), "units": UNITS, "config": config or {}, "data": data}
    with path.open("w") as fid:
        json.dump(doc, fid, indent=2, sort_keys=True, default=_default)
        fid.write("\n")
    return path


def read_json(path):
    """
    Load a document written by `write_json`.

    Returns
    -------
    object
        The ``data`` entry.
    dict
        Header entries ``generated``, ``units`` and ``config``.

    """
    with Path(path).open() as fid:
        doc = json.load(fid)
    data = doc.pop("data")
    return data, doc


# Matrices
def _matrix_paths(path):
    path = Path(path)
    stem = path.with_suffix("")
    return stem.with_name(stem.name + "_real.csv"), stem.with_name(stem.name + "_imag.csv")


def write_matrix(op, path, config=None):
    """
    Write an operator as a real/imaginary CSV pair and as JSON.

    Parameters
    ----------
    op : HermitianOperator or UnitaryOperator or array_like
    path : str or Path
        Base path; ``<stem>_real.csv``, ``<stem>_imag.csv`` and ``<stem>.json`` are written.
    config : dict, optional
        Resolved run configuration for the file headers.

    Returns
    -------
    list of Path

    """
    matrix = np.asarray(getattr(op, "matrix", op), dtype=complex)
    sector = getattr(op, "sector", None)
    config = dict(config or {}) | {"sector": None if sector is None else sector.to_dict()}

    real_path, imag_path = _matrix_paths(path)
    paths = [
        write_csv(pd.DataFrame(matrix.real), real_path, config),
        write_csv(pd.DataFrame(matrix.imag), imag_path, config),
    ]
    data = {
        "dim": matrix.shape[0],
        "sector": config["sector"],
        "entries": {"real": matrix.real.tolist(), "imag": matrix.imag.tolist()},
    }
    paths.append(write_json(data, Path(path).with_suffix(".json"), config))
    return paths


def read_matrix(path):
    """
    Load a Hermitian operator from a JSON file or a ``*_real.csv`` file.

    For CSV input the sibling ``*_imag.csv`` is used if it exists. The sector is restored from
    the file header when it was recorded.

    Returns
    -------
    HermitianOperator

    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Matrix file {path} does not exist.")

    if path.suffix == ".json":
        data, _ = read_json(path)
        matrix = np.array(data["entries"]["real"]) + 1j * np.array(data["entries"]["imag"])
        sector = data.get("sector")
    else:
        matrix = read_csv(path).to_numpy(dtype=float).astype(complex)
        imag_path = path.with_name(path.name.replace("_real.csv", "_imag.csv"))
        if imag_path != path and imag_path.exists():
            matrix = matrix + 1j * read_csv(imag_path).to_numpy(dtype=float)
        sector = read_header(path).get("config", {}).get("sector")

    sector = None if sector is None else Sector(**sector)
    try:
        return HermitianOperator(matrix, sector)
    except ValueError as err:
        raise ConfigError(f"Invalid matrix in {path}: {err}") from err


# Domain objects
def write_basis(sector, path, config=None):
    """Basis listing with columns ``index, occ_1 .. occ_L``."""
    df = pd.DataFrame(sector.states, columns=[f"occ_{l + 1}" for l in range(sector.L)])
    df.insert(0, "index", np.arange(sector.dim))
    return write_csv(df, path, dict(config or {}) | {"sector": sector.to_dict()})


def write_controls(seq, path, config=None):
    """Control sequence as CSV (``step, control_name, value``) or JSON, by file suffix."""
    path = Path(path)
    if path.suffix == ".json":
        data = {"names": list(seq.names), "u": seq.u.tolist()}
        return write_json(data, path, config)
    return write_csv(seq.to_frame(), path, config)


def read_controls(path):
    path = Path(path)
    if path.suffix == ".json":
        data, _ = read_json(path)
        return ControlSequence(np.array(data["u"], dtype=float), tuple(data["names"]))
    return ControlSequence.from_frame(read_csv(path))


def write_report(report, path, config=None):
    return write_json(report.to_dict(), path, config)


def write_trajectory(trajectory, path, config=None):
    """Adiabatic trajectory as CSV (one row per cycle) or JSON, by file suffix."""
    path = Path(path)
    if path.suffix == ".json":
        records = [
            rec
            | {
                "quasienergies": np.asarray(rec["quasienergies"]).tolist(),
                "bits": None if rec["bits"] is None else list(rec["bits"]),
            }
            for rec in trajectory.records
        ]
        return write_json(records, path, config)
    return write_csv(trajectory.to_frame(), path, config)


# Archives
def save_archive(obj, path):
    """Pickle an object (e.g. the per-cycle control sequences of a sweep) with dill."""
    path = _prepare(path)
    with path.open(mode="wb") as fid:
        dill.dump(obj, fid)
    return path


def load_archive(path):
    with Path(path).open(mode="rb") as fid:
        return dill.load(fid)
