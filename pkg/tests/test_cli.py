import json

import numpy as np
import pytest

from floquet_engineering import io
from floquet_engineering.base import ConfigError
from floquet_engineering.basis import Sector
from floquet_engineering.cli import _int_list, main
from floquet_engineering.config import DEFAULTS, OUTPUT_ENV, RunConfig, merge
from floquet_engineering.grape import ControlSequence
from floquet_engineering.operators import HermitianOperator


# Files
def test_matrix_io(tmp_path):
    rng = np.random.default_rng(0)
    A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    H = HermitianOperator(A + A.conj().T, Sector(3, 2, "hardcore"))
    paths = io.write_matrix(H, tmp_path / "H", {"seed": 0})
    assert [p.name for p in paths] == ["H_real.csv", "H_imag.csv", "H.json"]

    header = io.read_header(tmp_path / "H_real.csv")
    assert set(header) == {"generated", "units", "config"}
    assert header["config"]["seed"] == 0

    for path in (tmp_path / "H.json", tmp_path / "H_real.csv"):
        H_read = io.read_matrix(path)
        assert H_read.sector == H.sector
        assert np.array_equal(H_read.matrix, H.matrix)


def test_matrix_errors(tmp_path):
    with pytest.raises(ConfigError):
        io.read_matrix(tmp_path / "missing.json")

    io.write_matrix(np.array([[0.0, 1.0], [0.0, 0.0]]), tmp_path / "bad")
    with pytest.raises(ConfigError):
        io.read_matrix(tmp_path / "bad.json")


def test_controls_io(tmp_path):
    seq = ControlSequence(np.linspace(-1, 1, 6).reshape(2, 3), ("g1", "g2"))
    for name in ("u.csv", "u.json"):
        io.write_controls(seq, tmp_path / name)
        seq_read = io.read_controls(tmp_path / name)
        assert seq_read.names == seq.names
        assert np.array_equal(seq_read.u, seq.u)


def test_archive(tmp_path):
    seqs = [ControlSequence(np.full((1, 2), x)) for x in (0.0, 0.5)]
    io.save_archive(seqs, tmp_path / "controls.pkl")
    restored = io.load_archive(tmp_path / "controls.pkl")
    assert np.array_equal(restored[1].u, seqs[1].u)


# Configuration
def test_merge():
    data = merge(DEFAULTS, {"drive": {"N": 4, "T": None}, "seed": 3})
    assert data["drive"]["N"] == 4 and data["drive"]["T"] == DEFAULTS["drive"]["T"]
    assert data["seed"] == 3
    assert DEFAULTS["drive"]["N"] == 10

    with pytest.raises(ConfigError):
        merge(DEFAULTS, {"drive": {"period": 2.0}})
    with pytest.raises(ConfigError):
        merge(DEFAULTS, {"solver": {}})


def test_resolve(tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_ENV, str(tmp_path / "env"))
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"target": {"family": "sat"}, "drive": {"N": 6}}))

    cfg = RunConfig.resolve(path, {"drive": {"T": 3.0}})
    assert cfg.sector() == Sector(8, 1, "hardcore")
    assert (cfg["drive"]["N"], cfg["drive"]["T"]) == (6, 3.0)
    assert cfg.output_dir == tmp_path / "env"

    cfg = RunConfig.resolve(None, {"output": {"dir": str(tmp_path)}})
    assert cfg.output_dir == tmp_path

    path.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        RunConfig.resolve(path)
    with pytest.raises(ConfigError):
        RunConfig.resolve(None, {"sector": {"L": 20, "M": 10}})
    with pytest.raises(ConfigError):
        RunConfig.resolve(None, {"target": {"family": "lih"}, "sector": {"L": 16, "M": 2}})


def test_int_list():
    assert _int_list("5..8") == [5, 6, 7, 8]
    assert _int_list("2,4") == [2, 4]


# Command line
def _run(tmp_path, *args):
    return main([*args, "--output", str(tmp_path)])


def test_basis_command(tmp_path):
    assert _run(tmp_path, "basis", "--L", "4", "--M", "2") == 0
    df = io.read_csv(tmp_path / "basis" / "basis.csv")
    assert list(df.columns) == ["index", "occ_1", "occ_2", "occ_3", "occ_4"]
    assert len(df) == 6 and np.all(df.iloc[:, 1:].sum(axis=1) == 2)
    assert (tmp_path / "basis" / "run.log").exists()


def test_target_command(tmp_path):
    assert _run(tmp_path, "target", "--target", "sat") == 0
    data, header = io.read_json(tmp_path / "target" / "target.json")
    assert data["dim"] == 8
    assert header["config"]["sector"]["L"] == 8

    table = io.read_csv(tmp_path / "target" / "truth_table.csv")
    assert table["C"].tolist() == [2, 0, 2, 1, 2, 3, 1, 1]
    assert (tmp_path / "target" / "pauli_terms.csv").exists()


def test_exit_codes(tmp_path):
    assert _run(tmp_path, "target", "--target", "hexagon") == 1
    assert _run(tmp_path, "target", "--target", "matrix", "--matrix", "missing.json") == 1
    assert _run(tmp_path, "adiabatic", "--target", "star") == 1
    assert _run(tmp_path, "basis", "--L", "3", "--statistics", "bosonic", "--M", "2") == 1


def _read_without_timestamps(path):
    return [line for line in path.read_text().splitlines() if "generated" not in line]


def test_optimize_and_evolve(tmp_path):
    args = ["--L", "3", "--N", "4", "--T", "2", "--restarts", "2", "--max-iter", "50"]
    assert _run(tmp_path, "optimize", *args) == 0
    out = tmp_path / "optimize"
    files = sorted(p.name for p in out.iterdir() if p.name != "run.log")
    contents = {name: _read_without_timestamps(out / name) for name in files}

    summary, _ = io.read_json(out / "summary.json")
    assert 0 <= summary["fidelity"] <= 1 + 1e-12
    assert summary["H_eff_relative_error"] >= 0
    quasienergies = io.read_csv(out / "quasienergies.csv")["quasienergy"]
    assert np.all(np.abs(quasienergies) <= np.pi / 2)

    # reruns of the same configuration reproduce every file up to the timestamps
    assert _run(tmp_path, "optimize", *args) == 0
    assert {name: _read_without_timestamps(out / name) for name in files} == contents

    controls = str(out / "controls.csv")
    assert _run(tmp_path, "evolve", *args, "--controls", controls, "--periods", "5") == 0
    df = io.read_csv(tmp_path / "evolve" / "populations.csv")
    assert df["period"].tolist() == list(range(6))
    assert np.allclose(df[["p_1", "p_2", "p_3"]].sum(axis=1), 1.0)
    assert df["target_overlap"].iloc[0] == pytest.approx(1.0)

    assert _run(tmp_path, "evolve", *args, "--controls", controls, "--state", "9") == 1


def test_optimize_exports_target_hamiltonian(tmp_path):
    """A static chain is reachable, so the exported H_eff reproduces it including its phase."""
    args = ["--target", "chain", "--L", "3", "--drive", "gJ", "--N", "2", "--T", "1"]
    assert _run(tmp_path, "optimize", *args, "--restarts", "4", "--max-iter", "300") == 0
    out = tmp_path / "optimize"

    summary, header = io.read_json(out / "summary.json")
    assert header["config"]["optimizer"]["objective"] == "abs"
    assert summary["fidelity"] >= 0.999
    assert summary["H_eff_relative_error"] <= 1e-2

    H_eff = io.read_matrix(out / "H_eff_real.csv")
    assert H_eff.sector == Sector(3, 1, "hardcore")
    hopping = 0.1 * (np.eye(3, k=1) + np.eye(3, k=-1))
    assert np.allclose(H_eff.matrix, hopping, atol=1e-3)
