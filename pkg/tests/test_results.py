import numpy as np

from floquet_engineering.basis import Sector
from floquet_engineering.drives import ChainDrive
from floquet_engineering.grape import GrapeOptions
from floquet_engineering.operators import build_target_spin_jw
from floquet_engineering.results import _point_seeds, fidelity_grid, tmin_scaling
from floquet_engineering.targets.graphs import chain_graph, star_graph

options = GrapeOptions(restarts=2, seed=0, max_iter=30)


def test_point_seeds():
    assert _point_seeds(0, 4) == _point_seeds(0, 4)
    assert len(set(_point_seeds(0, 4))) == 4
    assert _point_seeds(0, 2) != _point_seeds(1, 2)


def test_fidelity_grid():
    drive = ChainDrive.onsite(3)
    sector = Sector(3, 1, "hardcore")
    H = build_target_spin_jw(3, star_graph(3, hub=2, K=0.1), 1)

    df = fidelity_grid(drive, sector, H, [1.0, 2.0], [2, 3], options)
    assert len(df) == 4
    assert list(df.columns) == ["T", "N", "tau", "fidelity", "iterations", "best_restart"]
    assert np.allclose(df["tau"], df["T"] / df["N"])
    assert np.all((df["fidelity"] >= 0) & (df["fidelity"] <= 1 + 1e-12))

    assert df.equals(fidelity_grid(drive, sector, H, [1.0, 2.0], [2, 3], options))


def test_tmin_scaling():
    """The static chain is reachable with constant couplings, so short periods suffice."""
    df, fit = tmin_scaling(
        lambda L: ChainDrive.onsite_coupling(L),
        lambda L: build_target_spin_jw(L, chain_graph(L), 1),
        [2, 3],
        tau=1.0,
        threshold=0.99,
        N_max=5,
        options=GrapeOptions(restarts=3, seed=0, max_iter=200),
    )
    assert df["L"].tolist() == [2, 3]
    assert df["T_min"].notna().all()
    assert np.all(df["fidelity"] > 0.99)
    assert np.isfinite(fit["slope"]) and np.isfinite(fit["intercept"])

    _, fit = tmin_scaling(
        lambda L: ChainDrive.onsite_coupling(L),
        lambda L: build_target_spin_jw(L, chain_graph(L), 1),
        [2],
        threshold=0.99,
        N_max=5,
        options=GrapeOptions(restarts=3, seed=0, max_iter=200),
    )
    assert np.isnan(fit["slope"])
