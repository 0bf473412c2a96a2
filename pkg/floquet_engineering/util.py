"""Common utilities."""

from functools import wraps
from time import perf_counter

import numpy as np
import pandas as pd
from matplotlib import pyplot as plt


def summarize_matrix(matrix, max_dim=16, **tabulate_kwargs):
    """Markdown table of the real part of a matrix, plus norms; large matrices are truncated."""
    matrix = np.asarray(getattr(matrix, "matrix", matrix))
    tabulate_kwargs = dict(tablefmt="github", floatfmt=".3f") | tabulate_kwargs

    n = min(matrix.shape[0], max_dim)
    df = pd.DataFrame(matrix[:n, :n].real, index=range(1, n + 1), columns=range(1, n + 1))
    str_ = df.to_markdown(**tabulate_kwargs)
    if n < matrix.shape[0]:
        str_ += f"\n... ({matrix.shape[0]} x {matrix.shape[1]}, showing leading {n} x {n})"

    imag = np.abs(matrix.imag).max(initial=0.0)
    str_ += f"\n\nFrobenius norm: {np.linalg.norm(matrix):.6f}, max |Im|: {imag:.3e}"
    return str_


def timed(func):
    """Wrap a function, creating a function that outputs runtime in addition to its result."""

    @wraps(func)
    def timed_func(*args, **kwargs):
        t_start = perf_counter()
        out = func(*args, **kwargs)
        t_run = perf_counter() - t_start
        return out, t_run

    return timed_func


def plot_matrix(matrix, part="real", ax=None, ax_kwargs=None, colorbar=True):
    """
    Display a Hamiltonian or propagator as an image.

    Parameters
    ----------
    matrix : array_like or HermitianOperator or UnitaryOperator
    part : {"real", "imag", "abs"}, optional
        Matrix part to display.
    ax : matplotlib.axes.Axes, optional
        Matplotlib axes target object.
    ax_kwargs : dict, optional
        Additional Axes keyword parameters.
    colorbar : bool, optional
        Add a colorbar.

    Returns
    -------
    matplotlib.axes.Axes

    """
    matrix = np.asarray(getattr(matrix, "matrix", matrix))
    values = {"real": matrix.real, "imag": matrix.imag, "abs": np.abs(matrix)}[part]

    if ax is None:
        _, ax = plt.subplots()
    vmax = np.abs(values).max(initial=0.0) or 1.0
    cmap = "viridis" if part == "abs" else "RdBu_r"
    vmin = 0.0 if part == "abs" else -vmax
    im = ax.imshow(values, cmap=cmap, vmin=vmin, vmax=vmax, interpolation="nearest")
    if colorbar:
        ax.figure.colorbar(im, ax=ax)

    if ax_kwargs is None:
        ax_kwargs = {}
    ax_kwargs = dict(xlabel="$m$", ylabel="$l$", title=part) | ax_kwargs
    ax.set(**ax_kwargs)
    return ax


def plot_controls(seq, T, ax=None, ax_kwargs=None, legend=True):
    """
    Plot a piecewise-constant control sequence against time.

    Parameters
    ----------
    seq : ControlSequence
    T : float
        Period in units of 1/J.
    ax : matplotlib.axes.Axes, optional
        Matplotlib axes target object.
    ax_kwargs : dict, optional
        Additional Axes keyword parameters.
    legend : bool, optional
        Add legend to plot.

    Returns
    -------
    matplotlib.axes.Axes

    """
    t = np.linspace(0.0, T, seq.N + 1)

    with plt.rc_context({"axes.xmargin": 0}):
        if ax is None:
            _, ax = plt.subplots()
        for name, row in zip(seq.names, seq.u):
            ax.stairs(row, t, label=name, baseline=None)

    if ax_kwargs is None:
        ax_kwargs = {}
    ax_kwargs = dict(xlabel="$t J$", ylabel="$u / J$") | ax_kwargs
    ax.set(**ax_kwargs)
    if legend:
        ax.legend(ncol=max(1, seq.R // 8))
    return ax
