"""
Piecewise-constant optimal control of one-period propagators.

Step propagators are built from the spectral decomposition of the step Hamiltonians, which
also yields exact gradients of the trace fidelity with respect to every control value.
"""

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from multiprocessing import Pool
from typing import Optional
from warnings import warn

import numpy as np
import pandas as pd
from scipy.optimize import minimize
from tqdm import tqdm

from floquet_engineering.base import FloquetWarning, NumericalError, RandomGeneratorMixin
from floquet_engineering.numerics import UnitaryOperator, _as_array

logger = logging.getLogger(__name__)

DEGENERACY_RTOL = 1e-10


class Objective(str, Enum):
    ABS = "abs"
    REAL = "real"


@dataclass(frozen=True)
class ControlProblem:
    """
    Drift plus bounded control generators, discretized into `N` steps over a period `T`.

    Parameters
    ----------
    drift : HermitianOperator
        Static Hamiltonian.
    controls : Sequence of HermitianOperator
        Control generators, each multiplied by one control value per step.
    bounds : array_like
        Per-control ``(lo, hi)`` limits, shape (R, 2), units of J.
    N : int
        Number of time steps.
    T : float
        Period in units of 1/J.
    names : Sequence of str, optional
        Control labels.

    """

    drift: object
    controls: tuple
    bounds: np.ndarray
    N: int
    T: float
    names: Optional[tuple] = None

    def __post_init__(self):
        controls = tuple(self.controls)
        bounds = np.array(self.bounds, dtype=float).reshape(len(controls), 2)
        if len(controls) == 0:
            raise ValueError("At least one control generator is required.")
        if any(V.dim != self.drift.dim for V in controls):
            raise ValueError("Control generators and drift must share one dimension.")
        if np.any(bounds[:, 0] > bounds[:, 1]):
            raise ValueError("Lower bounds must not exceed upper bounds.")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"Number of steps must be a positive integer, got {self.N}.")
        if not self.T > 0:
            raise ValueError(f"Period must be positive, got {self.T}.")

        names = self.names
        if names is None:
            names = tuple(f"u{k + 1}" for k in range(len(controls)))
        elif len(names) != len(controls):
            raise ValueError("One name per control generator is required.")

        bounds.setflags(write=False)
        object.__setattr__(self, "controls", controls)
        object.__setattr__(self, "bounds", bounds)
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "T", float(self.T))
        object.__setattr__(self, "names", tuple(names))

    @property
    def R(self):
        return len(self.controls)

    @property
    def tau(self):
        return self.T / self.N

    @property
    def dim(self):
        return self.drift.dim

    @property
    def sector(self):
        return self.drift.sector

    @property
    def generators(self):
        """Control matrices stacked with shape (R, D, D)."""
        return np.stack([V.matrix for V in self.controls])

    def step_hamiltonians(self, u):
        """Matrices ``H_d + sum_k u_kj V_k`` with shape (N, D, D)."""
        u = np.asarray(u, dtype=float).reshape(self.R, self.N)
        return self.drift.matrix + np.einsum("kj,kab->jab", u, self.generators)

    def random_sequence(self, rng=None):
        """Controls drawn uniformly within the bounds."""
        rng = RandomGeneratorMixin.make_rng(rng)
        lo, hi = self.bounds.T
        u = rng.uniform(lo[:, None], hi[:, None], size=(self.R, self.N))
        return ControlSequence(u, self.names)

    def clip(self, u):
        lo, hi = self.bounds.T
        return np.clip(np.asarray(u, dtype=float), lo[:, None], hi[:, None])


@dataclass(frozen=True)
class ControlSequence:
    """
    Control values ``u_k(t_j)`` held constant over each step.

    Parameters
    ----------
    u : array_like
        Shape (R, N).
    names : Sequence of str, optional
        Control labels.

    """

    u: np.ndarray
    names: Optional[tuple] = None

    def __post_init__(self):
        u = np.array(self.u, dtype=float, ndmin=2)
        if u.ndim != 2:
            raise ValueError(f"Control array must be 2-dimensional, got shape {u.shape}.")
        names = self.names
        if names is None:
            names = tuple(f"u{k + 1}" for k in range(u.shape[0]))
        elif len(names) != u.shape[0]:
            raise ValueError("One name per control row is required.")
        u.setflags(write=False)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "names", tuple(names))

    @property
    def R(self):
        return self.u.shape[0]

    @property
    def N(self):
        return self.u.shape[1]

    def within(self, bounds):
        lo, hi = np.asarray(bounds, dtype=float).T
        return bool(np.all(self.u >= lo[:, None]) and np.all(self.u <= hi[:, None]))

    def to_frame(self):
        """Long table with columns ``step, control_name, value`` (steps count from 1)."""
        steps, rows = np.meshgrid(np.arange(1, self.N + 1), np.arange(self.R))
        return pd.DataFrame(
            {
                "step": steps.ravel(),
                "control_name": np.array(self.names)[rows.ravel()],
                "value": self.u.ravel(),
            }
        )

    @classmethod
    def from_frame(cls, df):
        wide = df.pivot(index="control_name", columns="step", values="value")
        names = list(dict.fromkeys(df["control_name"]))
        wide = wide.loc[names].sort_index(axis=1)
        return cls(wide.to_numpy(), tuple(names))


@dataclass(frozen=True)
class GrapeOptions:
    """
    Optimizer settings.

    Parameters
    ----------
    max_iter : int
        Quasi-Newton iteration limit per restart.
    restarts : int
        Number of independent initializations.
    seed : int, optional
        Root seed; per-restart seeds are spawned from it.
    objective : Objective or str
        ``"abs"`` for ``|tr|/D`` or ``"real"`` for ``Re tr/D``.
    convergence_tol : float
        Stop when the fidelity change per iteration falls below this value.
    gtol : float
        Stop when the projected gradient infinity-norm falls below this value.
    memory : int
        Number of stored curvature pairs.
    n_jobs : int
        Worker processes for restarts.
    init : array_like, optional
        Warm start for the first restart, shape (R, N).
    jitter : float
        Gaussian noise added to the warm start, relative to the bound widths.

    """

    max_iter: int = 1000
    restarts: int = 10
    seed: Optional[int] = None
    objective: Objective = Objective.ABS
    convergence_tol: float = 1e-10
    gtol: float = 1e-8
    memory: int = 10
    n_jobs: int = 1
    init: Optional[np.ndarray] = field(default=None, repr=False)
    jitter: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "objective", Objective(self.objective))
        if self.restarts < 1:
            raise ValueError(f"At least one restart is required, got {self.restarts}.")
        if self.max_iter < 0:
            raise ValueError(f"Iteration limit must be non-negative, got {self.max_iter}.")

    def to_dict(self):
        return {
            "max_iter": self.max_iter,
            "restarts": self.restarts,
            "seed": self.seed,
            "objective": self.objective.value,
            "convergence_tol": self.convergence_tol,
            "gtol": self.gtol,
            "memory": self.memory,
            "n_jobs": self.n_jobs,
            "warm_start": self.init is not None,
            "jitter": self.jitter,
        }


@dataclass
class OptimizationReport:
    """Outcome of a multi-restart optimization."""

    best_fidelity: float
    iterations: int
    restarts_used: int
    fidelity_history: np.ndarray
    seed: int
    objective: Objective
    restart_fidelities: np.ndarray = field(default_factory=lambda: np.empty(0))
    best_restart: int = 0
    improved: bool = True
    warnings: list = field(default_factory=list)
    runtime: float = float("nan")

    def to_dict(self):
        return {
            "best_fidelity": self.best_fidelity,
            "iterations": self.iterations,
            "restarts_used": self.restarts_used,
            "best_restart": self.best_restart,
            "seed": self.seed,
            "objective": Objective(self.objective).value,
            "improved": self.improved,
            "warnings": list(self.warnings),
            "restart_fidelities": np.asarray(self.restart_fidelities).tolist(),
            "fidelity_history": np.asarray(self.fidelity_history).tolist(),
        }

    def summary(self):
        series = pd.Series(
            {
                "objective": Objective(self.objective).value,
                "best fidelity": self.best_fidelity,
                "best restart": self.best_restart,
                "iterations": self.iterations,
                "restarts": self.restarts_used,
                "runtime (s)": self.runtime,
            },
            name="value",
        )
        str_ = f"OptimizationReport\n{series.to_markdown(tablefmt='github', floatfmt='.6f')}"
        if self.warnings:
            str_ += "\n\n" + "\n".join(f"- {w}" for w in self.warnings)
        return str_


def _step_spectra(problem, u):
    H = problem.step_hamiltonians(u)
    try:
        w, v = np.linalg.eigh(H)
    except np.linalg.LinAlgError as err:
        raise NumericalError("Step Hamiltonian eigensolver failed.", {"dim": problem.dim}) from err
    phases = np.exp(-1j * w * problem.tau)
    steps = np.einsum("jab,jb,jcb->jac", v, phases, v.conj())
    return w, v, phases, steps


def _check_shape(problem, u):
    u = np.asarray(u, dtype=float)
    if u.shape != (problem.R, problem.N):
        raise ValueError(f"Control array has shape {u.shape}, expected {(problem.R, problem.N)}.")
    return u


def _check_target(problem, target):
    W = _as_array(target)
    if W.shape != (problem.dim, problem.dim):
        raise ValueError(f"Target has shape {W.shape}, problem dimension is {problem.dim}.")
    return W


def propagate(problem, seq):
    """
    One-period propagator ``U_N ... U_2 U_1`` of a control sequence.

    Parameters
    ----------
    problem : ControlProblem
    seq : ControlSequence or array_like

    Returns
    -------
    UnitaryOperator

    """
    u = _check_shape(problem, getattr(seq, "u", seq))
    *_, steps = _step_spectra(problem, u)
    U = np.eye(problem.dim, dtype=complex)
    for U_j in steps:
        U = U_j @ U
    return UnitaryOperator(U, problem.sector)


def _divided_differences(w, phases, tau):
    """Matrix of ``(e^{-i l_a tau} - e^{-i l_b tau}) / (l_a - l_b)`` per step."""
    dw = w[:, :, None] - w[:, None, :]
    dp = phases[:, :, None] - phases[:, None, :]
    tol = DEGENERACY_RTOL * max(1.0, np.abs(w).max(initial=0.0))
    degenerate = np.abs(dw) < tol
    limit = np.broadcast_to(-1j * tau * phases[:, :, None], dw.shape)
    return np.where(degenerate, limit, dp / np.where(degenerate, 1.0, dw))


def _fidelity_and_gradient(problem, u, W, objective):
    w, v, phases, steps = _step_spectra(problem, u)
    N, D = problem.N, problem.dim

    fwd = np.empty((N + 1, D, D), dtype=complex)
    bwd = np.empty((N + 1, D, D), dtype=complex)
    fwd[0] = bwd[N] = np.eye(D)
    for j in range(N):
        fwd[j + 1] = steps[j] @ fwd[j]
    for j in range(N - 1, -1, -1):
        bwd[j] = bwd[j + 1] @ steps[j]

    z = np.vdot(W, fwd[N])

    # d tr(W^dag U) / d u_kj = tr(P_j dU_j), all in the eigenbasis of step j
    P = fwd[:N] @ W.conj().T @ bwd[1:]
    Q = v.conj().transpose(0, 2, 1) @ P @ v
    C = np.einsum("jba,kbc,jcd->kjad", v.conj(), problem.generators, v)
    gamma = _divided_differences(w, phases, problem.tau)
    g = np.einsum("jba,kjab,jab->kj", Q, C, gamma)

    flags = []
    if Objective(objective) is Objective.REAL:
        return z.real / D, g.real / D, flags

    if np.abs(z) < 1e-15 * D:
        flags.append("zero trace: AbsTrace gradient undefined, zero gradient returned")
        warn("Trace overlap vanishes; returning zero AbsTrace gradient.", FloquetWarning)
        return 0.0, np.zeros_like(g.real), flags
    return np.abs(z) / D, (z.conj() * g).real / (np.abs(z) * D), flags


def fidelity_and_gradient(problem, seq, target, objective=Objective.ABS):
    """
    Trace fidelity of a control sequence and its exact gradient.

    Parameters
    ----------
    problem : ControlProblem
    seq : ControlSequence or array_like
    target : UnitaryOperator or array_like
        Target one-period propagator.
    objective : Objective or str, optional
        ``"abs"`` for ``|tr(W^dag U)|/D``, ``"real"`` for ``Re tr(W^dag U)/D``.

    Returns
    -------
    float
        Fidelity.
    numpy.ndarray
        Gradient with shape (R, N).

    """
    u = _check_shape(problem, getattr(seq, "u", seq))
    W = _check_target(problem, target)
    F, grad, _ = _fidelity_and_gradient(problem, u, W, objective)
    return float(F), grad


def _run_single(args):
    """Single bounded quasi-Newton ascent; module-level so worker processes can unpickle it."""
    problem, W, options, x0 = args
    shape = (problem.R, problem.N)
    cache = {}
    flags = set()

    def fun(x):
        F, grad, flags_ = _fidelity_and_gradient(problem, x.reshape(shape), W, options.objective)
        cache[x.tobytes()] = F
        flags.update(flags_)
        return -F, -grad.ravel()

    f0 = -fun(x0)[0]
    history = [f0]

    def callback(xk):
        key = xk.tobytes()
        history.append(cache[key] if key in cache else -fun(xk)[0])

    bounds = np.repeat(problem.bounds, problem.N, axis=0)
    res = minimize(
        fun,
        x0,
        jac=True,
        method="L-BFGS-B",
        bounds=bounds,
        callback=callback,
        options=dict(
            maxcor=options.memory,
            maxiter=options.max_iter,
            ftol=options.convergence_tol,
            gtol=options.gtol,
        ),
    )
    return {
        "x": res.x.reshape(shape),
        "fidelity": float(-res.fun),
        "initial": float(f0),
        "history": np.maximum.accumulate(history),
        "nit": int(res.nit),
        "message": str(res.message),
        "flags": sorted(flags),
    }


def _initial_points(problem, options, seeds):
    lo, hi = problem.bounds.T
    points = []
    for r, seed in enumerate(seeds):
        rng = np.random.default_rng(seed)
        if r == 0 and options.init is not None:
            x0 = _check_shape(problem, options.init)
            if options.jitter > 0:
                x0 = x0 + options.jitter * (hi - lo)[:, None] * rng.normal(size=x0.shape)
            x0 = problem.clip(x0)
        else:
            x0 = problem.random_sequence(rng).u
        points.append(x0.ravel())
    return points


def optimize(problem, target, options=None, verbose=0, **overrides):
    """
    Maximize the trace fidelity to a target propagator with bounded L-BFGS restarts.

    Parameters
    ----------
    problem : ControlProblem
    target : UnitaryOperator or array_like
        Target one-period propagator.
    options : GrapeOptions, optional
        Optimizer settings; keyword `overrides` replace individual fields.
    verbose : int, optional
        Progress bar over restarts.

    Returns
    -------
    ControlSequence
        Best sequence found.
    OptimizationReport

    """
    from floquet_engineering.util import timed

    if options is None:
        options = GrapeOptions()
    if overrides:
        options = replace(options, **overrides)
    W = _check_target(problem, target)

    seed_seq = np.random.SeedSequence(options.seed)
    seeds = seed_seq.spawn(options.restarts)
    tasks = [(problem, W, options, x0) for x0 in _initial_points(problem, options, seeds)]

    def _run_all():
        if options.n_jobs > 1 and options.restarts > 1:
            with Pool(min(options.n_jobs, options.restarts)) as pool:
                return pool.map(_run_single, tasks)
        return [_run_single(task) for task in tqdm(tasks, desc="Restarts", disable=not verbose)]

    results, runtime = timed(_run_all)()

    fidelities = np.array([res["fidelity"] for res in results])
    best = int(np.argmax(fidelities))  # first maximum, i.e. lowest restart index
    for r, res in enumerate(results):
        logger.debug(
            f"Restart {r}: F = {res['fidelity']:.10f} (initial {res['initial']:.6f}, "
            f"{res['nit']} iterations, {res['message']})"
        )

    warnings = sorted({flag for res in results for flag in res["flags"]})
    improved = any(res["fidelity"] > res["initial"] for res in results)
    if not improved:
        msg = "No restart improved on its initial fidelity; returning best found."
        warnings.append(msg)
        warn(msg, FloquetWarning)

    report = OptimizationReport(
        best_fidelity=float(fidelities[best]),
        iterations=results[best]["nit"],
        restarts_used=len(results),
        fidelity_history=results[best]["history"],
        seed=int(seed_seq.entropy),
        objective=options.objective,
        restart_fidelities=fidelities,
        best_restart=best,
        improved=improved,
        warnings=warnings,
        runtime=runtime,
    )
    logger.log(logging.INFO if verbose else logging.DEBUG, report.summary())
    return ControlSequence(results[best]["x"], problem.names), report
