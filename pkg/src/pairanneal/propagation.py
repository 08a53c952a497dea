"""Fixed-step RK4 for state vectors and density matrices, with monitors.

Nothing is renormalized or re-symmetrized during integration: drift shows up
in the monitors and aborts the run once it exceeds the hard limits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _kernels
from .bath import BathConfig
from .errors import ConfigError, EigenSolverError, NumericalAbort
from .master import OpenSystem, open_system
from .model import AnnealingSystem, AnnealSchedule, Driver, ProblemInstance, annealing_system
from .operators import DEFAULT_GAP_TOL, JACOBI_MAX_SWEEPS, JACOBI_REL_TOL

DEFAULT_DT = 0.01
DEFAULT_SNAPSHOTS = 201
NORM_ABORT = 1e-5
TRACE_ABORT = 1e-5
NEG_EIG_ABORT = -1e-5


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    dt: float
    monitors: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def is_open(self) -> bool:
        return self.states.ndim == 3

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def probabilities(self) -> np.ndarray:
        """Computational-basis populations at each snapshot, shape (n_snapshots, dim)."""
        if self.is_open:
            return np.real(np.einsum("nii->ni", self.states))
        return np.abs(self.states) ** 2

    def summary(self) -> dict[str, float]:
        out = {}
        for key, vals in self.monitors.items():
            out[f"{key}_max" if key != "min_eig" else "min_eig_min"] = (
                float(np.min(vals)) if key == "min_eig" else float(np.max(vals)))
        return out


def snapshot_grid(T: float, dt: float, n_snapshots: int) -> tuple[np.ndarray, int, float]:
    """Uniform snapshot times plus the RK4 step count per interval.

    The step is shrunk, never enlarged, so that it divides each interval.
    """
    if not dt > 0:
        raise ConfigError("dt must be positive")
    if n_snapshots < 2:
        raise ConfigError("need at least two snapshots")
    times = np.linspace(0.0, T, n_snapshots)
    interval = T / (n_snapshots - 1)
    steps = max(1, math.ceil(interval / dt - 1e-9))
    return times, steps, interval / steps


def _open_monitors(rho: np.ndarray) -> tuple[float, float, float]:
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    trace_dev = abs(complex(np.trace(rho)) - 1.0)
    min_eig = float(np.min(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))))
    return trace_dev, min_eig, herm


def integrate_open_system(rho0: np.ndarray, osys: OpenSystem, dt: float = DEFAULT_DT,
                          n_snapshots: int = DEFAULT_SNAPSHOTS) -> Trajectory:
    sched = osys.schedule
    times, steps, dt_eff = snapshot_grid(sched.T, dt, n_snapshots)
    rho = np.ascontiguousarray(rho0, dtype=complex)
    if rho.shape != (osys.dim, osys.dim):
        raise ConfigError(f"initial state shape {rho.shape} does not match dim {osys.dim}")
    states = np.empty((n_snapshots, osys.dim, osys.dim), dtype=complex)
    mon = np.empty((n_snapshots, 3))
    states[0] = rho
    mon[0] = _open_monitors(rho)
    drive, problem = osys.system.drive, osys.system.problem
    for k in range(1, n_snapshots):
        rho, ok = _kernels.rk4_open(
            rho, float(times[k - 1]), dt_eff, steps, drive, problem, sched.code,
            float(sched.a), float(sched.T), osys.couplings, float(osys.gap_tol),
            osys.bath.beta, osys.bath.eta, osys.bath.omega_c,
            JACOBI_REL_TOL, JACOBI_MAX_SWEEPS)
        if not ok:
            raise EigenSolverError(f"eigensolver failed between t={times[k-1]:g} and {times[k]:g}")
        states[k] = rho
        mon[k] = _open_monitors(rho)
        trace_dev, min_eig, _ = mon[k]
        if not (trace_dev <= TRACE_ABORT and min_eig >= NEG_EIG_ABORT):
            raise NumericalAbort(
                f"open run left tolerance at t={times[k]:g}: |Tr rho - 1|={trace_dev:.3g}, "
                f"min eig={min_eig:.3g}; try a smaller dt than {dt_eff:g}")
    return Trajectory(times, states, dt_eff, {
        "trace_dev": mon[:, 0], "min_eig": mon[:, 1], "herm_dev": mon[:, 2]})


def integrate_closed_system(psi0: np.ndarray, system: AnnealingSystem, dt: float = DEFAULT_DT,
                            n_snapshots: int = DEFAULT_SNAPSHOTS) -> Trajectory:
    sched = system.schedule
    times, steps, dt_eff = snapshot_grid(sched.T, dt, n_snapshots)
    psi = np.ascontiguousarray(psi0, dtype=complex)
    if psi.shape != (system.dim,):
        raise ConfigError(f"initial state shape {psi.shape} does not match dim {system.dim}")
    if abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise ConfigError("initial state must have unit norm")
    states = np.empty((n_snapshots, system.dim), dtype=complex)
    norm_dev = np.empty(n_snapshots)
    states[0] = psi
    norm_dev[0] = abs(np.linalg.norm(psi) - 1.0)
    for k in range(1, n_snapshots):
        psi = _kernels.rk4_closed(psi, float(times[k - 1]), dt_eff, steps, system.drive,
                                  system.problem, sched.code, float(sched.a), float(sched.T))
        states[k] = psi
        norm_dev[k] = abs(np.linalg.norm(psi) - 1.0)
        if not norm_dev[k] <= NORM_ABORT:
            raise NumericalAbort(
                f"norm drift {norm_dev[k]:.3g} at t={times[k]:g}; reduce dt below {dt_eff:g}")
    return Trajectory(times, states, dt_eff, {"norm_dev": norm_dev})


def integrate_closed(psi0: np.ndarray, sched: AnnealSchedule, inst: ProblemInstance,
                     driver: Driver, dt: float = DEFAULT_DT,
                     n_snapshots: int = DEFAULT_SNAPSHOTS) -> Trajectory:
    return integrate_closed_system(psi0, annealing_system(sched, inst, driver), dt, n_snapshots)


def integrate_open(rho0: np.ndarray, sched: AnnealSchedule, inst: ProblemInstance,
                   driver: Driver, bath: BathConfig, dt: float = DEFAULT_DT,
                   gap_tol: float = DEFAULT_GAP_TOL,
                   n_snapshots: int = DEFAULT_SNAPSHOTS) -> Trajectory:
    return integrate_open_system(rho0, open_system(inst, sched, driver, bath, gap_tol),
                                 dt, n_snapshots)


@dataclass(frozen=True)
class Convergence:
    """Population changes when dt is halved: at t = T and over every snapshot."""

    final: float
    trajectory: float


def convergence_check(run: Callable[[float], Trajectory], dt: float) -> Convergence:
    coarse = run(dt).probabilities()
    fine = run(dt / 2).probabilities()
    if coarse.shape != fine.shape:
        raise ConfigError("runs at dt and dt/2 produced different snapshot grids")
    diff = np.abs(coarse - fine)
    return Convergence(float(np.max(diff[-1])), float(np.max(diff)))
