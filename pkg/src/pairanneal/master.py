"""Adiabatic master equation with jump operators from the instantaneous eigenbasis.

For each coupling axis with collective operator ``C = sum_i g_i sigma_i`` and
each Bohr-frequency bin ``w`` the jump operator is

    A_w(t) = sum_{(a, b): E_b - E_a in w} P_a C P_b,

and the generator is

    drho/dt = -i[H, rho] + sum_{axis, w} gamma(w) (A rho A^dag - {A^dag A, rho}/2).

Summing the site-resolved double sum over i, j into one collective operator
per axis is exact (the rate matrix g_i g_j gamma(w) has rank one).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .bath import BathConfig, coupling_stack, reduced_longitudinal
from .errors import ConfigError, EigenSolverError
from .model import (AnnealingSystem, AnnealSchedule, Driver, ProblemInstance,
                    all_ones, annealing_system, block_system)
from .operators import (DEFAULT_GAP_TOL, JACOBI_MAX_SWEEPS, JACOBI_REL_TOL,
                        hermitian_eigensystem, hermiticity_error, pauli_on)


@dataclass(frozen=True)
class LindbladEntry:
    axis: str
    omega: float
    operator: np.ndarray
    rate: float


@dataclass(frozen=True)
class LindbladSet:
    t: float
    entries: list[LindbladEntry]

    def total(self, axis: str) -> np.ndarray:
        ops = [e.operator for e in self.entries if e.axis == axis]
        if not ops:
            raise KeyError(f"no jump operators for axis {axis!r}")
        return np.sum(ops, axis=0)

    def find(self, axis: str, omega: float, tol: float = 1e-9) -> LindbladEntry | None:
        for e in self.entries:
            if e.axis == axis and abs(e.omega - omega) <= tol:
                return e
        return None

    def dissipator(self, rho: np.ndarray) -> np.ndarray:
        out = np.zeros_like(rho, dtype=complex)
        for e in self.entries:
            a = e.operator
            ad = a.conj().T
            out += e.rate * (a @ rho @ ad - 0.5 * (ad @ a @ rho + rho @ ad @ a))
        return out


@dataclass(frozen=True, eq=False)
class OpenSystem:
    """Everything the generator needs: H(t) pieces, collective couplings and the bath."""

    system: AnnealingSystem
    axes: tuple[str, ...]
    couplings: np.ndarray
    bath: BathConfig
    gap_tol: float = DEFAULT_GAP_TOL

    @property
    def dim(self) -> int:
        return self.system.dim

    @property
    def schedule(self) -> AnnealSchedule:
        return self.system.schedule

    def generator(self, t: float, start: np.ndarray | None = None) -> Generator:
        h = np.ascontiguousarray(self.system.at(t))
        if start is None:
            start = np.eye(self.dim, dtype=complex)
        vals, vecs, ok = _kernels.jacobi_eigh(h, start, JACOBI_REL_TOL, JACOBI_MAX_SWEEPS)
        if not ok:
            raise EigenSolverError(f"eigensolver failed at t={t}")
        data = _kernels.build_generator(vals, vecs, self.couplings, self.gap_tol,
                                        self.bath.beta, self.bath.eta, self.bath.omega_c)
        return Generator(t, vals, vecs, *data)

    def apply(self, t: float, rho: np.ndarray) -> np.ndarray:
        return self.generator(t).apply(rho)


@dataclass(frozen=True, eq=False)
class Generator:
    """Generator frozen at one instant, in the kernel's grouped-pair layout."""

    t: float
    values: np.ndarray
    vectors: np.ndarray
    labels: np.ndarray
    frequencies: np.ndarray
    group_keys: np.ndarray
    ptr: np.ndarray
    pair_a: np.ndarray
    pair_b: np.ndarray
    weights: np.ndarray
    kmat: np.ndarray

    def _apply(self, vals: np.ndarray, rho: np.ndarray) -> np.ndarray:
        return _kernels.apply_lab(vals, self.vectors, self.ptr, self.pair_a, self.pair_b,
                                  self.weights, self.kmat,
                                  np.ascontiguousarray(rho, dtype=complex))

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return self._apply(self.values, rho)

    def dissipator(self, rho: np.ndarray) -> np.ndarray:
        return self._apply(np.zeros_like(self.values), rho)


def open_system(inst: ProblemInstance, sched: AnnealSchedule, driver: Driver,
                bath: BathConfig, gap_tol: float = DEFAULT_GAP_TOL) -> OpenSystem:
    axes, stack = coupling_stack(bath, driver, inst.n_vars)
    return OpenSystem(annealing_system(sched, inst, driver), axes, stack, bath, gap_tol)


def reduced_open_system(inst: ProblemInstance, sched: AnnealSchedule, c: float,
                        bath: BathConfig, gap_tol: float = DEFAULT_GAP_TOL) -> OpenSystem:
    """Sector all-ones dynamics on the physical register.

    Only longitudinal noise reduces this way; the effective coupling of
    physical qubit i is ``g_{2i} - g_{2i-1}``.
    """
    n = inst.n_vars
    if np.any(bath.couplings("x", 2 * n) != 0.0):
        raise ConfigError("the sector reduction only covers longitudinal coupling (gx must be 0)")
    delta = reduced_longitudinal(bath, n)
    d = 2**n
    if np.any(delta != 0.0):
        op = sum(dl * pauli_on(i, "z", n) for i, dl in enumerate(delta, start=1))
        axes, stack = ("z",), np.ascontiguousarray(np.array([op], dtype=complex))
    else:
        axes, stack = (), np.zeros((0, d, d), dtype=complex)
    return OpenSystem(block_system(sched, inst, c, all_ones(n)), axes, stack, bath, gap_tol)


def _check_state(rho: np.ndarray) -> None:
    if hermiticity_error(rho) > 1e-10 * max(1.0, float(np.max(np.abs(rho)))):
        raise ConfigError("density matrix is not self-adjoint")
    tr = float(np.real(np.trace(rho)))
    if abs(tr - 1.0) > 1e-6:
        raise ConfigError(f"density matrix trace {tr!r} deviates from 1")


def lindblad_operators(t: float, sched: AnnealSchedule, inst: ProblemInstance, driver: Driver,
                       bath: BathConfig, gap_tol: float = DEFAULT_GAP_TOL) -> LindbladSet:
    """Explicit jump operators ``A_{axis, w}(t)`` with their rates."""
    osys = open_system(inst, sched, driver, bath, gap_tol)
    return lindblad_set(osys, t)


def lindblad_set(osys: OpenSystem, t: float) -> LindbladSet:
    es = hermitian_eigensystem(osys.system.at(t), osys.gap_tol)
    entries = []
    for axis, c_op in zip(osys.axes, osys.couplings):
        ct = es.to_eigenbasis(c_op)
        for k, w in enumerate(es.frequencies):
            mask = es.labels == k
            if not np.any(np.abs(ct[mask]) > _kernels.PRUNE):
                continue
            op = es.from_eigenbasis(np.where(mask, ct, 0.0))
            if np.max(np.abs(op)) < _kernels.PRUNE:
                continue
            entries.append(LindbladEntry(axis, float(w), op,
                                         _kernels.ohmic_rate(float(w), osys.bath.beta,
                                                             osys.bath.eta, osys.bath.omega_c)))
    return LindbladSet(float(t), entries)


def liouvillian_apply(t: float, rho: np.ndarray, sched: AnnealSchedule, inst: ProblemInstance,
                      driver: Driver, bath: BathConfig,
                      gap_tol: float = DEFAULT_GAP_TOL) -> np.ndarray:
    _check_state(rho)
    return open_system(inst, sched, driver, bath, gap_tol).apply(t, rho)


def reduced_liouvillian_apply(t: float, rho: np.ndarray, sched: AnnealSchedule,
                              inst: ProblemInstance, c: float, bath: BathConfig,
                              gap_tol: float = DEFAULT_GAP_TOL) -> np.ndarray:
    if rho.shape[0] != 2**inst.n_vars:
        raise ConfigError("reduced generator acts on the physical register only")
    _check_state(rho)
    return reduced_open_system(inst, sched, c, bath, gap_tol).apply(t, rho)
