"""Annealing Hamiltonians: conventional transverse field and the ancilla-pair driver.

In the ancilla register qubit ``2i-1`` is the ancilla and qubit ``2i`` the
physical partner of problem variable ``i``.  Every ancilla pair carries a
conserved parity ``sz_{2i-1} sz_{2i}``; conjugating by a CNOT on each pair
(control: physical, target: ancilla) turns the Hamiltonian into a direct sum
of ``2**N`` conventional-looking blocks labelled by the ancilla bits ``lam``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Union

import numpy as np

from . import _kernels
from .errors import ConfigError, DegenerateGroundState
from .operators import hermitian_eigensystem, kron, pauli_on, pauli_string

MAX_VARS = 6
SCHEDULE_FORMS = {
    "linear-standard": _kernels.SCHEDULE_STANDARD,
    "linear-paper-literal": _kernels.SCHEDULE_LITERAL,
}

# CNOT on one (ancilla, physical) pair; flips the ancilla when the physical bit is 1.
CNOT_PAIR = np.array(
    [[1, 0, 0, 0],
     [0, 0, 0, 1],
     [0, 0, 1, 0],
     [0, 1, 0, 0]], dtype=complex)


@dataclass(frozen=True)
class ProblemInstance:
    """Ising objective ``sum h_i z_i + sum_{i<j} J_ij z_i z_j`` (1-based keys)."""

    h: tuple[float, ...]
    J: dict[tuple[int, int], float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        h = tuple(float(x) for x in self.h)
        object.__setattr__(self, "h", h)
        n = len(h)
        if not 1 <= n <= MAX_VARS:
            raise ConfigError(f"number of variables must be 1..{MAX_VARS}, got {n}")
        couplings = {}
        for (i, j), v in dict(self.J).items():
            i, j = int(i), int(j)
            if not 1 <= i < j <= n:
                raise ConfigError(f"coupling ({i}, {j}) must satisfy 1 <= i < j <= {n}")
            couplings[(i, j)] = float(v)
        object.__setattr__(self, "J", dict(sorted(couplings.items())))
        if not all(math.isfinite(x) for x in (*h, *couplings.values())):
            raise ConfigError("fields and couplings must be finite")

    @property
    def n_vars(self) -> int:
        return len(self.h)

    def energies(self) -> np.ndarray:
        """Objective over all bitstrings, index order = big-endian bits (bit 0 -> z=+1)."""
        n = self.n_vars
        idx = np.arange(2**n)
        z = 1 - 2 * ((idx[:, None] >> (n - 1 - np.arange(n))[None, :]) & 1)
        e = z @ np.asarray(self.h)
        for (i, j), v in self.J.items():
            e = e + v * z[:, i - 1] * z[:, j - 1]
        return e.astype(float)

    def ground_bitstring(self) -> str:
        e = self.energies()
        order = np.argsort(e, kind="stable")
        if len(e) > 1 and abs(e[order[1]] - e[order[0]]) < 1e-12:
            raise DegenerateGroundState("problem Hamiltonian has a degenerate ground state")
        return format(int(order[0]), f"0{self.n_vars}b")


def reference_instance() -> ProblemInstance:
    """Two-variable benchmark with h = (1, 1/4), J_12 = 1/8; ground state |11>."""
    return ProblemInstance(h=(1.0, 0.25), J={(1, 2): 0.125})


@dataclass(frozen=True)
class AnnealSchedule:
    """Linear interpolation between driver weight A(t) and problem weight B(t).

    ``linear-standard``: A = a(1 - t/T), B = a t/T.
    ``linear-paper-literal``: A = a t/T, B = a - A.  Kept for auditing; it starts
    in the problem Hamiltonian and violates the annealing ordering.
    """

    a: float = 10.0
    T: float = 1000.0
    form: str = "linear-standard"

    def __post_init__(self) -> None:
        if self.form not in SCHEDULE_FORMS:
            raise ConfigError(f"unknown schedule form {self.form!r}")
        if not (self.a > 0 and self.T > 0 and math.isfinite(self.a) and math.isfinite(self.T)):
            raise ConfigError("schedule needs finite a > 0 and T > 0")

    @property
    def code(self) -> int:
        return SCHEDULE_FORMS[self.form]

    def coefficients(self, t: float) -> tuple[float, float]:
        if not -1e-9 * self.T <= t <= self.T * (1 + 1e-9):
            raise ConfigError(f"t={t} outside [0, {self.T}]")
        return _kernels.schedule_ab(self.code, float(self.a), float(self.T), float(t))

    def A(self, t: float) -> float:
        return self.coefficients(t)[0]

    def B(self, t: float) -> float:
        return self.coefficients(t)[1]

    @property
    def ordering_ok(self) -> bool:
        a0, b0 = self.coefficients(0.0)
        a1, b1 = self.coefficients(self.T)
        return a0 > b0 and a1 < b1


@dataclass(frozen=True)
class Conventional:
    kind: str = field(default="conventional", init=False)


@dataclass(frozen=True)
class Ancilla:
    c: float = -0.5
    kind: str = field(default="ancilla", init=False)


Driver = Union[Conventional, Ancilla]


def n_qubits(driver: Driver, n_vars: int) -> int:
    return 2 * n_vars if isinstance(driver, Ancilla) else n_vars


def physical_site(i: int, placement: str) -> int:
    return 2 * i if placement == "ancilla" else i


def problem_hamiltonian(inst: ProblemInstance, placement: str = "conventional") -> np.ndarray:
    if placement not in ("conventional", "ancilla"):
        raise ConfigError(f"unknown placement {placement!r}")
    nq = 2 * inst.n_vars if placement == "ancilla" else inst.n_vars
    diag = np.zeros(2**nq)
    for i, hi in enumerate(inst.h, start=1):
        diag += hi * np.real(np.diag(pauli_on(physical_site(i, placement), "z", nq)))
    for (i, j), v in inst.J.items():
        ops = {physical_site(i, placement): "z", physical_site(j, placement): "z"}
        diag += v * np.real(np.diag(pauli_string(ops, nq)))
    return np.diag(diag).astype(complex)


def driver_hamiltonian(driver: Driver, n_vars: int) -> np.ndarray:
    """Operator multiplying A(t)."""
    if isinstance(driver, Ancilla):
        nq = 2 * n_vars
        out = np.zeros((2**nq, 2**nq), dtype=complex)
        for i in range(1, n_vars + 1):
            out += driver.c * pauli_string({2 * i - 1: "x", 2 * i: "x"}, nq)
            out -= pauli_string({2 * i - 1: "y", 2 * i: "y"}, nq)
        return out
    return -sum(pauli_on(i, "x", n_vars) for i in range(1, n_vars + 1))


@dataclass(frozen=True, eq=False)
class AnnealingSystem:
    """``H(t) = A(t) drive + B(t) problem`` with both operators precomputed."""

    drive: np.ndarray
    problem: np.ndarray
    schedule: AnnealSchedule

    @property
    def dim(self) -> int:
        return self.drive.shape[0]

    def at(self, t: float) -> np.ndarray:
        a, b = self.schedule.coefficients(t)
        return a * self.drive + b * self.problem


def annealing_system(sched: AnnealSchedule, inst: ProblemInstance, driver: Driver) -> AnnealingSystem:
    placement = "ancilla" if isinstance(driver, Ancilla) else "conventional"
    return AnnealingSystem(
        np.ascontiguousarray(driver_hamiltonian(driver, inst.n_vars)),
        np.ascontiguousarray(problem_hamiltonian(inst, placement)),
        sched,
    )


def hamiltonian_at(t: float, sched: AnnealSchedule, inst: ProblemInstance, driver: Driver) -> np.ndarray:
    return annealing_system(sched, inst, driver).at(t)


def build_W(n_vars: int) -> np.ndarray:
    if n_vars < 1:
        raise ConfigError("need at least one pair")
    return kron(*([CNOT_PAIR] * n_vars))


def _check_label(lam, n_vars: int) -> tuple[int, ...]:
    lam = tuple(int(x) for x in lam)
    if len(lam) != n_vars or any(x not in (0, 1) for x in lam):
        raise ConfigError(f"sector label must be {n_vars} bits, got {lam}")
    return lam


def all_ones(n_vars: int) -> tuple[int, ...]:
    return (1,) * n_vars


def sectors(n_vars: int) -> list[tuple[int, ...]]:
    """Sector labels in ascending big-endian integer order."""
    return list(itertools.product((0, 1), repeat=n_vars))


def block_system(sched: AnnealSchedule, inst: ProblemInstance, c: float, lam) -> AnnealingSystem:
    """Sector-``lam`` block on the physical register, re-indexed to qubits 1..N."""
    n = inst.n_vars
    lam = _check_label(lam, n)
    drive = sum((c + 1 - 2 * lam[i - 1]) * pauli_on(i, "x", n) for i in range(1, n + 1))
    return AnnealingSystem(
        np.ascontiguousarray(drive, dtype=complex),
        np.ascontiguousarray(problem_hamiltonian(inst, "conventional")),
        sched,
    )


def block_hamiltonian(t: float, sched: AnnealSchedule, inst: ProblemInstance, c: float, lam) -> np.ndarray:
    return block_system(sched, inst, c, lam).at(t)


def interleaved_to_blocked(n_vars: int) -> np.ndarray:
    """Index permutation taking the interleaved register (a1 p1 a2 p2 ...) to
    the ancilla-first ordering (a1 a2 ... p1 p2 ...)."""
    nq = 2 * n_vars
    perm = np.empty(2**nq, dtype=int)
    for idx in range(2**nq):
        bits = format(idx, f"0{nq}b")
        perm[int(bits[0::2] + bits[1::2], 2)] = idx
    return perm


def assemble_block_diagonal(t: float, sched: AnnealSchedule, inst: ProblemInstance, c: float) -> np.ndarray:
    """Direct sum of all sector blocks, ordered by ``lam`` as a binary integer.

    Equals ``W^dag H(t) W`` once the latter is reordered with
    :func:`interleaved_to_blocked`.
    """
    n = inst.n_vars
    d = 2**n
    out = np.zeros((d * d, d * d), dtype=complex)
    for k, lam in enumerate(sectors(n)):
        out[k * d:(k + 1) * d, k * d:(k + 1) * d] = block_hamiltonian(t, sched, inst, c, lam)
    return out


def to_sector_frame(op: np.ndarray, n_vars: int) -> np.ndarray:
    """``W^dag op W`` reordered ancilla-first, i.e. in the block layout."""
    w = build_W(n_vars)
    perm = interleaved_to_blocked(n_vars)
    m = w.conj().T @ op @ w
    return m[np.ix_(perm, perm)]


def sector_indices(n_vars: int, lam) -> np.ndarray:
    """Computational-basis indices (interleaved register) spanning sector ``lam``.

    Sector ``lam`` is where every pair parity ``sz sz`` equals ``1 - 2 lam_i``.
    """
    lam = _check_label(lam, n_vars)
    nq = 2 * n_vars
    keep = []
    for idx in range(2**nq):
        bits = format(idx, f"0{nq}b")
        if all(int(bits[2 * i]) ^ int(bits[2 * i + 1]) == lam[i] for i in range(n_vars)):
            keep.append(idx)
    return np.array(keep, dtype=int)


def sector_projector(n_vars: int, lam) -> np.ndarray:
    d = 4**n_vars
    p = np.zeros((d, d), dtype=complex)
    idx = sector_indices(n_vars, lam)
    p[idx, idx] = 1.0
    return p


def initial_state(driver: Driver, n_vars: int) -> np.ndarray:
    """Ground state of H(0) under the standard schedule.

    Conventional: |+>^N.  Ancilla: the product of (|01> + |10>)/sqrt(2) pairs,
    which is the ground state only for c < 0.
    """
    if isinstance(driver, Ancilla):
        if not driver.c < 0:
            raise DegenerateGroundState(
                f"ancilla driver needs c < 0 for the pair singlet-like start, got c={driver.c}")
        pair = np.array([0, 1, 1, 0], dtype=complex) / math.sqrt(2)
        return reduce(np.kron, [pair] * n_vars)
    return np.full(2**n_vars, 2 ** (-n_vars / 2), dtype=complex)


def ground_state(h: np.ndarray, tol: float = 1e-9) -> tuple[np.ndarray, float, float]:
    """Lowest eigenvector, its energy and the gap to the next level; refuses degeneracy."""
    es = hermitian_eigensystem(h)
    gap = float(es.values[1] - es.values[0]) if es.dim > 1 else math.inf
    if gap <= tol * max(1.0, float(np.max(np.abs(es.values)))):
        raise DegenerateGroundState(f"ground state is degenerate (gap {gap:.3g})")
    return es.vectors[:, 0].copy(), float(es.values[0]), gap


def physical_probabilities(state: np.ndarray, n_vars: int) -> np.ndarray:
    """Probability of each physical bitstring (big-endian over variables 1..N).

    Accepts a state vector or density matrix on either the ancilla register
    (2N qubits) or the conventional one (N qubits).
    """
    state = np.asarray(state)
    diag = np.abs(state) ** 2 if state.ndim == 1 else np.real(np.diag(state))
    d = diag.shape[0]
    if d == 2**n_vars:
        return diag.copy()
    if d != 4**n_vars:
        raise ConfigError(f"state dimension {d} matches neither {2**n_vars} nor {4**n_vars}")
    # axes alternate (ancilla_i, physical_i); sum the ancilla ones out
    probs = diag.reshape((2,) * (2 * n_vars)).sum(axis=tuple(range(0, 2 * n_vars, 2)))
    return probs.reshape(-1)


def physical_marginal(rho: np.ndarray, bits: str) -> float:
    """``Tr[rho (I_ancilla x |bits><bits|_physical)]``."""
    if not bits or any(b not in "01" for b in bits):
        raise ConfigError(f"bits must be a nonempty 0/1 string, got {bits!r}")
    tr = float(np.real(np.trace(rho)))
    if abs(tr - 1.0) > 1e-6:
        raise ConfigError(f"density matrix trace {tr!r} deviates from 1")
    return float(physical_probabilities(rho, len(bits))[int(bits, 2)])
