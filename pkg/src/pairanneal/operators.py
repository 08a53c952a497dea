"""Dense operator construction and self-adjoint eigensystems.

Qubit 1 is the leftmost tensor factor, i.e. the most significant bit of a
computational-basis index.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from . import _kernels
from .errors import ConfigError, EigenSolverError

MAX_QUBITS = 12
MAX_DIM = 2**MAX_QUBITS
DEFAULT_GAP_TOL = 1e-8
JACOBI_REL_TOL = 1e-13
JACOBI_MAX_SWEEPS = 60

I2 = np.eye(2, dtype=complex)
PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def kron(*factors: np.ndarray) -> np.ndarray:
    """Kronecker product of one or more square operators."""
    if not factors:
        raise ValueError("kron needs at least one factor")
    dim = int(np.prod([f.shape[0] for f in factors]))
    if dim > MAX_DIM:
        raise ConfigError(f"kron result dimension {dim} exceeds cap {MAX_DIM}")
    return reduce(np.kron, (np.asarray(f, dtype=complex) for f in factors))


def pauli_on(site: int, axis: str, n_qubits: int) -> np.ndarray:
    if axis not in PAULI:
        raise ConfigError(f"unknown Pauli axis {axis!r}")
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ConfigError(f"n_qubits={n_qubits} outside 1..{MAX_QUBITS}")
    if not 1 <= site <= n_qubits:
        raise ConfigError(f"site {site} outside 1..{n_qubits}")
    return kron(*(PAULI[axis] if q == site else I2 for q in range(1, n_qubits + 1)))


def pauli_string(ops: dict[int, str], n_qubits: int) -> np.ndarray:
    """Product of single-site Paulis, e.g. ``{1: "x", 2: "x"}``."""
    for site in ops:
        if not 1 <= site <= n_qubits:
            raise ConfigError(f"site {site} outside 1..{n_qubits}")
    return kron(*(PAULI[ops[q]] if q in ops else I2 for q in range(1, n_qubits + 1)))


def hermiticity_error(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def is_hermitian(m: np.ndarray, tol: float = 1e-10) -> bool:
    return m.ndim == 2 and m.shape[0] == m.shape[1] and hermiticity_error(m) <= tol


@dataclass(frozen=True)
class EigenSystem:
    """Ascending eigenvalues, column eigenvectors and Bohr-frequency bins.

    ``labels[a, b]`` is the bin index of the ordered pair (a, b), whose gap is
    ``values[b] - values[a]``; ``frequencies[k]`` is the representative of bin k.
    """

    values: np.ndarray
    vectors: np.ndarray
    labels: np.ndarray
    frequencies: np.ndarray
    gap_tol: float

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    @property
    def zero_bin(self) -> int:
        return int(self.labels[0, 0])

    def bin_pairs(self, k: int) -> list[tuple[int, int]]:
        a, b = np.nonzero(self.labels == k)
        return list(zip(a.tolist(), b.tolist()))

    @property
    def bins(self) -> list[tuple[float, list[tuple[int, int]]]]:
        return [(float(w), self.bin_pairs(k)) for k, w in enumerate(self.frequencies)]

    def to_eigenbasis(self, m: np.ndarray) -> np.ndarray:
        return self.vectors.conj().T @ m @ self.vectors

    def from_eigenbasis(self, m: np.ndarray) -> np.ndarray:
        return self.vectors @ m @ self.vectors.conj().T

    def reconstruct(self) -> np.ndarray:
        return self.from_eigenbasis(np.diag(self.values).astype(complex))


def _solve(m: np.ndarray, start: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    m = np.ascontiguousarray(m, dtype=complex)
    if start is None:
        start = np.eye(m.shape[0], dtype=complex)
    vals, vecs, ok = _kernels.jacobi_eigh(m, np.ascontiguousarray(start, dtype=complex),
                                          JACOBI_REL_TOL, JACOBI_MAX_SWEEPS)
    if not ok:
        raise EigenSolverError(
            f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps (dim {m.shape[0]})")
    return vals, vecs


def hermitian_eigensystem(m: np.ndarray, gap_tol: float = DEFAULT_GAP_TOL) -> EigenSystem:
    """Full eigendecomposition of a self-adjoint matrix by cyclic Jacobi.

    Gaps ``E_b - E_a`` of all ordered pairs are grouped by single-linkage
    clustering with threshold ``gap_tol``.  Exactly-zero couplings between
    basis states are never rotated, so eigenvectors inherit any block structure
    of ``m`` without round-off leakage between blocks.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ConfigError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] > MAX_DIM:
        raise ConfigError(f"dimension {m.shape[0]} exceeds cap {MAX_DIM}")
    if not is_hermitian(m, 1e-10):
        raise ConfigError(f"matrix is not self-adjoint (deviation {hermiticity_error(m):.3g})")
    if gap_tol <= 0:
        raise ConfigError("gap_tol must be positive")
    vals, vecs = _solve(m)
    labels, reps = _kernels.gap_bins(vals, float(gap_tol))
    return EigenSystem(vals, vecs, labels, reps, float(gap_tol))


def eigvalsh(m: np.ndarray) -> np.ndarray:
    return hermitian_eigensystem(m).values


def basis_bits(index: int, n_qubits: int) -> str:
    return format(index, f"0{n_qubits}b")
