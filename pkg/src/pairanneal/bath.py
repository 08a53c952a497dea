"""Ohmic bath rates and the system side of the common-bath coupling."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import _kernels
from .errors import ConfigError
from .model import Driver, n_qubits
from .operators import pauli_on

Couplings = Union[float, tuple[float, ...]]
AXES = ("z", "x")


@dataclass(frozen=True)
class BathConfig:
    """Bath temperature, Ohmic strength and per-site couplings.

    ``gz``/``gx`` are either one uniform value or one value per register site.
    Units: beta in ns, eta in ns^2, omega_c and couplings in rad/ns.
    """

    beta: float = 1.0 / 1.57
    eta: float = 0.2
    omega_c: float = 8.0 * math.pi
    gz: Couplings = 0.0
    gx: Couplings = 0.0

    def __post_init__(self) -> None:
        for name in ("beta", "eta", "omega_c"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ConfigError(f"bath.{name} must be finite and positive, got {v!r}")
        for name in ("gz", "gx"):
            v = getattr(self, name)
            if isinstance(v, (list, tuple)):
                v = tuple(float(x) for x in v)
                object.__setattr__(self, name, v)
                values = v
            else:
                object.__setattr__(self, name, float(v))
                values = (float(v),)
            if not all(math.isfinite(x) for x in values):
                raise ConfigError(f"bath.{name} must be finite")

    def couplings(self, axis: str, size: int) -> np.ndarray:
        g = self.gz if axis == "z" else self.gx
        if axis not in AXES:
            raise ConfigError(f"unknown coupling axis {axis!r}")
        if isinstance(g, tuple):
            if len(g) != size:
                raise ConfigError(f"g{axis} has {len(g)} entries, register has {size} sites")
            return np.array(g)
        return np.full(size, g)


def gamma(omega, bath: BathConfig):
    """Ohmic rate with detailed balance; the continuous limit eta/beta at omega = 0."""
    if np.ndim(omega) == 0:
        return _kernels.ohmic_rate(float(omega), bath.beta, bath.eta, bath.omega_c)
    w = np.asarray(omega, dtype=float)
    return np.array([_kernels.ohmic_rate(x, bath.beta, bath.eta, bath.omega_c)
                     for x in w.ravel()]).reshape(w.shape)


def collective_coupling(axis: str, bath: BathConfig, driver: Driver, n_vars: int) -> np.ndarray:
    """``sum_i g_i^axis sigma_i^axis`` over the whole register."""
    nq = n_qubits(driver, n_vars)
    g = bath.couplings(axis, nq)
    out = np.zeros((2**nq, 2**nq), dtype=complex)
    for site, gi in enumerate(g, start=1):
        if gi != 0.0:
            out += gi * pauli_on(site, axis, nq)
    return out


def coupling_stack(bath: BathConfig, driver: Driver, n_vars: int) -> tuple[tuple[str, ...], np.ndarray]:
    """Nonzero collective operators stacked for the integrator, with their axis names."""
    nq = n_qubits(driver, n_vars)
    axes, ops = [], []
    for axis in AXES:
        if np.any(bath.couplings(axis, nq) != 0.0):
            axes.append(axis)
            ops.append(collective_coupling(axis, bath, driver, n_vars))
    d = 2**nq
    stack = np.array(ops, dtype=complex) if ops else np.zeros((0, d, d), dtype=complex)
    return tuple(axes), np.ascontiguousarray(stack)


def reduced_longitudinal(bath: BathConfig, n_vars: int) -> np.ndarray:
    """Effective physical-qubit couplings ``g_{2i} - g_{2i-1}`` seen in sector all-ones."""
    g = bath.couplings("z", 2 * n_vars)
    return g[1::2] - g[0::2]
