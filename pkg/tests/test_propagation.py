from __future__ import annotations

import math

import numpy as np
import pytest

from pairanneal.bath import BathConfig, gamma
from pairanneal.errors import ConfigError, NumericalAbort
from pairanneal.master import OpenSystem, open_system
from pairanneal.model import (Ancilla, AnnealingSystem, AnnealSchedule, Conventional,
                              annealing_system, initial_state)
from pairanneal.operators import PAULI
from pairanneal.propagation import (convergence_check, integrate_closed, integrate_closed_system,
                                    integrate_open, integrate_open_system, snapshot_grid)

X, Z = PAULI["x"], PAULI["z"]
PLUS = np.array([1, 1], dtype=complex) / math.sqrt(2)


def constant_system(h: np.ndarray, T: float) -> AnnealingSystem:
    """A(t) + B(t) = a for the standard schedule, so drive = problem = h/a is constant."""
    sched = AnnealSchedule(a=10.0, T=T)
    return AnnealingSystem(h / 10.0, h / 10.0, sched)


def test_larmor_precession():
    system = constant_system(Z.copy(), math.pi / 2)
    traj = integrate_closed_system(PLUS, system, dt=1e-3, n_snapshots=11)
    for t, psi in zip(traj.times, traj.states):
        assert abs(np.vdot(psi, X @ psi).real - math.cos(2 * t)) < 1e-8
        assert np.allclose(np.abs(psi) ** 2, 0.5, atol=1e-12)


def test_zero_hamiltonian_is_identity():
    traj = integrate_closed_system(PLUS, constant_system(np.zeros((2, 2), complex), 5.0), 0.1, 3)
    assert np.array_equal(traj.final, PLUS)


def test_trajectory_grid():
    traj = integrate_closed_system(PLUS, constant_system(Z.copy(), 2.0), 0.03, 7)
    assert traj.times[0] == 0.0 and traj.times[-1] == 2.0
    assert np.all(np.diff(traj.times) > 0)
    assert traj.dt <= 0.03
    assert traj.probabilities().shape == (7, 2)


def test_snapshot_grid_shrinks_step():
    times, steps, dt = snapshot_grid(1000.0, 0.03, 201)
    assert steps * dt == pytest.approx(5.0)
    assert dt <= 0.03
    with pytest.raises(ConfigError):
        snapshot_grid(1.0, 0.0, 3)
    with pytest.raises(ConfigError):
        snapshot_grid(1.0, 0.1, 1)


def test_closed_rejects_bad_state():
    with pytest.raises(ConfigError):
        integrate_closed_system(2 * PLUS, constant_system(Z.copy(), 1.0), 0.1, 2)
    with pytest.raises(ConfigError):
        integrate_closed_system(np.ones(4) / 2, constant_system(Z.copy(), 1.0), 0.1, 2)


def test_closed_unstable_step_aborts():
    zero = np.array([1, 0], dtype=complex)
    with pytest.raises(NumericalAbort):
        integrate_closed_system(zero, constant_system(50 * X, 10.0), 0.5, 3)


def test_open_unstable_step_aborts(inst):
    with pytest.raises(NumericalAbort):
        integrate_open(np.eye(4, dtype=complex) / 4, AnnealSchedule(T=20.0), inst, Conventional(),
                       BathConfig(gx=0.5), dt=1.0, n_snapshots=3)


def test_open_zero_coupling_matches_closed(inst):
    sched = AnnealSchedule(T=50.0)
    psi0 = initial_state(Ancilla(-0.5), 2)
    closed = integrate_closed(psi0, sched, inst, Ancilla(-0.5), dt=0.01, n_snapshots=11)
    opened = integrate_open(np.outer(psi0, psi0.conj()), sched, inst, Ancilla(-0.5),
                            BathConfig(), dt=0.01, n_snapshots=11)
    for psi, rho in zip(closed.states, opened.states):
        assert np.max(np.abs(np.outer(psi, psi.conj()) - rho)) < 1e-8


def test_pure_dephasing():
    omega, g = 1.1, 0.3
    system = constant_system(0.5 * omega * Z, 20.0)
    bath = BathConfig(gz=g)
    osys = OpenSystem(system, ("z",), np.ascontiguousarray([g * Z]), bath)
    traj = integrate_open_system(np.outer(PLUS, PLUS.conj()), osys, dt=0.01, n_snapshots=21)
    pops = np.real(np.einsum("nii->ni", traj.states))
    assert np.max(np.abs(pops - 0.5)) < 1e-12
    coh = np.abs(traj.states[:, 0, 1])
    assert np.all(np.diff(coh) <= 1e-15)
    expected = 0.5 * np.exp(-2 * g**2 * gamma(0.0, bath) * traj.times)
    assert np.max(np.abs(coh - expected)) < 1e-9


def test_open_monitors_recorded(inst):
    traj = integrate_open(np.eye(4, dtype=complex) / 4, AnnealSchedule(T=10.0), inst,
                          Conventional(), BathConfig(gx=0.1, gz=0.1), dt=0.01, n_snapshots=5)
    assert set(traj.monitors) == {"trace_dev", "min_eig", "herm_dev"}
    assert np.max(traj.monitors["trace_dev"]) < 1e-12
    assert np.max(traj.monitors["herm_dev"]) < 1e-12
    assert np.min(traj.monitors["min_eig"]) > -1e-12


def test_convergence_trivial():
    system = constant_system(np.zeros((2, 2), complex), 1.0)
    rep = convergence_check(lambda h: integrate_closed_system(PLUS, system, h, 5), 0.1)
    assert rep.final == 0.0 and rep.trajectory == 0.0


def test_closed_convergence_reference(sched, inst):
    psi0 = initial_state(Ancilla(-0.5), 2)
    rep = convergence_check(
        lambda h: integrate_closed(psi0, sched, inst, Ancilla(-0.5), dt=h), 0.01)
    assert rep.final < 1e-7
    # mid-anneal interference terms carry the RK4 truncation error: ~3e-6 at dt = 0.01
    assert rep.trajectory < 1e-5


def test_open_convergence_reference(sched, inst):
    psi0 = initial_state(Conventional(), 2)
    rep = convergence_check(
        lambda h: integrate_open(np.outer(psi0, psi0.conj()), sched, inst, Conventional(),
                                 BathConfig(gz=0.1, gx=0.01), dt=h), 0.01)
    assert rep.final < 1e-5
    assert rep.trajectory < 1e-5
