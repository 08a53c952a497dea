from __future__ import annotations

import numpy as np
import pytest

from pairanneal.bath import BathConfig
from pairanneal.model import (Ancilla, AnnealSchedule, Conventional, ProblemInstance,
                              annealing_system, hamiltonian_at, initial_state)
from pairanneal.operators import pauli_on
from pairanneal.verify import (check_block_identity, check_cancellation, check_constants_of_motion,
                               check_initial_state, check_rates, check_spectrum_embedding, check_W,
                               oracle_propagate_closed, parity_commutator, rk4_order_exponent,
                               run_all)


def test_constants_of_motion(sched, inst):
    assert check_constants_of_motion([0.0, sched.T / 2, sched.T], sched, inst, -0.5) < 1e-12


def test_constants_of_motion_trivial_instance(sched):
    assert check_constants_of_motion([0.0, 500.0], sched, ProblemInstance(h=(0.0,)), -0.5) < 1e-14


def test_broken_driver_is_caught(sched, inst):
    """A lone transverse term on an ancilla breaks the pair parity."""
    h = hamiltonian_at(300.0, sched, inst, Ancilla(-0.5))
    broken = h + sched.A(300.0) * (-0.5) * pauli_on(1, "x", 4)
    assert parity_commutator(broken, 2) > 1.0


def test_block_identity(sched, inst):
    assert check_block_identity(np.linspace(0, sched.T, 5), sched, inst, -1.3) < 1e-12


def test_spectrum_embedding(sched, inst):
    times = np.linspace(0, sched.T, 11)
    assert check_spectrum_embedding(times, sched, inst, -0.5) < 1e-9


def test_spectrum_embedding_random_single_variable(sched):
    rng = np.random.default_rng(3)
    inst = ProblemInstance(h=(float(rng.normal()),))
    assert check_spectrum_embedding(np.linspace(0, sched.T, 11), sched, inst, -0.8) < 1e-10


def test_end_spectrum_replicates_problem(sched, inst):
    vals = np.linalg.eigvalsh(hamiltonian_at(sched.T, sched, inst, Ancilla(-0.5)))
    expected = np.sort(np.repeat(sched.B(sched.T) * inst.energies(), 4))
    assert np.allclose(vals, expected, atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_W_checks_exact(n):
    assert all(v < 1e-14 for v in check_W(n).values())


def test_cancellation_with_dissipator(sched, inst):
    rep = check_cancellation(BathConfig(gz=0.1), 2, -0.5, sched, inst, times=[0.0, 500.0, sched.T])
    assert rep.residual < 1e-12
    assert rep.dissipator_residual < 1e-12


def test_asymmetric_dissipator_nonzero(sched, inst):
    rep = check_cancellation(BathConfig(gz=(0.1, 0.12, 0.1, 0.12)), 2, -0.5, sched, inst,
                             times=[500.0])
    assert rep.dissipator_residual > 1e-6


def test_initial_state_check(sched, inst):
    assert check_initial_state(Ancilla(-0.5), sched, inst)["pass"]
    assert check_initial_state(Conventional(), sched, inst)["pass"]
    assert not check_initial_state(Ancilla(0.5), sched, inst)["pass"]
    literal = AnnealSchedule(form="linear-paper-literal")
    assert not check_initial_state(Ancilla(-0.5), literal, inst)["pass"]


def test_rate_checks():
    assert all(v < 1e-12 for v in check_rates(BathConfig()).values())


def test_oracle_exact_for_constant_hamiltonian():
    z = pauli_on(1, "z", 1)
    sched = AnnealSchedule(a=10.0, T=2.0)
    from pairanneal.model import AnnealingSystem
    system = AnnealingSystem(z / 10, z / 10, sched)
    psi0 = np.array([1, 1], dtype=complex) / np.sqrt(2)
    exact = np.exp(-1j * np.array([1, -1]) * 2.0) * psi0
    for m in (1, 3):
        assert np.allclose(oracle_propagate_closed(psi0, system, m), exact, atol=1e-14)


def test_oracle_converges_at_least_first_order(inst):
    system = annealing_system(AnnealSchedule(T=20.0), inst, Ancilla(-0.5))
    psi0 = initial_state(Ancilla(-0.5), 2)
    ref = oracle_propagate_closed(psi0, system, 64000)
    errs = [np.linalg.norm(oracle_propagate_closed(psi0, system, m) - ref) for m in (1000, 2000)]
    assert errs[0] / errs[1] > 1.8


def test_rk4_order():
    order, errs = rk4_order_exponent()
    assert 3.5 <= order <= 4.5
    assert errs == sorted(errs, reverse=True)


def test_run_all_default(sched, inst):
    report = run_all(sched, inst, -0.5)
    assert report["pass"], report


def test_run_all_flags_literal_schedule(inst):
    report = run_all(AnnealSchedule(form="linear-paper-literal"), inst, -0.5)
    assert not report["pass"]
    assert not report["checks"]["schedule_ordering"]["pass"]
