from __future__ import annotations

import math

import numpy as np
import pytest

from pairanneal.errors import ConfigError, DegenerateGroundState
from pairanneal.model import (CNOT_PAIR, Ancilla, AnnealSchedule, Conventional, ProblemInstance,
                              all_ones, annealing_system, assemble_block_diagonal,
                              block_hamiltonian, build_W, ground_state, hamiltonian_at,
                              initial_state, physical_marginal, physical_probabilities,
                              problem_hamiltonian, sector_indices, sector_projector, sectors,
                              to_sector_frame)
from pairanneal.operators import PAULI, kron, pauli_string
from pairanneal.propagation import integrate_closed
from pairanneal.verify import parity_commutator

X, Y, Z, I2 = PAULI["x"], PAULI["y"], PAULI["z"], np.eye(2)
REFERENCE_ENERGIES = [1.375, 0.625, -0.875, -1.125]


def test_reference_energies(inst):
    assert np.allclose(inst.energies(), REFERENCE_ENERGIES)
    assert inst.ground_bitstring() == "11"


def test_problem_conventional(inst):
    assert np.allclose(np.diag(problem_hamiltonian(inst)).real, REFERENCE_ENERGIES)


def test_problem_ancilla_placement(inst):
    diag = np.diag(problem_hamiltonian(inst, "ancilla")).real
    values, counts = np.unique(np.round(diag, 12), return_counts=True)
    assert sorted(values) == sorted(REFERENCE_ENERGIES)
    assert set(counts) == {4}


def test_zero_instance_is_zero():
    assert not np.any(problem_hamiltonian(ProblemInstance(h=(0.0, 0.0))))


@pytest.mark.parametrize("bad", [
    dict(h=()), dict(h=(1.0,) * 7), dict(h=(1.0, 2.0), J={(1, 1): 1.0}),
    dict(h=(1.0, 2.0), J={(2, 1): 1.0}), dict(h=(math.nan,)), dict(h=(1.0, 1.0), J={(1, 3): 1.0}),
])
def test_instance_validation(bad):
    with pytest.raises(ConfigError):
        ProblemInstance(**bad)


def test_degenerate_problem_rejected():
    with pytest.raises(DegenerateGroundState):
        ProblemInstance(h=(0.0, 0.0)).ground_bitstring()


def test_schedules():
    std = AnnealSchedule(a=10.0, T=1000.0)
    assert std.coefficients(0.0) == (10.0, 0.0)
    assert std.coefficients(1000.0) == (0.0, 10.0)
    assert std.coefficients(250.0) == pytest.approx((7.5, 2.5))
    assert std.ordering_ok
    lit = AnnealSchedule(form="linear-paper-literal")
    assert lit.coefficients(0.0) == (0.0, 10.0)
    assert not lit.ordering_ok
    with pytest.raises(ConfigError):
        std.coefficients(1001.0)
    with pytest.raises(ConfigError):
        AnnealSchedule(form="cubic")
    with pytest.raises(ConfigError):
        AnnealSchedule(a=-1.0)


def test_ancilla_start_hamiltonian_n1(sched):
    h = hamiltonian_at(0.0, sched, ProblemInstance(h=(1.0,)), Ancilla(-0.5))
    assert np.allclose(h, 10 * (-0.5 * kron(X, X) - kron(Y, Y)))
    assert np.allclose(np.linalg.eigvalsh(h), [-15, -5, 5, 15])


def test_end_is_problem_only(sched, inst):
    system = annealing_system(sched, inst, Ancilla(-0.5))
    assert np.array_equal(system.at(sched.T), sched.B(sched.T) * system.problem)


@pytest.mark.parametrize("c", [-2.0, -0.5, -0.1])
def test_parities_conserved(sched, inst, c):
    system = annealing_system(sched, inst, Ancilla(c))
    for t in np.linspace(0, sched.T, 7):
        assert parity_commutator(system.at(t), 2) < 1e-12


def test_W_single_pair():
    expected = np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]])
    assert np.array_equal(build_W(1), expected)
    assert np.array_equal(CNOT_PAIR, expected)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_W_involution(n):
    w = build_W(n)
    assert np.array_equal(w @ w, np.eye(4**n))


def test_W_maps_parity_to_ancilla():
    w = build_W(1)
    assert np.array_equal(w.conj().T @ kron(Z, Z) @ w, kron(Z, I2))


def test_block_coefficients(sched, inst):
    t = 300.0
    a = sched.A(t)
    for lam, coef in (((1, 1), -1.5), ((0, 0), 0.5)):
        h = block_hamiltonian(t, sched, inst, -0.5, lam)
        off = h - np.diag(np.diag(h))
        assert np.allclose(off, a * coef * (kron(X, I2) + kron(I2, X)))
    diag = {lam: np.diag(block_hamiltonian(t, sched, inst, -0.5, lam)) for lam in sectors(2)}
    assert all(np.array_equal(d, diag[(0, 0)]) for d in diag.values())


def test_block_label_validation(sched, inst):
    with pytest.raises(ConfigError):
        block_hamiltonian(0.0, sched, inst, -0.5, (1, 2))
    with pytest.raises(ConfigError):
        block_hamiltonian(0.0, sched, inst, -0.5, (1,))


def test_n1_assembly_blocks(sched):
    inst = ProblemInstance(h=(0.7,))
    m = assemble_block_diagonal(400.0, sched, inst, -0.5)
    assert np.array_equal(m[:2, 2:], np.zeros((2, 2)))
    assert np.array_equal(m[:2, :2], block_hamiltonian(400.0, sched, inst, -0.5, (0,)))
    assert np.array_equal(m[2:, 2:], block_hamiltonian(400.0, sched, inst, -0.5, (1,)))


@pytest.mark.parametrize("seed", range(4))
@pytest.mark.parametrize("n", [1, 2])
def test_block_identity_random(sched, n, seed):
    rng = np.random.default_rng(seed)
    inst = ProblemInstance(h=tuple(rng.normal(size=n)),
                           J={(1, 2): float(rng.normal())} if n == 2 else {})
    c = -float(rng.uniform(0.1, 2))
    for t in (0.0, sched.T / 2, sched.T):
        frame = to_sector_frame(hamiltonian_at(t, sched, inst, Ancilla(c)), n)
        assembled = assemble_block_diagonal(t, sched, inst, c)
        assert np.max(np.abs(frame - assembled)) < 1e-12
        assert np.allclose(np.linalg.eigvalsh(assembled),
                           np.sort(np.concatenate([np.linalg.eigvalsh(
                               block_hamiltonian(t, sched, inst, c, lam)) for lam in sectors(n)])))


def test_sectors_partition_register():
    idx = np.concatenate([sector_indices(2, lam) for lam in sectors(2)])
    assert sorted(idx.tolist()) == list(range(16))
    p = sector_projector(2, all_ones(2))
    for i in (1, 2):
        parity = pauli_string({2 * i - 1: "z", 2 * i: "z"}, 4)
        assert np.allclose(parity @ p, -p)


def test_initial_states(sched, inst):
    assert np.allclose(initial_state(Conventional(), 2), [0.5] * 4)
    assert np.allclose(initial_state(Ancilla(-0.5), 1), np.array([0, 1, 1, 0]) / math.sqrt(2))
    for c in (-2.0, -0.5):
        psi = initial_state(Ancilla(c), 2)
        h0 = hamiltonian_at(0.0, sched, inst, Ancilla(c))
        assert np.vdot(psi, h0 @ psi).real == pytest.approx(2 * sched.a * (c - 1))
        ground, energy, _ = ground_state(h0)
        assert abs(np.vdot(ground, psi)) ** 2 == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("c", [0.5, 0.0])
def test_non_negative_c_rejected(c):
    with pytest.raises(DegenerateGroundState):
        initial_state(Ancilla(c), 2)


def test_degenerate_start_refused(sched):
    """At c = 0 the levels c - 1 and -(c + 1) coincide at the bottom."""
    with pytest.raises(DegenerateGroundState):
        ground_state(hamiltonian_at(0.0, sched, ProblemInstance(h=(1.0,)), Ancilla(0.0)))


@pytest.mark.parametrize("c", [-1.0, 1.0])
def test_middle_degeneracy_keeps_unique_ground(sched, c):
    vals = np.linalg.eigvalsh(hamiltonian_at(0.0, sched, ProblemInstance(h=(1.0,)), Ancilla(c)))
    assert np.allclose(vals, [-20, 0, 0, 20])
    assert ground_state(hamiltonian_at(0.0, sched, ProblemInstance(h=(1.0,)), Ancilla(c)))[2] > 1


def test_physical_marginals():
    ket = np.zeros(4)
    ket[2] = 1.0  # ancilla=1, physical=0
    assert physical_marginal(np.outer(ket, ket), "0") == 1.0
    psi = initial_state(Ancilla(-0.5), 1)
    rho = np.outer(psi, psi.conj())
    assert physical_marginal(rho, "0") == pytest.approx(0.5)
    assert physical_marginal(rho, "1") == pytest.approx(0.5)
    rng = np.random.default_rng(1)
    v = rng.normal(size=16) + 1j * rng.normal(size=16)
    v /= np.linalg.norm(v)
    assert physical_probabilities(v, 2).sum() == pytest.approx(1.0)
    with pytest.raises(ConfigError):
        physical_marginal(2 * rho, "0")
    with pytest.raises(ConfigError):
        physical_marginal(rho, "2")


def test_closed_full_matches_block_run(inst):
    """Physical marginals of the full ancilla run equal those of the all-ones block run."""
    sched = AnnealSchedule(T=50.0)
    full = integrate_closed(initial_state(Ancilla(-0.5), 2), sched, inst, Ancilla(-0.5),
                            dt=0.01, n_snapshots=11)
    from pairanneal.model import block_system
    from pairanneal.propagation import integrate_closed_system
    block = integrate_closed_system(initial_state(Conventional(), 2),
                                    block_system(sched, inst, -0.5, all_ones(2)),
                                    dt=0.01, n_snapshots=11)
    pf = np.array([physical_probabilities(s, 2) for s in full.states])
    pb = np.array([physical_probabilities(s, 2) for s in block.states])
    assert np.max(np.abs(pf - pb)) < 1e-6
