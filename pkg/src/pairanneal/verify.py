"""Brute-force checks of the structural identities behind the ancilla construction.

These use LAPACK (numpy) eigensolvers and explicit matrix products wherever
the production path uses the Jacobi kernel or the RK4 loop, so a shared bug
cannot hide on both sides.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bath import BathConfig, collective_coupling, gamma, reduced_longitudinal
from .errors import PairAnnealError
from .master import open_system
from .model import (CNOT_PAIR, Ancilla, AnnealingSystem, AnnealSchedule, Conventional,
                    Driver, ProblemInstance, all_ones, annealing_system, assemble_block_diagonal,
                    block_hamiltonian, build_W, ground_state, hamiltonian_at, initial_state,
                    interleaved_to_blocked, sectors, to_sector_frame)
from .operators import I2, PAULI, kron, pauli_on, pauli_string
from .propagation import integrate_closed

STRUCTURAL_TOL = 1e-12
EMBEDDING_TOL = 1e-9
W_TOL = 1e-14


def sample_times(sched: AnnealSchedule, n: int = 11) -> np.ndarray:
    return np.linspace(0.0, sched.T, n)


def parity_operators(n_vars: int) -> list[np.ndarray]:
    return [pauli_string({2 * i - 1: "z", 2 * i: "z"}, 2 * n_vars) for i in range(1, n_vars + 1)]


def parity_commutator(h: np.ndarray, n_vars: int) -> float:
    """Largest Frobenius norm of ``[h, sz_{2i-1} sz_{2i}]`` over pairs."""
    return max(float(np.linalg.norm(h @ p - p @ h)) for p in parity_operators(n_vars))


def check_constants_of_motion(times, sched: AnnealSchedule, inst: ProblemInstance, c: float) -> float:
    system = annealing_system(sched, inst, Ancilla(c))
    return max(parity_commutator(system.at(t), inst.n_vars) for t in times)


def check_block_identity(times, sched: AnnealSchedule, inst: ProblemInstance, c: float) -> float:
    """max |W^dag H W (reordered) - direct sum of sector blocks|."""
    system = annealing_system(sched, inst, Ancilla(c))
    return max(float(np.max(np.abs(to_sector_frame(system.at(t), inst.n_vars)
                                   - assemble_block_diagonal(t, sched, inst, c))))
               for t in times)


def sector_eigenvector(lam, v: np.ndarray, n_vars: int) -> np.ndarray:
    """``W (|lam>_A x |v>_P)`` on the interleaved register."""
    d = 2**n_vars
    blocked = np.zeros(d * d, dtype=complex)
    k = int("".join(map(str, lam)), 2)
    blocked[k * d:(k + 1) * d] = v
    perm = interleaved_to_blocked(n_vars)
    interleaved = np.empty_like(blocked)
    interleaved[perm] = blocked
    return build_W(n_vars) @ interleaved


def check_spectrum_embedding(times, sched: AnnealSchedule, inst: ProblemInstance, c: float) -> float:
    """Spectrum of H(t) against the union of block spectra, plus eigenvector lifting."""
    n = inst.n_vars
    worst = 0.0
    for t in times:
        h = hamiltonian_at(t, sched, inst, Ancilla(c))
        full = np.linalg.eigvalsh(h)
        union = []
        for lam in sectors(n):
            vals, vecs = np.linalg.eigh(block_hamiltonian(t, sched, inst, c, lam))
            union.extend(vals)
            for e, v in zip(vals, vecs.T):
                x = sector_eigenvector(lam, v, n)
                worst = max(worst, float(np.max(np.abs(h @ x - e * x))))
        worst = max(worst, float(np.max(np.abs(full - np.sort(union)))))
    return worst


def check_W(n_vars: int) -> dict[str, float]:
    w = build_W(n_vars)
    d = w.shape[0]
    formula = kron(PAULI["x"], (I2 - PAULI["z"]) / 2) + kron(I2, (I2 + PAULI["z"]) / 2)
    zz = kron(PAULI["z"], PAULI["z"])
    return {
        "involution": float(np.max(np.abs(w @ w - np.eye(d)))),
        "unitarity": float(np.max(np.abs(w.conj().T @ w - np.eye(d)))),
        "cnot_formula": float(np.max(np.abs(formula - CNOT_PAIR))),
        "parity_to_ancilla": float(np.max(np.abs(
            CNOT_PAIR.conj().T @ zz @ CNOT_PAIR - kron(PAULI["z"], I2)))),
    }


@dataclass(frozen=True)
class CancellationReport:
    residual: float
    block_norm: float
    effective_couplings: tuple[float, ...]
    dissipator_residual: float | None = None


def check_cancellation(bath: BathConfig, n_vars: int, c: float | None = None,
                       sched: AnnealSchedule | None = None, inst: ProblemInstance | None = None,
                       times=None) -> CancellationReport:
    """Longitudinal coupling seen inside sector all-ones.

    ``block_norm`` is the norm of the all-ones block of ``W^dag C_z W``;
    ``residual`` its distance to ``sum_i (g_{2i} - g_{2i-1}) sz_i``.  With ``c``,
    ``sched`` and ``inst`` given, the full dissipator is also applied to
    states supported in that sector and the largest output entry reported;
    for uniform couplings it vanishes.
    """
    cz = collective_coupling("z", bath, Ancilla(-0.5), n_vars)
    d = 2**n_vars
    k = d - 1  # all-ones label
    block = to_sector_frame(cz, n_vars)[k * d:(k + 1) * d, k * d:(k + 1) * d]
    delta = reduced_longitudinal(bath, n_vars)
    predicted = np.zeros((d, d), dtype=complex)
    for i, dl in enumerate(delta, start=1):
        predicted += dl * pauli_on(i, "z", n_vars)
    report = CancellationReport(
        residual=float(np.linalg.norm(block - predicted)),
        block_norm=float(np.linalg.norm(block)),
        effective_couplings=tuple(float(abs(x)) for x in delta),
    )
    if c is None or sched is None or inst is None:
        return report
    osys = open_system(inst, sched, Ancilla(c), BathConfig(
        bath.beta, bath.eta, bath.omega_c, bath.gz, 0.0))
    times = sample_times(sched) if times is None else times
    rng = np.random.default_rng(7)
    worst = 0.0
    for t in times:
        for rho in _sector_states(n_vars, rng):
            worst = max(worst, float(np.max(np.abs(osys.generator(t).dissipator(rho)))))
    return CancellationReport(report.residual, report.block_norm,
                              report.effective_couplings, worst)


def _sector_states(n_vars: int, rng: np.random.Generator) -> list[np.ndarray]:
    """The pair-singlet start plus a random mixed state, both inside sector all-ones."""
    psi = initial_state(Ancilla(-0.5), n_vars)
    d = 2**n_vars
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    sigma = x @ x.conj().T
    sigma /= np.trace(sigma)
    lifted = np.array([sector_eigenvector(all_ones(n_vars), col, n_vars) for col in np.eye(d)]).T
    return [np.outer(psi, psi.conj()), lifted @ sigma @ lifted.conj().T]


def check_initial_state(driver: Driver, sched: AnnealSchedule, inst: ProblemInstance) -> dict:
    """Is the prescribed start the unique ground state of H(0)?"""
    try:
        psi = initial_state(driver, inst.n_vars)
        ground, energy, gap = ground_state(hamiltonian_at(0.0, sched, inst, driver))
    except PairAnnealError as exc:
        return {"pass": False, "reason": str(exc)}
    overlap = float(abs(np.vdot(ground, psi)) ** 2)
    return {"pass": bool(overlap > 1 - 1e-10), "overlap": overlap, "energy": energy, "gap": gap}


def oracle_propagate_closed(psi0: np.ndarray, system: AnnealingSystem, slices: int,
                            chunk: int = 4096) -> np.ndarray:
    """Product of exact exponentials of H at slice midpoints (LAPACK eigh)."""
    sched = system.schedule
    tau = sched.T / slices
    psi = np.asarray(psi0, dtype=complex).copy()
    for start in range(0, slices, chunk):
        mids = (np.arange(start, min(start + chunk, slices)) + 0.5) * tau
        ab = np.array([sched.coefficients(t) for t in mids])
        hs = ab[:, 0, None, None] * system.drive + ab[:, 1, None, None] * system.problem
        vals, vecs = np.linalg.eigh(hs)
        for e, v in zip(vals, vecs):
            psi = v @ (np.exp(-1j * tau * e) * (v.conj().T @ psi))
    return psi


def rk4_order_exponent(dts=(0.04, 0.02, 0.01, 0.005)) -> tuple[float, list[float]]:
    """Fitted global order of the closed RK4 on a one-qubit anneal.

    Errors are measured against a run at the smallest step divided by 8.
    """
    sched = AnnealSchedule(a=10.0, T=4.0)
    inst = ProblemInstance(h=(0.7,))
    psi0 = initial_state(Conventional(), 1)
    ref = integrate_closed(psi0, sched, inst, Conventional(), dt=min(dts) / 8, n_snapshots=2).final
    errs = [float(np.linalg.norm(integrate_closed(psi0, sched, inst, Conventional(), dt=dt,
                                                  n_snapshots=2).final - ref)) for dt in dts]
    slope = np.polyfit(np.log(dts), np.log(errs), 1)[0]
    return float(slope), errs


def check_rates(bath: BathConfig, n_points: int = 20) -> dict[str, float]:
    """Zero-frequency limit and detailed balance, as relative errors."""
    ref = bath.eta / bath.beta
    w = np.linspace(0.05, 3.0 * bath.omega_c, n_points)
    up, down = gamma(w, bath), gamma(-w, bath)
    return {"zero_limit": abs(gamma(0.0, bath) - ref) / ref,
            "detailed_balance": float(np.max(np.abs(down - np.exp(-bath.beta * w) * up) / up))}


def _entry(value: float, threshold: float, *, below: bool = True) -> dict:
    ok = value < threshold if below else value > threshold
    return {"value": value, "threshold": threshold, "pass": bool(ok)}


def run_all(sched: AnnealSchedule, inst: ProblemInstance, c: float,
            bath: BathConfig | None = None) -> dict:
    """Structural self-check suite; every entry carries value, threshold and pass."""
    times = sample_times(sched)
    if bath is None or not np.any(bath.couplings("z", 2 * inst.n_vars)):
        bath = BathConfig(gz=0.1)
    n = inst.n_vars
    checks: dict[str, dict] = {}
    checks["schedule_ordering"] = {"pass": sched.ordering_ok,
                                   "A0": sched.A(0.0), "B0": sched.B(0.0),
                                   "AT": sched.A(sched.T), "BT": sched.B(sched.T)}
    checks["constants_of_motion"] = _entry(check_constants_of_motion(times, sched, inst, c),
                                           STRUCTURAL_TOL)
    checks["block_identity"] = _entry(check_block_identity(times, sched, inst, c), STRUCTURAL_TOL)
    checks["spectrum_embedding"] = _entry(check_spectrum_embedding(times, sched, inst, c),
                                          EMBEDDING_TOL)
    for name, value in check_W(n).items():
        checks[f"W_{name}"] = _entry(value, W_TOL)
    longitudinal = BathConfig(bath.beta, bath.eta, bath.omega_c, bath.gz, 0.0)
    report = check_cancellation(longitudinal, n, c, sched, inst, times=times[::5])
    checks["cancellation_operator"] = _entry(report.residual, STRUCTURAL_TOL)
    checks["cancellation_dissipator"] = _entry(report.dissipator_residual, STRUCTURAL_TOL)
    checks["initial_state"] = check_initial_state(Ancilla(c), sched, inst)
    for name, value in check_rates(bath).items():
        checks[f"rate_{name}"] = _entry(value, STRUCTURAL_TOL)
    passed = all(entry["pass"] for entry in checks.values())
    return {"pass": passed, "c": c, "n_vars": n, "schedule": sched.form, "checks": checks}

