"""Compiled inner loops shared by the public modules.

Everything here works on plain contiguous ``complex128``/``float64`` arrays so
the same functions serve both the per-call Python API and the long RK4 loops.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

SCHEDULE_STANDARD = 0
SCHEDULE_LITERAL = 1

# |A| entries below this are dropped from jump operators.
PRUNE = 1e-14


@njit(cache=True)
def schedule_ab(code, a, total, t):
    s = t / total
    if code == SCHEDULE_STANDARD:
        return a * (1.0 - s), a * s
    return a * s, a - a * s


@njit(cache=True)
def ohmic_rate(omega, beta, eta, omega_c):
    w = abs(omega)
    if w == 0.0:
        return eta / beta
    up = eta * w * math.exp(-w / omega_c) / (-math.expm1(-beta * w))
    if omega > 0.0:
        return up
    return up * math.exp(-beta * w)


@njit(cache=True)
def dagger(m):
    return np.ascontiguousarray(m.conj().T)


@njit(cache=True)
def jacobi_eigh(m, start, rel_tol, max_sweeps):
    """Cyclic complex Jacobi on ``start^dag m start``.

    ``start`` is a unitary initial basis (identity for a cold solve; the
    previous eigenvectors when tracking a slowly varying matrix).  Exact zeros
    are never rotated, so block structure shared by ``m`` and ``start``
    survives in the eigenvectors bit for bit.
    """
    d = m.shape[0]
    v = start.copy()
    a = np.dot(dagger(start), np.dot(m, start))
    norm = 0.0
    for i in range(d):
        for j in range(d):
            norm += a[i, j].real ** 2 + a[i, j].imag ** 2
    norm = math.sqrt(norm)
    converged = False
    for _ in range(max_sweeps + 1):
        off = 0.0
        for p in range(d - 1):
            for q in range(p + 1, d):
                off += 2.0 * (a[p, q].real ** 2 + a[p, q].imag ** 2)
        if math.sqrt(off) <= rel_tol * norm:
            converged = True
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                phase = apq / mag
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                u00 = complex(c, 0.0)
                u01 = complex(s, 0.0)
                u10 = -s * phase.conjugate()
                u11 = c * phase.conjugate()
                for k in range(d):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = akp * u00 + akq * u10
                    a[k, q] = akp * u01 + akq * u11
                for k in range(d):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = u00.conjugate() * apk + u10.conjugate() * aqk
                    a[q, k] = u01.conjugate() * apk + u11.conjugate() * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                for k in range(d):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = vkp * u00 + vkq * u10
                    v[k, q] = vkp * u01 + vkq * u11
    vals = np.empty(d)
    for i in range(d):
        vals[i] = a[i, i].real
    order = np.argsort(vals, kind="mergesort")
    return vals[order], np.ascontiguousarray(v[:, order]), converged


@njit(cache=True)
def gap_bins(vals, gap_tol):
    """Single-linkage clustering of all ordered gaps ``vals[b] - vals[a]``.

    Returns ``labels[a, b]`` and one representative frequency per bin.  The bin
    that reaches zero gets representative exactly 0.
    """
    d = vals.shape[0]
    gaps = np.empty(d * d)
    for a in range(d):
        for b in range(d):
            gaps[a * d + b] = vals[b] - vals[a]
    order = np.argsort(gaps)
    flat = np.empty(d * d, dtype=np.int64)
    lo = np.empty(d * d)
    hi = np.empty(d * d)
    nb = 0
    lo[0] = gaps[order[0]]
    hi[0] = gaps[order[0]]
    flat[order[0]] = 0
    for i in range(1, d * d):
        g = gaps[order[i]]
        if g - gaps[order[i - 1]] > gap_tol:
            nb += 1
            lo[nb] = g
        hi[nb] = g
        flat[order[i]] = nb
    nb += 1
    reps = np.empty(nb)
    for k in range(nb):
        if lo[k] - gap_tol <= 0.0 <= hi[k] + gap_tol:
            reps[k] = 0.0
        else:
            reps[k] = 0.5 * (lo[k] + hi[k])
    return flat.reshape((d, d)), reps


@njit(cache=True)
def eigen_coupling(vecs, couplings):
    n_ax = couplings.shape[0]
    d = vecs.shape[0]
    vh = dagger(vecs)
    out = np.empty((n_ax, d, d), dtype=np.complex128)
    for x in range(n_ax):
        out[x] = np.dot(vh, np.dot(couplings[x], vecs))
    return out


@njit(cache=True)
def build_generator(vals, vecs, couplings, gap_tol, beta, eta, omega_c):
    """Jump data of the adiabatic dissipator in the instantaneous eigenbasis.

    Groups are (axis, gap bin) pairs.  ``w`` already carries sqrt(rate) so a
    group contributes ``A rho A^dag`` with ``A[a, b] = w``.  ``kmat`` is the
    summed ``rate * A^dag A`` used by the anticommutator.
    """
    d = vals.shape[0]
    n_ax = couplings.shape[0]
    labels, reps = gap_bins(vals, gap_tol)
    nb = reps.shape[0]
    sq = np.full(nb, -1.0)
    ct = eigen_coupling(vecs, couplings)

    n = 0
    for x in range(n_ax):
        for a in range(d):
            for b in range(d):
                if ct[x, a, b].real ** 2 + ct[x, a, b].imag ** 2 > PRUNE * PRUNE:
                    n += 1
    keys = np.empty(n, dtype=np.int64)
    pa = np.empty(n, dtype=np.int64)
    pb = np.empty(n, dtype=np.int64)
    w = np.empty(n, dtype=np.complex128)
    i = 0
    for x in range(n_ax):
        for a in range(d):
            for b in range(d):
                if ct[x, a, b].real ** 2 + ct[x, a, b].imag ** 2 > PRUNE * PRUNE:
                    k = labels[a, b]
                    if sq[k] < 0.0:
                        sq[k] = math.sqrt(ohmic_rate(reps[k], beta, eta, omega_c))
                    keys[i] = x * nb + k
                    pa[i] = a
                    pb[i] = b
                    w[i] = sq[k] * ct[x, a, b]
                    i += 1
    order = np.argsort(keys, kind="mergesort")
    keys = keys[order]
    pa = pa[order]
    pb = pb[order]
    w = w[order]

    n_groups = 0
    for i in range(n):
        if i == 0 or keys[i] != keys[i - 1]:
            n_groups += 1
    ptr = np.empty(n_groups + 1, dtype=np.int64)
    gkey = np.empty(n_groups, dtype=np.int64)
    g = 0
    for i in range(n):
        if i == 0 or keys[i] != keys[i - 1]:
            ptr[g] = i
            gkey[g] = keys[i]
            g += 1
    ptr[n_groups] = n

    kmat = np.zeros((d, d), dtype=np.complex128)
    for g in range(n_groups):
        for i in range(ptr[g], ptr[g + 1]):
            for j in range(ptr[g], ptr[g + 1]):
                if pa[i] == pa[j]:
                    kmat[pb[i], pb[j]] += w[i].conjugate() * w[j]
    return labels, reps, gkey, ptr, pa, pb, w, kmat


@njit(cache=True)
def apply_eigenframe(vals, ptr, pa, pb, w, kmat, rt):
    """Generator acting on a density matrix already expressed in the eigenbasis."""
    d = vals.shape[0]
    out = np.empty((d, d), dtype=np.complex128)
    for a in range(d):
        for c in range(d):
            out[a, c] = -1j * (vals[a] - vals[c]) * rt[a, c]
    anti = np.dot(kmat, rt) + np.dot(rt, kmat)
    for a in range(d):
        for c in range(d):
            out[a, c] -= 0.5 * anti[a, c]
    n_groups = ptr.shape[0] - 1
    for g in range(n_groups):
        for i in range(ptr[g], ptr[g + 1]):
            wa = w[i]
            a = pa[i]
            b = pb[i]
            for j in range(ptr[g], ptr[g + 1]):
                out[a, pa[j]] += wa * w[j].conjugate() * rt[b, pb[j]]
    return out


@njit(cache=True)
def apply_lab(vals, vecs, ptr, pa, pb, w, kmat, rho):
    vh = dagger(vecs)
    rt = np.dot(vh, np.dot(rho, vecs))
    out = apply_eigenframe(vals, ptr, pa, pb, w, kmat, rt)
    return np.dot(vecs, np.dot(out, vh))


@njit(cache=True)
def _generator_at(t, start, drive, problem, code, a, total, couplings,
                  gap_tol, beta, eta, omega_c, rel_tol, max_sweeps):
    ca, cb = schedule_ab(code, a, total, t)
    h = ca * drive + cb * problem
    vals, vecs, ok = jacobi_eigh(h, start, rel_tol, max_sweeps)
    _, _, _, ptr, pa, pb, w, kmat = build_generator(
        vals, vecs, couplings, gap_tol, beta, eta, omega_c)
    return ok, vals, vecs, ptr, pa, pb, w, kmat


@njit(cache=True)
def rk4_open(rho, t0, dt, n_steps, drive, problem, code, a, total, couplings,
             gap_tol, beta, eta, omega_c, rel_tol, max_sweeps):
    """Fixed-step RK4 of the adiabatic master equation.

    The generator at the end of a step is reused for the next step's first
    stage, so each step costs two eigendecompositions.  Returns the final
    state and a flag that is False if any eigensolve failed to converge.
    """
    ok_all = True
    eye = np.eye(drive.shape[0], dtype=np.complex128)
    ok, v0, u0, p0, a0, b0, w0, k0 = _generator_at(
        t0, eye, drive, problem, code, a, total, couplings, gap_tol, beta, eta,
        omega_c, rel_tol, max_sweeps)
    ok_all = ok_all and ok
    for n in range(n_steps):
        t = t0 + n * dt
        ok, v1, u1, p1, a1, b1, w1, k1m = _generator_at(
            t + 0.5 * dt, u0, drive, problem, code, a, total, couplings, gap_tol,
            beta, eta, omega_c, rel_tol, max_sweeps)
        ok_all = ok_all and ok
        ok, v2, u2, p2, a2, b2, w2, k2m = _generator_at(
            t + dt, u1, drive, problem, code, a, total, couplings, gap_tol, beta,
            eta, omega_c, rel_tol, max_sweeps)
        ok_all = ok_all and ok
        k1 = apply_lab(v0, u0, p0, a0, b0, w0, k0, rho)
        k2 = apply_lab(v1, u1, p1, a1, b1, w1, k1m, rho + (0.5 * dt) * k1)
        k3 = apply_lab(v1, u1, p1, a1, b1, w1, k1m, rho + (0.5 * dt) * k2)
        k4 = apply_lab(v2, u2, p2, a2, b2, w2, k2m, rho + dt * k3)
        rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        v0, u0, p0, a0, b0, w0, k0 = v2, u2, p2, a2, b2, w2, k2m
    return rho, ok_all


@njit(cache=True)
def rk4_closed(psi, t0, dt, n_steps, drive, problem, code, a, total):
    """RK4 for the Schroedinger equation.

    Each step integrates ``H - s`` with the scalar ``s = <psi|H(t+dt/2)|psi>``
    frozen for the step and restores the exact phase ``exp(-i s dt)``
    afterwards.  RK4 then only sees frequencies relative to the occupied
    energy, which keeps its amplitude damping (~(E dt)^6 per step) from acting
    on the large absolute energies.
    """
    d = psi.shape[0]
    eye = np.eye(d, dtype=np.complex128)
    for n in range(n_steps):
        t = t0 + n * dt
        ca, cb = schedule_ab(code, a, total, t)
        h0 = ca * drive + cb * problem
        ca, cb = schedule_ab(code, a, total, t + 0.5 * dt)
        h1 = ca * drive + cb * problem
        ca, cb = schedule_ab(code, a, total, t + dt)
        h2 = ca * drive + cb * problem
        s = (np.vdot(psi, np.dot(h1, psi)) / np.vdot(psi, psi)).real
        h0 = h0 - s * eye
        h1 = h1 - s * eye
        h2 = h2 - s * eye
        k1 = -1j * np.dot(h0, psi)
        k2 = -1j * np.dot(h1, psi + (0.5 * dt) * k1)
        k3 = -1j * np.dot(h1, psi + (0.5 * dt) * k2)
        k4 = -1j * np.dot(h2, psi + dt * k3)
        psi = (psi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)) * np.exp(-1j * s * dt)
    return psi
