"""Independent reference computations used to check the library.

Nothing here calls the library's solvers; each oracle uses a different route
(brute force, geometry, finite differences, loops) to the same quantity.
"""

import math

import numpy as np
import scipy.linalg as sla
import scipy.optimize as so

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)


def rand_state(rng, d, rank=None):
    rank = d if rank is None else rank
    a = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def rand_pure(rng, d):
    psi = rng.normal(size=d) + 1j * rng.normal(size=d)
    psi /= np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def rand_herm(rng, d):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (a + a.conj().T) / 2


def rand_unitary(rng, d):
    q, r = np.linalg.qr(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def rand_povm(rng, d, n):
    ops = [rand_state(rng, d) for _ in range(n)]
    s = sum(ops)
    w, v = np.linalg.eigh(s)
    inv = (v / np.sqrt(w)) @ v.conj().T
    return [inv @ o @ inv for o in ops]


def bloch(rho):
    return np.real([np.trace(rho @ SX), np.trace(rho @ SY), np.trace(rho @ SZ)])


def partial_trace_loops(x, da, db, keep):
    """Entrywise partial trace by explicit index loops."""
    if keep == "A":
        out = np.zeros((da, da), dtype=complex)
        for i in range(da):
            for j in range(da):
                out[i, j] = sum(x[i * db + k, j * db + k] for k in range(db))
        return out
    out = np.zeros((db, db), dtype=complex)
    for i in range(db):
        for j in range(db):
            out[i, j] = sum(x[k * db + i, k * db + j] for k in range(da))
    return out


def cfi_finite_difference(apply, povm, rho, theta, h=1e-5):
    """CFI from centrally differenced outcome probabilities of the output state."""
    def probs(t):
        out = apply(rho, t)
        return np.array([np.real(np.trace(out @ m)) for m in povm])

    p = probs(theta)
    dp = (probs(theta + h) - probs(theta - h)) / (2 * h)
    keep = p > 1e-9
    return float(np.sum(dp[keep] ** 2 / p[keep]))


def sld_sylvester(rho, drho):
    """SLD of a full-rank state from the Sylvester solver."""
    return sla.solve_sylvester(rho, rho, 2 * drho)


def fidelity(a, b):
    ra = sla.sqrtm(a)
    return float(np.real(np.trace(sla.sqrtm(ra @ b @ ra))) ** 2)


def qfi_bures(rho_at, theta, h=1e-4):
    """QFI from the Bures fidelity: F_Q = 8 (1 - sqrt(F(rho, rho_h))) / h^2."""
    f = fidelity(rho_at(theta), rho_at(theta + h))
    return 8 * (1 - math.sqrt(min(f, 1.0))) / h ** 2


def coherence_robustness_bruteforce(rho, n_phase=4096, n_diag=11):
    """max Tr(W rho) - 1 over W = [[a, z], [z*, b]] >= 0 with a, b <= 1, by grid search and refinement."""
    best = -math.inf
    r01 = rho[0, 1]
    for a in np.linspace(0, 1, n_diag):
        for b in np.linspace(0, 1, n_diag):
            m = math.sqrt(a * b)
            phis = np.linspace(0, 2 * math.pi, n_phase, endpoint=False)
            vals = a * rho[0, 0].real + b * rho[1, 1].real + 2 * m * np.real(np.exp(1j * phis) * np.conj(r01))
            k = int(np.argmax(vals))
            res = so.minimize_scalar(
                lambda f: -(a * rho[0, 0].real + b * rho[1, 1].real + 2 * m * np.real(np.exp(1j * f) * np.conj(r01))),
                bounds=(phis[k] - 0.01, phis[k] + 0.01), method="bounded", options={"xatol": 1e-12})
            best = max(best, vals[k], -res.fun)
    return best - 1


def _mix_distance(v, u, r):
    """Least s >= 0 with |v + s u| <= r (1 + s), by bisection; inf if none below 1e6."""
    def ok(s):
        return np.linalg.norm(v + s * u) <= r * (1 + s)

    if ok(0):
        return 0.0
    hi = 1.0
    while not ok(hi):
        hi *= 2
        if hi > 1e6:
            return math.inf
    lo = 0.0
    for _ in range(90):
        mid = (lo + hi) / 2
        lo, hi = (lo, mid) if ok(mid) else (mid, hi)
    return hi


def ball_robustness_geometry(rho, r, standard=False, n=400):
    """min over mixing states u (pure, or in the ball for the standard variant) of the mixing weight."""
    v = bloch(rho)
    scale = r if standard else 1.0
    k = np.arange(n) + 0.5
    pol = np.arccos(1 - 2 * k / n)
    az = math.pi * (1 + 5 ** 0.5) * k
    dirs = np.stack([np.sin(pol) * np.cos(az), np.sin(pol) * np.sin(az), np.cos(pol)], axis=1)
    vals = [_mix_distance(v, scale * u, r) for u in dirs]
    i = int(np.argmin(vals))

    def f(ang):
        t, p = ang
        u = np.array([math.sin(t) * math.cos(p), math.sin(t) * math.sin(p), math.cos(t)])
        return _mix_distance(v, scale * u, r)

    u = dirs[i]
    res = so.minimize(f, [math.acos(np.clip(u[2], -1, 1)), math.atan2(u[1], u[0])], method="Nelder-Mead",
                      options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000})
    return min(vals[i], res.fun)


def schmidt_robustness(psi, da, db):
    s = np.linalg.svd(np.asarray(psi).reshape(da, db), compute_uv=False)
    return float(np.sum(s) ** 2 - 1)


def worked_example_cfi(theta):
    return 2 * math.cos(theta / 2) ** 2 / (3 + math.cos(theta))
