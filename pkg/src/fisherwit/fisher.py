"""Classical and quantum Fisher information for single-parameter channel families."""

from __future__ import annotations

import math

import numpy as np

from .errors import NumericalFailure
from .linalg import check_hermitian, commutator, hermitian_part
from .states import ChannelFamily, EstimationTask

PROB_CUTOFF = 1e-12
DERIV_CUTOFF = 1e-9
SUPPORT_CUTOFF = 1e-12


def binary_cfi(p: float, dp: float) -> float:
    """Fisher information ``dp^2 / (p (1 - p))`` of a two-outcome distribution.

    Returns ``inf`` when the distribution is deterministic but still moving.
    """
    if dp == 0 or abs(dp) <= DERIV_CUTOFF and min(p, 1 - p) <= PROB_CUTOFF:
        return 0.0
    q = p * (1 - p)
    if q <= PROB_CUTOFF * (1 - PROB_CUTOFF):
        return math.inf
    return dp * dp / q


def cfi_from_statistics(p, dp, d2p=None) -> float:
    """Sum of ``dp_i^2 / p_i``; vanishing outcomes are skipped unless their derivative is not.

    If second derivatives `d2p` are given, a vanishing outcome with vanishing
    derivative contributes ``2 d2p_i``, the limit of ``dp^2/p`` for a probability
    touching zero quadratically (equivalently ``4 (d sqrt(p))^2``).
    """
    total = 0.0
    for i, (pi, dpi) in enumerate(zip(p, dp)):
        if pi <= PROB_CUTOFF:
            if abs(dpi) > DERIV_CUTOFF:
                return math.inf
            if d2p is not None:
                total += 2 * max(float(d2p[i]), 0.0)
            continue
        total += dpi * dpi / pi
    return float(total)


def classical_fisher(task: EstimationTask, rho: np.ndarray, theta: float | None = None) -> float:
    p, dp = task.statistics(rho, theta)
    d2p = None
    if np.any((p <= PROB_CUTOFF) & (np.abs(dp) <= DERIV_CUTOFF)):
        try:
            d2p = task.curvature(rho, theta)
        except (NotImplementedError, ValueError):
            d2p = None
    return cfi_from_statistics(p, dp, d2p)


def _eig_support(rho: np.ndarray):
    w, v = np.linalg.eigh(hermitian_part(np.asarray(rho, dtype=complex)))
    lam = w[:, None] + w[None, :]
    keep = lam > SUPPORT_CUTOFF
    return w, v, lam, keep


def sld(rho: np.ndarray, drho: np.ndarray) -> np.ndarray:
    """Symmetric logarithmic derivative D with ``rho D + D rho = 2 drho`` on the support of rho.

    Components with ``lambda_i + lambda_j <= 1e-12`` are set to zero.
    """
    drho = check_hermitian(drho, tol=1e-8)
    w, v, lam, keep = _eig_support(rho)
    d = v.conj().T @ drho @ v
    out = np.zeros_like(d)
    out[keep] = 2 * d[keep] / lam[keep]
    return hermitian_part(v @ out @ v.conj().T)


def quantum_fisher(rho: np.ndarray, drho: np.ndarray) -> float:
    """QFI ``2 sum |drho_ij|^2 / (lambda_i + lambda_j)`` in the eigenbasis of rho."""
    drho = check_hermitian(drho, tol=1e-8)
    w, v, lam, keep = _eig_support(rho)
    d = v.conj().T @ drho @ v
    return float(2 * np.sum(np.abs(d[keep]) ** 2 / lam[keep]))


def quantum_fisher_trace(rho: np.ndarray, drho: np.ndarray) -> float:
    """QFI as ``Tr(rho D^2)``; an independent route to :func:`quantum_fisher`."""
    d = sld(rho, drho)
    return float(np.real(np.trace(rho @ d @ d)))


def variance(rho: np.ndarray, g: np.ndarray) -> float:
    m1 = np.real(np.trace(rho @ g))
    m2 = np.real(np.trace(rho @ g @ g))
    return float(m2 - m1 * m1)


def quantum_fisher_unitary(rho: np.ndarray, g) -> float:
    """QFI of ``exp(-i theta G) rho exp(i theta G)``, i.e. of ``drho = -i[G, rho]``.

    For pure states the result is cross-checked against ``4 Var(G)``.
    """
    g = check_hermitian(g)
    rho = np.asarray(rho, dtype=complex)
    f = quantum_fisher(rho, -1j * commutator(g, rho))
    if abs(np.real(np.trace(rho @ rho)) - 1) < 1e-10:
        expected = 4 * variance(rho, g)
        if abs(f - expected) > 1e-8 * max(1.0, abs(expected)):
            raise NumericalFailure(f"pure-state QFI {f} disagrees with 4 Var = {expected}")
    return f


def quantum_fisher_family(fam: ChannelFamily, rho: np.ndarray, theta: float = 0.0) -> float:
    """QFI of the output state ``Phi_theta(rho)``."""
    return quantum_fisher(fam.output(rho, theta), fam.derivative(rho, theta))


def generator_extremal_state(g) -> np.ndarray:
    """The pure state ``(|lambda_max> + |lambda_min>)/sqrt(2)``, whose QFI is the squared spectral range."""
    w, v = np.linalg.eigh(check_hermitian(g))
    psi = (v[:, -1] + v[:, 0]) / np.sqrt(2)
    return np.outer(psi, psi.conj())


def sld_measurement(rho: np.ndarray, drho: np.ndarray) -> list[np.ndarray]:
    """Projective measurement onto the SLD eigenbasis; it attains the QFI at (rho, drho)."""
    d = sld(rho, drho)
    _, v = np.linalg.eigh(d)
    return [np.outer(v[:, k], v[:, k].conj()) for k in range(v.shape[1])]
