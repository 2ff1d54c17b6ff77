"""Generalized and standard robustness, and optimal witnesses from the robustness dual."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.optimize as so

from .errors import InfiniteRobustness, NumericalFailure, Unsupported
from .freesets import BlochBall, FreeSet, Incoherent, PolytopeHull, Separable, Singleton, _real_coords
from .linalg import PAULI_I, PAULI_X, PAULI_Y, PAULI_Z, basis_projector, bloch_vector, expectation
from .sdp import OPTIMAL, UNBOUNDED, SdpProblem, solve_sdp
from .states import validate_state

LAMBDA_CAP = 1e6
SUPPORT_TOL = 1e-9


@dataclass
class Witness:
    """PSD operator W with ``Tr(W sigma) <= 1`` on the free set.

    `free_value` and `free_min` are the max and min of ``Tr(W sigma)`` over F;
    `argmin` is the free state attaining the minimum.
    """

    operator: np.ndarray
    free_value: float
    free_min: float
    argmin: np.ndarray

    def value(self, rho: np.ndarray) -> float:
        return expectation(self.operator, rho)


def make_witness(w: np.ndarray, F: FreeSet) -> Witness:
    r = F.linear_range(w)
    return Witness(np.asarray(w, dtype=complex), r.max, r.min, r.argmin)


def _support_contained(rho: np.ndarray, sigma: np.ndarray) -> bool:
    w, v = np.linalg.eigh(sigma)
    kernel = v[:, w <= SUPPORT_TOL * max(1.0, w[-1])]
    if kernel.shape[1] == 0:
        return True
    return float(np.linalg.norm(kernel.conj().T @ rho @ kernel)) <= SUPPORT_TOL


def _ball_robustness(rho: np.ndarray, r: float) -> tuple[float, np.ndarray]:
    # W = a I + b.sigma is PSD iff a >= |b|, feasible iff a + r|b| <= 1
    v = bloch_vector(rho)
    nv = np.linalg.norm(v)
    if nv <= r:
        return 0.0, PAULI_I.copy()
    t = 1.0 / (1.0 + r)
    u = v / nv
    w = t * (PAULI_I + u[0] * PAULI_X + u[1] * PAULI_Y + u[2] * PAULI_Z)
    return (nv - r) / (1.0 + r), w


def schmidt(psi: np.ndarray, dims: tuple[int, int]):
    """Schmidt coefficients and local bases of a bipartite pure state vector."""
    u, s, vh = np.linalg.svd(np.asarray(psi, dtype=complex).reshape(dims))
    return s, u, vh.T


def entanglement_robustness_pure(psi: np.ndarray, dims: tuple[int, int]) -> tuple[float, np.ndarray]:
    """Robustness ``(sum_i s_i)^2 - 1`` of a pure state and its witness ``d |Phi><Phi|``.

    ``|Phi>`` is the maximally entangled state in the Schmidt bases of psi, so
    ``Tr(W psi) = (sum s_i)^2`` and ``Tr(W sigma) <= 1`` on separable states.
    """
    s, u, v = schmidt(psi, dims)
    d = min(dims)
    phi = sum(np.kron(u[:, i], v[:, i]) for i in range(d)) / math.sqrt(d)
    w = d * np.outer(phi, phi.conj())
    return float(np.sum(s) ** 2 - 1), w


def _pure_vector(rho: np.ndarray) -> np.ndarray | None:
    w, v = np.linalg.eigh(rho)
    if w[-1] < 1 - 1e-10:
        return None
    return v[:, -1]


def generalized_robustness(rho, F: FreeSet) -> tuple[float, Witness | None]:
    """Robustness ``R = sup{Tr(W rho) - 1 : W >= 0, Tr(W sigma) <= 1 on F}`` and an optimal witness.

    Infinite robustness (support of rho outside every free support) returns ``(inf, None)``.
    """
    rho = validate_state(rho)
    if not isinstance(F, Separable) and F.contains(rho):
        # the identity is feasible on every state space and gives Tr(W rho) = 1
        return 0.0, make_witness(np.eye(F.dim, dtype=complex), F)
    if isinstance(F, BlochBall):
        r, w = _ball_robustness(rho, F.radius)
        return r, make_witness(w, F)
    if isinstance(F, Separable):
        psi = _pure_vector(rho)
        if psi is None:
            raise Unsupported("entanglement robustness is only available for pure states")
        r, w = entanglement_robustness_pure(psi, F.dims)
        return r, make_witness(w, F)
    if not _support_contained(rho, F.maximal_state()):
        return math.inf, None
    if isinstance(F, Incoherent):
        cons = [(basis_projector(F.dim, i), 1.0) for i in range(F.dim)]
    elif isinstance(F, (PolytopeHull, Singleton)):
        cons = [(s, 1.0) for s in F.extreme_points()]
    else:
        raise Unsupported(f"robustness not implemented for {F!r}")
    value, w, status = solve_sdp(SdpProblem(rho, inequalities=cons))
    if status == UNBOUNDED:
        return math.inf, None
    if status != OPTIMAL:
        raise NumericalFailure(f"robustness SDP ended with status {status}")
    wit = _normalize_witness(w, F)
    if isinstance(F, Incoherent):
        # raising the diagonal to 1 keeps W PSD and cannot lower Tr(W rho), so the
        # result is still optimal and attains Tr(W sigma) = 1 on every free state
        lifted = wit.operator + np.diag(1 - np.real(np.diag(wit.operator)))
        wit = make_witness(lifted, F)
    return max(0.0, wit.value(rho) - 1.0), wit


def _normalize_witness(w: np.ndarray, F: FreeSet) -> Witness:
    """Clip tiny negative eigenvalues and rescale so that the free maximum is exactly 1."""
    lam, v = np.linalg.eigh((w + w.conj().T) / 2)
    w = (v * np.clip(lam, 0, None)) @ v.conj().T
    wit = make_witness(w, F)
    if wit.free_value > 0:
        wit = make_witness(w / wit.free_value, F)
    return wit


def optimal_witness(rho, F: FreeSet) -> Witness:
    """Witness attaining the robustness with ``max_F Tr(W sigma) = 1``.

    When the dual optimum is not unique the interior-point solution (near the
    analytic centre of the optimal face) is returned as is.
    """
    r, wit = generalized_robustness(rho, F)
    if not math.isfinite(r):
        raise InfiniteRobustness("robustness is infinite; no optimal witness exists")
    return wit


def standard_robustness(rho, F: FreeSet, cap: float = LAMBDA_CAP) -> float:
    """Least lambda with ``(rho + lambda sigma)/(1 + lambda)`` free for some free sigma; inf if none."""
    rho = validate_state(rho)
    if isinstance(F, BlochBall):
        nv = np.linalg.norm(bloch_vector(rho))
        return 0.0 if nv <= F.radius else (nv - F.radius) / (2 * F.radius)
    if not F.finite:
        raise Unsupported(f"standard robustness not implemented for {F!r}")
    pts = F.extreme_points()
    k = len(pts)
    V = np.array([_real_coords(p) for p in pts]).T
    # rho = sum a_k v_k - sum c_k v_k with a, c >= 0; lambda = sum c_k
    a_eq = np.vstack([np.hstack([V, -V]), np.concatenate([np.ones(k), -np.ones(k)])])
    b_eq = np.concatenate([_real_coords(rho), [1.0]])
    c = np.concatenate([np.zeros(k), np.ones(k)])
    res = so.linprog(c, A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if res.status == 2:
        return math.inf
    if res.status != 0:
        raise NumericalFailure(f"standard robustness LP failed: {res.message}")
    lam = float(res.fun)
    return math.inf if lam > cap else max(0.0, lam)
