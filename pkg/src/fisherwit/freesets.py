"""Convex sets of free states and optimization of Fisher information over them.

Every free set answers three questions: membership, its extreme points (when
finitely many), and the range of a linear functional ``Tr(A sigma)``. Because
both Fisher informations are convex in the state, maxima over a set with finitely
many extreme points are exact; the Bloch ball is handled by a deterministic
Fibonacci sample of its surface followed by local refinement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.optimize as so

from .errors import DimensionMismatch, Unsupported
from .fisher import classical_fisher, quantum_fisher_family
from .linalg import (
    PAULI_I,
    basis_projector,
    bloch_vector,
    check_hermitian,
    expectation,
    from_bloch,
    pauli_components,
)
from .states import ChannelFamily, EstimationTask, validate_state

MEMBER_TOL = 1e-8
TIE_TOL = 1e-12
BALL_SAMPLES = 2000


@dataclass
class LinearRange:
    min: float
    argmin: np.ndarray
    max: float
    argmax: np.ndarray


@dataclass
class FreeMax:
    """Maximum of a Fisher information over a free set."""

    value: float
    argmax: np.ndarray
    sampled: bool = False


class FreeSet:
    dim: int
    affine: bool = False
    finite: bool = True

    def contains(self, sigma: np.ndarray) -> bool:
        raise NotImplementedError

    def extreme_points(self) -> list[np.ndarray]:
        raise NotImplementedError

    def linear_range(self, a: np.ndarray) -> LinearRange:
        a = check_hermitian(a)
        pts = self.extreme_points()
        vals = np.array([expectation(a, p) for p in pts])
        lo = _first_within(vals, vals.min())
        hi = _first_within(-vals, -vals.max())
        return LinearRange(float(vals[lo]), pts[lo], float(vals[hi]), pts[hi])

    def maximal_state(self) -> np.ndarray:
        """A free state whose support contains the support of every free state."""
        pts = self.extreme_points()
        return sum(pts) / len(pts)

    def _check_dim(self, sigma: np.ndarray) -> np.ndarray:
        sigma = np.asarray(sigma, dtype=complex)
        if sigma.shape != (self.dim, self.dim):
            raise DimensionMismatch(f"free set has dim {self.dim}, state has shape {sigma.shape}")
        return sigma

    def to_dict(self) -> dict:
        raise NotImplementedError


def _first_within(vals: np.ndarray, target: float) -> int:
    return int(np.flatnonzero(vals <= target + TIE_TOL * max(1.0, abs(target)))[0])


class Incoherent(FreeSet):
    """States diagonal in the computational basis. The only affine set shipped."""

    affine = True

    def __init__(self, dim: int):
        self.dim = int(dim)

    def contains(self, sigma) -> bool:
        sigma = self._check_dim(sigma)
        off = sigma - np.diag(np.diag(sigma))
        return bool(np.linalg.norm(off) <= MEMBER_TOL)

    def extreme_points(self):
        return [basis_projector(self.dim, i) for i in range(self.dim)]

    def maximal_state(self):
        return np.eye(self.dim, dtype=complex) / self.dim

    def to_dict(self):
        return {"variant": "incoherent", "dim": self.dim}

    def __repr__(self):
        return f"Incoherent({self.dim})"


class Singleton(FreeSet):
    def __init__(self, state):
        self.state = validate_state(state)
        self.dim = self.state.shape[0]

    def contains(self, sigma) -> bool:
        return bool(np.linalg.norm(self._check_dim(sigma) - self.state) <= MEMBER_TOL)

    def extreme_points(self):
        return [self.state]

    def to_dict(self):
        return {"variant": "singleton", "state": self.state}

    def __repr__(self):
        return "Singleton(...)"


class PolytopeHull(FreeSet):
    """Convex hull of finitely many states."""

    def __init__(self, states: Sequence):
        if len(states) == 0:
            raise ValueError("polytope needs at least one vertex")
        self.states = [validate_state(s) for s in states]
        self.dim = self.states[0].shape[0]
        if any(s.shape != (self.dim, self.dim) for s in self.states):
            raise DimensionMismatch("polytope vertices have different dimensions")

    def contains(self, sigma) -> bool:
        sigma = self._check_dim(sigma)
        return _hull_residual(self.states, sigma) <= MEMBER_TOL

    def extreme_points(self):
        return list(self.states)

    def to_dict(self):
        return {"variant": "polytope", "states": list(self.states)}

    def __repr__(self):
        return f"PolytopeHull({len(self.states)} vertices)"


def _real_coords(m: np.ndarray) -> np.ndarray:
    iu = np.triu_indices(m.shape[0])
    return np.concatenate([np.real(m[iu]), np.imag(m[iu])])


def _hull_residual(vertices: Sequence[np.ndarray], sigma: np.ndarray) -> float:
    """Frobenius distance from sigma to the hull, via an L1 linear program then a direct recompute."""
    V = np.array([_real_coords(v) for v in vertices]).T
    t = _real_coords(sigma)
    k, m = V.shape[1], V.shape[0]
    c = np.concatenate([np.zeros(k), np.ones(2 * m)])
    a_eq = np.hstack([V, np.eye(m), -np.eye(m)])
    a_eq = np.vstack([a_eq, np.concatenate([np.ones(k), np.zeros(2 * m)])])
    b_eq = np.concatenate([t, [1.0]])
    res = so.linprog(c, A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if res.status != 0:
        return math.inf
    w = np.clip(res.x[:k], 0, None)
    w /= w.sum()
    return float(np.linalg.norm(sum(wi * v for wi, v in zip(w, vertices)) - sigma))


def fibonacci_sphere(n: int = BALL_SAMPLES) -> np.ndarray:
    """Deterministic, nearly uniform unit vectors (n x 3)."""
    k = np.arange(n) + 0.5
    z = 1 - 2 * k / n
    phi = math.pi * (1 + 5 ** 0.5) * k
    rxy = np.sqrt(1 - z * z)
    return np.stack([rxy * np.cos(phi), rxy * np.sin(phi), z], axis=1)


class BlochBall(FreeSet):
    """Qubit states whose Bloch vector has length at most `radius`."""

    finite = False

    def __init__(self, radius: float):
        if not 0 < radius <= 1:
            raise ValueError("radius must lie in (0, 1]")
        self.radius = float(radius)
        self.dim = 2

    def contains(self, sigma) -> bool:
        sigma = self._check_dim(sigma)
        return bool(np.linalg.norm(bloch_vector(sigma)) <= self.radius + MEMBER_TOL)

    def extreme_points(self):
        raise Unsupported("the Bloch ball has a continuum of extreme points; use sample_points()")

    def sample_points(self, n: int = BALL_SAMPLES) -> list[np.ndarray]:
        pts = [from_bloch(self.radius * v) for v in fibonacci_sphere(n)]
        return pts + [PAULI_I / 2]

    def linear_range(self, a) -> LinearRange:
        a0, b = pauli_components(check_hermitian(a))
        nb = np.linalg.norm(b)
        if nb == 0:
            c = PAULI_I / 2
            return LinearRange(a0, c, a0, c)
        u = b / nb
        return LinearRange(a0 - self.radius * nb, from_bloch(-self.radius * u),
                           a0 + self.radius * nb, from_bloch(self.radius * u))

    def maximal_state(self):
        return PAULI_I / 2

    def to_dict(self):
        return {"variant": "blochball", "radius": self.radius}

    def __repr__(self):
        return f"BlochBall({self.radius})"


class Separable(FreeSet):
    """Separable states of a bipartite system; exact (via PPT) only when ``dA * dB <= 6``."""

    finite = False

    def __init__(self, dims: tuple[int, int] = (2, 2)):
        self.dims = (int(dims[0]), int(dims[1]))
        self.dim = self.dims[0] * self.dims[1]

    def _require_ppt_exact(self):
        if self.dim > 6:
            raise Unsupported("separability is only decided exactly for dA*dB <= 6")

    def contains(self, sigma) -> bool:
        self._require_ppt_exact()
        sigma = self._check_dim(sigma)
        return bool(np.linalg.eigvalsh(partial_transpose(sigma, self.dims))[0] >= -MEMBER_TOL)

    def extreme_points(self):
        raise Unsupported("separable states have a continuum of extreme points")

    def linear_range(self, a) -> LinearRange:
        from .sdp import ConeProgram, solve_cone_program

        self._require_ppt_exact()
        a = check_hermitian(a)
        out = []
        for sign in (-1.0, 1.0):
            # X and its partial transpose Y are both PSD states
            prog = ConeProgram([self.dim, self.dim], objective=[sign * a, None])
            prog.add_equality([np.eye(self.dim)], 1.0)
            for i in range(self.dim):
                for j in range(i, self.dim):
                    for part in ("re", "im"):
                        if part == "im" and i == j:
                            continue
                        e = np.zeros((self.dim, self.dim), dtype=complex)
                        if part == "re":
                            e[i, j] = e[j, i] = 0.5
                        else:
                            e[i, j], e[j, i] = -0.5j, 0.5j
                        prog.add_equality([partial_transpose(e, self.dims), -e], 0.0)
            res = solve_cone_program(prog)
            out.append((sign * res.value, res.X))
        (lo, xlo), (hi, xhi) = out
        return LinearRange(lo, xlo, hi, xhi)

    def maximal_state(self):
        return np.eye(self.dim, dtype=complex) / self.dim

    def to_dict(self):
        return {"variant": "separable", "dims": list(self.dims)}

    def __repr__(self):
        return f"Separable({self.dims})"


def partial_transpose(x: np.ndarray, dims: tuple[int, int]) -> np.ndarray:
    """Transpose of the second factor."""
    da, db = dims
    return np.asarray(x).reshape(da, db, da, db).transpose(0, 3, 2, 1).reshape(da * db, da * db)


def hemisphere(n_points: int = 720, azimuths: Sequence[float] = (0.0,)) -> PolytopeHull:
    """Discretized lower Bloch hemisphere (polar angle in [pi/2, 3pi/2]).

    With the default single azimuth this is the boundary semicircle in the x-z plane,
    which carries every maximizer of Fisher informations generated about the y axis.
    """
    states = []
    for phi in azimuths:
        for t in np.linspace(math.pi / 2, 3 * math.pi / 2, n_points):
            psi = np.array([math.cos(t / 2), np.exp(1j * phi) * math.sin(t / 2)])
            states.append(np.outer(psi, psi.conj()))
    return PolytopeHull(states)


# -- operations ----------------------------------------------------------------


def contains(F: FreeSet, sigma) -> bool:
    return F.contains(sigma)


def extreme_points(F: FreeSet) -> list[np.ndarray]:
    return F.extreme_points()


def min_linear_over_free(F: FreeSet, a) -> tuple[float, np.ndarray]:
    """Minimum of ``Tr(A sigma)`` over F and a minimizer (lowest index on ties)."""
    r = F.linear_range(a)
    return r.min, r.argmin


def _maximize(fn: Callable[[np.ndarray], float], F: FreeSet) -> FreeMax:
    if F.finite:
        pts = F.extreme_points()
        vals = np.array([fn(p) for p in pts])
        i = int(np.argmax(vals))
        return FreeMax(float(vals[i]), pts[i], sampled=False)
    if isinstance(F, BlochBall):
        return _maximize_ball(fn, F)
    raise Unsupported(f"cannot maximize a general function over {F!r}")


def _maximize_ball(fn, F: BlochBall) -> FreeMax:
    pts = F.sample_points()
    vals = np.array([fn(p) for p in pts])
    order = np.argsort(-vals, kind="stable")
    best_v, best_p = float(vals[order[0]]), pts[order[0]]
    if not math.isfinite(best_v):
        return FreeMax(best_v, best_p, sampled=True)
    r = F.radius

    def point(ang):
        t, p = ang
        return from_bloch(r * np.array([math.sin(t) * math.cos(p), math.sin(t) * math.sin(p), math.cos(t)]))

    def neg(ang):
        # a non-finite value away from the samples is a cutoff artifact, so steer clear of it
        v = fn(point(ang))
        return -v if math.isfinite(v) else math.inf

    for k in order[:3]:
        v = bloch_vector(pts[k]) / r
        if np.linalg.norm(v) < 0.5:
            continue
        start = [math.acos(np.clip(v[2], -1, 1)), math.atan2(v[1], v[0])]
        res = so.minimize(neg, start, method="Nelder-Mead",
                          options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 2000})
        if math.isfinite(res.fun) and -res.fun > best_v:
            best_v, best_p = float(-res.fun), point(res.x)
    return FreeMax(best_v, best_p, sampled=True)


def max_cfi_over_free(task: EstimationTask, F: FreeSet) -> FreeMax:
    """max of the classical Fisher information over F.

    Tasks whose statistics depend on the probe only through ``Tr(W tau)`` (the
    witness-built tasks) are maximized exactly from the range of that functional.
    """
    w = task.family.meta.get("success_observable")
    if w is not None and task.is_binary:
        rng = F.linear_range(w)
        # a binary CFI with affine numerator and affine P is convex in Tr(W tau)
        cands = [(classical_fisher(task, rng.argmin), rng.argmin), (classical_fisher(task, rng.argmax), rng.argmax)]
        val, arg = max(cands, key=lambda c: c[0])
        return FreeMax(val, arg, sampled=False)
    return _maximize(lambda s: classical_fisher(task, s), F)


def max_qfi_over_free(fam: ChannelFamily, F: FreeSet, theta: float = 0.0) -> FreeMax:
    return _maximize(lambda s: quantum_fisher_family(fam, s, theta), F)


def from_dict(d: dict) -> FreeSet:
    """Build a free set from its JSON descriptor (matrices already decoded)."""
    v = d.get("variant")
    if v == "incoherent":
        return Incoherent(d["dim"])
    if v == "singleton":
        return Singleton(d["state"])
    if v == "polytope":
        return PolytopeHull(d["states"])
    if v == "blochball":
        return BlochBall(d["radius"])
    if v == "hemisphere":
        return hemisphere(d.get("points", 720), d.get("azimuths", (0.0,)))
    if v == "separable":
        return Separable(tuple(d.get("dims", (2, 2))))
    raise ValueError(f"unknown free-set variant {v!r}")
