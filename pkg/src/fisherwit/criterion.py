"""Sufficient condition for a unitary encoding ``exp(-i theta G)`` to benefit from resources.

The maximal QFI over free states is at most ``s*``, the optimum of

    maximize 2 Tr[(G (x) 1 - 1 (x) G)^2 X]
    subject to X >= 0, Tr X = 1, Tr_A X = Tr_B X in F,

because ``X = sigma (x) sigma`` is feasible with objective ``4 Var_sigma(G)``. If the squared
spectral range of G exceeds s*, the state ``(|lambda_max> + |lambda_min>)/sqrt(2)`` beats every
free state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalFailure, SizeLimit, Unsupported
from .freesets import BlochBall, FreeSet, Incoherent, PolytopeHull, Separable, Singleton, partial_transpose
from .linalg import check_hermitian
from .sdp import OPTIMAL, ConeProgram, solve_cone_program

CERTIFY_MARGIN = 1e-8
SUPPORT_TOL = 1e-9
MAX_GENERATOR_DIM = 4


@dataclass
class CriterionResult:
    s_star: float
    gap_sq: float
    certified: bool
    optimizer: np.ndarray

    @property
    def verdict(self) -> str:
        # failing a sufficient condition says nothing about uselessness
        return "useful" if self.certified else "inconclusive"

    def to_dict(self) -> dict:
        return {"s_star": self.s_star, "gap_sq": self.gap_sq, "certified": self.certified,
                "verdict": self.verdict, "optimizer": self.optimizer}


def generator_gap(g) -> float:
    """``(lambda_max - lambda_min)^2``."""
    w = np.linalg.eigvalsh(check_hermitian(g))
    return float((w[-1] - w[0]) ** 2)


def criterion_objective(g) -> np.ndarray:
    g = check_hermitian(g)
    eye = np.eye(g.shape[0])
    diff = np.kron(g, eye) - np.kron(eye, g)
    return 2 * diff @ diff


def hermitian_basis(d: int) -> list[np.ndarray]:
    """Basis of d x d Hermitian matrices: diagonal units, then symmetric and antisymmetric pairs."""
    out = []
    for i in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[i, i] = 1
        out.append(e)
    for i in range(d):
        for j in range(i + 1, d):
            s = np.zeros((d, d), dtype=complex)
            s[i, j] = s[j, i] = 1
            a = np.zeros((d, d), dtype=complex)
            a[i, j], a[j, i] = -1j, 1j
            out += [s, a]
    return out


def _support_isometry(F: FreeSet) -> np.ndarray:
    w, v = np.linalg.eigh(F.maximal_state())
    return v[:, w > SUPPORT_TOL]


def criterion_sdp(g, F: FreeSet) -> CriterionResult:
    """Solve the program above; X is restricted to ``supp (x) supp`` of the free set's maximal state."""
    g = check_hermitian(g)
    d = g.shape[0]
    if d != F.dim:
        raise ValueError(f"generator dimension {d} does not match free set dimension {F.dim}")
    if d > MAX_GENERATOR_DIM:
        raise SizeLimit(f"generator dimension {d} exceeds {MAX_GENERATOR_DIM}")
    v = _support_isometry(F)
    p = np.kron(v, v)
    k = p.shape[1]
    eye = np.eye(d)

    def on_x(a):
        # functional Tr(a X) pulled back to the reduced variable
        return p.conj().T @ a @ p

    basis = hermitian_basis(d)
    blocks = [k]
    lp_dim = 0
    if isinstance(F, BlochBall):
        if d != 2:
            raise Unsupported("BlochBall marginals require a qubit generator")
        blocks.append(2)
    elif isinstance(F, Separable):
        blocks.append(d)
    elif isinstance(F, PolytopeHull):
        verts = F.extreme_points()
        lp_dim = len(verts)
    elif not isinstance(F, (Incoherent, Singleton)):
        raise Unsupported(f"criterion not implemented for {F!r}")

    prog = ConeProgram(blocks, lp_dim=lp_dim, objective=[on_x(criterion_objective(g))])
    prog.add_equality([on_x(np.eye(d * d))], 1.0)
    for h in basis:
        prog.add_equality([on_x(np.kron(h, eye) - np.kron(eye, h))], 0.0)
    for h in basis:
        marg = on_x(np.kron(h, eye))
        if isinstance(F, Incoherent):
            if np.count_nonzero(np.diag(h)) == 0:
                prog.add_equality([marg], 0.0)
        elif isinstance(F, Singleton):
            prog.add_equality([marg], float(np.real(np.trace(h @ F.state))))
        elif isinstance(F, PolytopeHull):
            prog.add_equality([marg], 0.0, lp=-np.array([np.real(np.trace(h @ s)) for s in verts]))
        elif isinstance(F, BlochBall):
            # |bloch| <= r  <=>  (r - 1) 1 + 2 rho >= 0 for a qubit
            prog.add_equality([-2 * marg, h], (F.radius - 1) * float(np.real(np.trace(h))))
        elif isinstance(F, Separable):
            prog.add_equality([-on_x(np.kron(partial_transpose(h, F.dims), eye)), h], 0.0)
    if lp_dim:
        prog.add_equality([None], 1.0, lp=np.ones(lp_dim))
    res = solve_cone_program(prog)
    if res.status != OPTIMAL:
        raise NumericalFailure(f"criterion program ended with status {res.status}")
    x = p @ res.blocks[0] @ p.conj().T
    s_star = float(res.value)
    gap_sq = generator_gap(g)
    return CriterionResult(s_star, gap_sq, gap_sq > s_star + CERTIFY_MARGIN, x)


def certify_useful(g, F: FreeSet) -> bool:
    return criterion_sdp(g, F).certified
