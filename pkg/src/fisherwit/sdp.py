"""Small dense semidefinite programs by a primal-dual interior-point method.

The solver works on a product cone of Hermitian PSD blocks and one nonnegative
orthant. Complex blocks are embedded as real symmetric matrices of twice the size
(``A -> [[Re A, -Im A], [Im A, Re A]]``); blocks whose data are all real are kept
real. Search directions are HKM with a Mehrotra predictor-corrector.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg as sla

from .errors import NumericalFailure, SizeLimit
from .linalg import check_hermitian

log = logging.getLogger(__name__)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

MAX_PSD_DIM = 16
MAX_CONSTRAINTS = 64


@dataclass
class ConeProgram:
    """maximize ``sum_b Tr(C_b X_b) + c_lp . x`` subject to linear equalities.

    Each equality is ``(coeffs, rhs)`` where ``coeffs`` is a list with one Hermitian
    matrix (or None) per PSD block followed by one vector (or None) for the LP block.
    """

    psd_dims: list[int]
    lp_dim: int = 0
    objective: list = field(default_factory=list)
    lp_objective: np.ndarray | None = None
    equalities: list = field(default_factory=list)

    def add_equality(self, mats: Sequence | dict, rhs: float, lp=None) -> None:
        if isinstance(mats, dict):
            row = [mats.get(k) for k in range(len(self.psd_dims))]
        else:
            row = list(mats) + [None] * (len(self.psd_dims) - len(mats))
        self.equalities.append((row, lp, float(rhs)))


@dataclass
class SdpResult:
    value: float
    status: str
    blocks: list
    lp: np.ndarray
    dual: np.ndarray
    iterations: int
    gap: float
    primal_infeasibility: float
    dual_infeasibility: float

    @property
    def X(self) -> np.ndarray:
        return self.blocks[0]


@dataclass
class SdpProblem:
    """maximize ``Tr(C X)`` over Hermitian ``X >= 0`` with equality and ``<=`` constraints."""

    objective: np.ndarray
    equalities: Sequence[tuple[np.ndarray, float]] = ()
    inequalities: Sequence[tuple[np.ndarray, float]] = ()

    def __post_init__(self):
        self.objective = check_hermitian(self.objective, tol=1e-9)
        n = self.objective.shape[0]
        for a, _ in list(self.equalities) + list(self.inequalities):
            if check_hermitian(a, tol=1e-9).shape != (n, n):
                raise ValueError("constraint matrix dimension does not match the objective")

    @property
    def n(self) -> int:
        return self.objective.shape[0]

    def to_cone_program(self) -> ConeProgram:
        m = len(self.inequalities)
        prog = ConeProgram([self.n], lp_dim=m, objective=[self.objective])
        for a, b in self.equalities:
            prog.add_equality([a], b)
        for j, (a, c) in enumerate(self.inequalities):
            slack = np.zeros(m)
            slack[j] = 1.0
            prog.add_equality([a], c, lp=slack)
        return prog


def solve_sdp(p: SdpProblem, **kw) -> tuple[float, np.ndarray, str]:
    """Solve an :class:`SdpProblem`; returns ``(optimal value, X, status)``."""
    if p.n > MAX_PSD_DIM:
        raise SizeLimit(f"PSD variable of dimension {p.n} exceeds {MAX_PSD_DIM}")
    if len(p.equalities) + len(p.inequalities) > MAX_CONSTRAINTS:
        raise SizeLimit(f"more than {MAX_CONSTRAINTS} constraints")
    res = solve_cone_program(p.to_cone_program(), **kw)
    return res.value, res.X, res.status


# -- real embedding ---------------------------------------------------------


def _embed(a: np.ndarray, real: bool) -> np.ndarray:
    if real:
        return np.real(a).astype(float)
    re, im = np.real(a), np.imag(a)
    return np.block([[re, -im], [im, re]])


def _unembed(x: np.ndarray, real: bool) -> np.ndarray:
    if real:
        return x.astype(complex)
    n = x.shape[0] // 2
    re = (x[:n, :n] + x[n:, n:]) / 2
    im = (x[n:, :n] - x[:n, n:]) / 2
    out = re + 1j * im
    return (out + out.conj().T) / 2


class _Standard:
    """``min <C, x>`` s.t. ``A x = b``, x in cone; real data, redundant rows removed."""

    def __init__(self, prog: ConeProgram):
        nb = len(prog.psd_dims)
        self.real = []
        for k in range(nb):
            mats = [prog.objective[k] if k < len(prog.objective) else None]
            mats += [row[k] for row, _, _ in prog.equalities]
            self.real.append(all(m is None or np.allclose(np.imag(m), 0, atol=0) for m in mats))
        self.sizes = [d if r else 2 * d for d, r in zip(prog.psd_dims, self.real)]
        # complex blocks: <embed(A)/2, embed(X)> = Re Tr(A X)
        scale = [1.0 if r else 0.5 for r in self.real]
        self.l = prog.lp_dim
        m = len(prog.equalities)
        self.A = [np.zeros((m, s, s)) for s in self.sizes]
        self.A_lp = np.zeros((m, self.l))
        b = np.zeros(m)
        for i, (row, lp, rhs) in enumerate(prog.equalities):
            for k, mat in enumerate(row):
                if mat is not None:
                    self.A[k][i] = scale[k] * _embed(np.asarray(mat, dtype=complex), self.real[k])
            if lp is not None:
                self.A_lp[i] = lp
            b[i] = rhs
        # minimize the negated objective
        self.C = []
        for k in range(nb):
            c = prog.objective[k] if k < len(prog.objective) and prog.objective[k] is not None else None
            if c is None:
                self.C.append(np.zeros((self.sizes[k], self.sizes[k])))
            else:
                self.C.append(-scale[k] * _embed(np.asarray(c, dtype=complex), self.real[k]))
        self.C_lp = -np.asarray(prog.lp_objective, float) if prog.lp_objective is not None else np.zeros(self.l)
        self.b = b
        self.inconsistent = False
        self._reduce()

    def _rows(self) -> np.ndarray:
        cols = [a.reshape(a.shape[0], -1) for a in self.A] + [self.A_lp]
        return np.hstack(cols) if cols else np.zeros((len(self.b), 0))

    def _reduce(self) -> None:
        rows = self._rows()
        if rows.shape[0] == 0:
            return
        norms = np.linalg.norm(rows, axis=1)
        scale = np.where(norms > 0, norms, 1.0)
        _, r, piv = sla.qr((rows / scale[:, None]).T, mode="economic", pivoting=True)
        diag = np.abs(np.diag(r)) if r.size else np.zeros(0)
        tol = 1e-10 * max(1.0, diag[0] if diag.size else 1.0)
        rank = int(np.sum(diag > tol))
        keep = np.sort(piv[:rank])
        drop = np.setdiff1d(np.arange(rows.shape[0]), keep)
        if drop.size:
            basis = rows[keep]
            coef, *_ = np.linalg.lstsq(basis.T, rows[drop].T, rcond=None)
            implied = coef.T @ self.b[keep]
            if np.max(np.abs(implied - self.b[drop])) > 1e-8 * max(1.0, np.max(np.abs(self.b))):
                self.inconsistent = True
        self.A = [a[keep] for a in self.A]
        self.A_lp = self.A_lp[keep]
        self.b = self.b[keep]

    @property
    def m(self) -> int:
        return len(self.b)

    def op(self, xs, xl) -> np.ndarray:
        out = self.A_lp @ xl if self.l else np.zeros(self.m)
        for a, x in zip(self.A, xs):
            out = out + np.einsum("kij,ij->k", a, x)
        return out

    def adj(self, y):
        return [np.einsum("k,kij->ij", y, a) for a in self.A], self.A_lp.T @ y


def _max_step(x: np.ndarray, dx: np.ndarray) -> float:
    try:
        lc = np.linalg.cholesky(x)
    except np.linalg.LinAlgError:
        return 0.0
    li = sla.solve_triangular(lc, np.eye(x.shape[0]), lower=True)
    w = np.linalg.eigvalsh(li @ dx @ li.T)
    return np.inf if w[0] >= 0 else -1.0 / w[0]


def _max_step_lp(x: np.ndarray, dx: np.ndarray) -> float:
    neg = dx < 0
    return np.inf if not neg.any() else float(np.min(-x[neg] / dx[neg]))


def _sym(a):
    return (a + a.T) / 2


def solve_cone_program(prog: ConeProgram, tol: float = 1e-10, max_iter: int = 200,
                       accept: float = 1e-7) -> SdpResult:
    """Primal-dual path following; `accept` is the looser level reported as optimal after stalling."""
    st = _Standard(prog)
    nb = len(st.sizes)
    if st.inconsistent:
        return SdpResult(np.nan, INFEASIBLE, [None] * nb, np.zeros(st.l), np.zeros(st.m), 0,
                         np.inf, np.inf, 0.0)
    nu = sum(st.sizes) + st.l
    bnorm = 1 + np.linalg.norm(st.b)
    cnorm = 1 + np.sqrt(sum(np.sum(c * c) for c in st.C) + np.sum(st.C_lp ** 2))
    anorm = max([np.sqrt(np.sum(a * a, axis=(1, 2))).max() for a in st.A if a.size]
                + ([np.linalg.norm(st.A_lp, axis=1).max()] if st.l and st.m else []) + [1.0])
    xi = max(10.0, np.sqrt(nu), max(1.0, np.max(np.abs(st.b), initial=0.0)) * nu / anorm)
    eta = max(10.0, np.sqrt(nu), cnorm, anorm)
    X = [xi * np.eye(s) for s in st.sizes]
    S = [eta * np.eye(s) for s in st.sizes]
    x = xi * np.ones(st.l)
    s = eta * np.ones(st.l)
    y = np.zeros(st.m)

    best = None
    status = None
    it = 0
    for it in range(1, max_iter + 1):
        rp = st.b - st.op(X, x)
        aty, atyl = st.adj(y)
        Rd = [c - a - sb for c, a, sb in zip(st.C, aty, S)]
        rdl = st.C_lp - atyl - s
        pobj = sum(np.sum(c * xb) for c, xb in zip(st.C, X)) + st.C_lp @ x
        dobj = st.b @ y
        mu = (sum(np.sum(xb * sb) for xb, sb in zip(X, S)) + x @ s) / nu
        pinf = np.linalg.norm(rp) / bnorm
        dinf = np.sqrt(sum(np.sum(r * r) for r in Rd) + rdl @ rdl) / cnorm
        gap = abs(pobj - dobj) / (1 + abs(pobj) + abs(dobj))
        err = max(pinf, dinf, gap)
        if best is None or err < best[0]:
            best = (err, [xb.copy() for xb in X], x.copy(), y.copy(), pobj, dobj, gap, pinf, dinf)
        if err < tol:
            status = OPTIMAL
            break
        xnorm = max([np.abs(xb).max() for xb in X] + [np.abs(x).max(initial=0.0)])
        ynorm = np.abs(y).max(initial=0.0)
        if xnorm > 1e10 and pobj < -1e8 and pinf < 1e-6:
            status = UNBOUNDED
            break
        if ynorm > 1e10 and dobj > 1e8 and dinf < 1e-6:
            status = INFEASIBLE
            break

        try:
            Sinv = [_sym(np.linalg.inv(sb)) for sb in S]
        except np.linalg.LinAlgError:
            # the slack hit the boundary to machine precision; keep the best iterate
            break
        M = np.zeros((st.m, st.m))
        for a, xb, si in zip(st.A, X, Sinv):
            if a.size:
                t = np.einsum("ij,kjl,lm->kim", xb, a, si)
                M += np.einsum("iab,jba->ij", a, t)
        if st.l:
            M += (st.A_lp * (x / s)) @ st.A_lp.T
        M = _sym(M)
        try:
            cho = sla.cho_factor(M + 1e-14 * np.trace(M) / max(st.m, 1) * np.eye(st.m))
            solve = lambda r: sla.cho_solve(cho, r)  # noqa: E731
        except (np.linalg.LinAlgError, ValueError):
            solve = lambda r: np.linalg.lstsq(M, r, rcond=None)[0]  # noqa: E731

        def direction(sigma_mu, corr_x=None, corr_l=None):
            Rc = [sigma_mu * si - xb for si, xb in zip(Sinv, X)]
            rcl = sigma_mu / s - x if st.l else np.zeros(0)
            if corr_x is not None:
                Rc = [r - cx for r, cx in zip(Rc, corr_x)]
                rcl = rcl - corr_l
            h = [r - xb @ rd @ si for r, xb, rd, si in zip(Rc, X, Rd, Sinv)]
            hl = rcl - x * rdl / s if st.l else rcl
            dy = solve(rp - st.op(h, hl))
            atdy, atdyl = st.adj(dy)
            dS = [rd - a for rd, a in zip(Rd, atdy)]
            dsl = rdl - atdyl
            dX = [_sym(r - xb @ ds @ si) for r, xb, ds, si in zip(Rc, X, dS, Sinv)]
            dxl = rcl - x * dsl / s if st.l else rcl
            return dX, dxl, dy, dS, dsl

        def steps(dX, dxl, dS, dsl):
            ap = min([_max_step(xb, d) for xb, d in zip(X, dX)] + [_max_step_lp(x, dxl) if st.l else np.inf])
            ad = min([_max_step(sb, d) for sb, d in zip(S, dS)] + [_max_step_lp(s, dsl) if st.l else np.inf])
            return ap, ad

        dX, dxl, dy, dS, dsl = direction(0.0)
        ap, ad = steps(dX, dxl, dS, dsl)
        ap, ad = min(1.0, ap), min(1.0, ad)
        mu_aff = (sum(np.sum((xb + ap * a) * (sb + ad * b)) for xb, a, sb, b in zip(X, dX, S, dS))
                  + (x + ap * dxl) @ (s + ad * dsl)) / nu
        sigma = min(1.0, (mu_aff / mu) ** 3) if mu > 0 else 0.0
        corr_x = [_sym(a @ b @ si) for a, b, si in zip(dX, dS, Sinv)]
        corr_l = dxl * dsl / s if st.l else np.zeros(0)
        dX, dxl, dy, dS, dsl = direction(sigma * mu, corr_x, corr_l)
        ap, ad = steps(dX, dxl, dS, dsl)
        gamma = 0.9 + 0.09 * min(1.0, ap, ad)
        ap, ad = min(1.0, gamma * ap), min(1.0, gamma * ad)
        if ap < 1e-12 and ad < 1e-12:
            break
        X = [_sym(xb + ap * d) for xb, d in zip(X, dX)]
        x = x + ap * dxl
        y = y + ad * dy
        S = [_sym(sb + ad * d) for sb, d in zip(S, dS)]
        s = s + ad * dsl

    err, Xb, xb, yb, pobj, dobj, gap, pinf, dinf = best
    if status is None:
        if err < accept:
            status = OPTIMAL
        else:
            raise NumericalFailure(f"interior point stalled after {it} iterations "
                                   f"(gap {gap:.2e}, pinf {pinf:.2e}, dinf {dinf:.2e})")
    if status == UNBOUNDED:
        value = np.inf
    elif status == INFEASIBLE:
        value = -np.inf
    else:
        value = -(pobj + dobj) / 2
    blocks = [_unembed(b, r) for b, r in zip(Xb, st.real)]
    log.debug("sdp %s after %d iterations, value %.12g, gap %.2e", status, it, value, gap)
    return SdpResult(float(value), status, blocks, xb, yb, it, gap, pinf, dinf)
