"""Fisher-information resource witnesses N_C and N_Q, and the estimation tasks that certify them.

The certifying tasks all reduce to two-outcome statistics that are linear in the
parameter,

    P(0 | theta) = theta * c * Tr(X tau) + (1 - theta * c) * q,

where X is the success observable of a discrimination game (``0 <= X <= 1``), q is
the success probability of a fixed reference state and c is a scale. At
``theta = 0`` the Fisher information is ``c^2 (Tr(X tau) - q)^2 / (q (1 - q))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleWitness, NotBinary, NumericalFailure
from .fisher import classical_fisher, quantum_fisher_family
from .freesets import FreeSet, max_cfi_over_free, max_qfi_over_free
from .linalg import check_hermitian
from .robustness import Witness, generalized_robustness, make_witness, standard_robustness
from .states import ChannelFamily, EstimationTask, KrausChannel, computational_povm, validate_state

FEASIBILITY_TOL = 1e-7
ZERO_REFERENCE_TOL = 1e-9
REFERENCE_FLOOR = 1e-10
SANDWICH_TOL = 1e-6


@dataclass
class WitnessReport:
    n_value: float
    resource_value: float
    free_max: float
    normalized: bool
    bounds: tuple[float, float] | None = None
    flags: list[str] = field(default_factory=list)
    task_descriptor: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "n_value": self.n_value,
            "resource_value": self.resource_value,
            "free_max": self.free_max,
            "normalized": self.normalized,
            "flags": list(self.flags),
            "task": self.task_descriptor,
        }
        if self.bounds is not None:
            out["bounds"] = {"lower": self.bounds[0], "upper": self.bounds[1]}
        return out


def success_statistics_family(x_obs: np.ndarray, reference: float, scale: float) -> ChannelFamily:
    """Measure-and-prepare family producing ``diag(P0, 1 - P0)`` with P0 as in the module docstring.

    The output is a valid channel for ``0 <= theta <= 1/scale``.
    """
    x_obs = check_hermitian(x_obs)
    d = x_obs.shape[0]
    q, c = float(reference), float(scale)
    eye = np.eye(d)

    def p0(tau, t):
        return t * c * np.trace(x_obs @ tau) + (1 - t * c) * q * np.trace(tau)

    def apply(tau, t):
        a = p0(tau, t)
        return np.diag([a, np.trace(tau) - a])

    def deriv(tau, t):
        a = c * (np.trace(x_obs @ tau) - q * np.trace(tau))
        return np.diag([a, -a])

    def kraus(t):
        e0 = t * c * x_obs + (1 - t * c) * q * eye
        ops = []
        for k, e in enumerate((e0, eye - e0)):
            w, v = np.linalg.eigh(e)
            root = (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T
            for j in range(d):
                op = np.zeros((2, d), dtype=complex)
                op[k] = root[j]
                ops.append(op)
        return KrausChannel(ops)

    hi = 1.0 / c if c > 0 else math.inf
    return ChannelFamily(apply, d, 2, derivative=deriv, domain=(0.0, hi), kraus=kraus,
                         name="success-statistics",
                         meta={"success_observable": x_obs, "reference": q, "scale": c})


def _as_operator(w) -> np.ndarray:
    return w.operator if isinstance(w, Witness) else check_hermitian(w)


def build_discrimination_task(w, F: FreeSet, zero_branch: str = "regularized",
                              floor: float = REFERENCE_FLOOR) -> EstimationTask:
    """Two-outcome task whose Fisher information at theta = 0 is ``[Tr(W tau) - Tr(W sigma0)]^2``.

    ``sigma0`` minimizes ``Tr(W sigma)`` over F. When that minimum vanishes the literal
    construction (scale ``Tr W``, reference 0) has divergent Fisher information at
    theta = 0; ``zero_branch="regularized"`` instead uses the reference state
    ``(1 - s) sigma0 + s 1/d`` with ``Tr(W .) = floor``, giving
    ``(Tr(W tau) - floor)^2``. ``zero_branch="literal"`` keeps the divergent task.
    """
    w = _as_operator(w)
    lam = np.linalg.eigvalsh(w)
    if lam[0] < -1e-9:
        raise InfeasibleWitness("witness is not positive semidefinite")
    wit = make_witness(w, F)
    if wit.free_value > 1 + FEASIBILITY_TOL:
        raise InfeasibleWitness(f"max of Tr(W sigma) over free states is {wit.free_value:.9g} > 1")
    d = w.shape[0]
    total = float(np.real(np.trace(w)))
    w0 = wit.free_min
    x_obs = w / total
    desc = {"construction": "witness", "trace_w": total, "free_min": w0, "free_max": wit.free_value}
    if w0 > ZERO_REFERENCE_TOL * max(1.0, total):
        c = math.sqrt(w0 * (total - w0))
        q = w0 / total
        desc["branch"] = "generic"
    elif zero_branch == "literal":
        c, q = total, 0.0
        desc["branch"] = "zero-literal"
    elif zero_branch == "regularized":
        c = math.sqrt(floor * (total - floor))
        q = floor / total
        s = (floor - max(w0, 0.0)) / (total / d - max(w0, 0.0))
        desc.update(branch="zero-regularized", reference_floor=floor, mixing_weight=s)
    else:
        raise ValueError(f"zero_branch must be 'regularized' or 'literal', got {zero_branch!r}")
    desc.update(scale=c, reference=q)
    fam = success_statistics_family(x_obs, q, c)
    return EstimationTask(fam, computational_povm(2), theta=0.0, descriptor=desc)


def existence_task(channels, effects, F: FreeSet, floor: float = REFERENCE_FLOOR) -> EstimationTask:
    """Task built from a two-channel discrimination game {A_0, A_1}, {pi_0, pi_1}.

    Success is ``p(tau) = (Tr[A_0(tau) pi_0] + Tr[A_1(tau) pi_1]) / 2`` and the statistics are
    ``P(0|theta) = theta p(tau) + (1 - theta) p(sigma0)`` with sigma0 minimizing p over F.
    """
    a0, a1 = channels
    pi0, pi1 = (check_hermitian(e) for e in effects)
    x_obs = (a0.adjoint(pi0) + a1.adjoint(pi1)) / 2
    rng = F.linear_range(x_obs)
    q = rng.min
    desc = {"construction": "game", "reference": q, "sigma0": rng.argmin}
    if q <= ZERO_REFERENCE_TOL:
        q = floor
        desc.update(branch="zero-regularized", reference=q)
    else:
        desc["branch"] = "generic"
    fam = success_statistics_family(x_obs, q, 1.0)
    return EstimationTask(fam, computational_povm(2), theta=0.0, descriptor=desc)


def existence_tower(tau: np.ndarray, theta: float, channels, effects, sigma0: np.ndarray) -> np.ndarray:
    """Explicit composition of the four maps on system (x) label (x) flag; returns the 2x2 output.

    Used to cross-check :func:`existence_task` for small dimensions.
    """
    a0, a1 = channels
    d = tau.shape[0]
    flag = np.diag([theta, 1 - theta]).astype(complex)
    x = np.kron(np.kron(tau, np.eye(2) / 2), flag)
    # replace the system by sigma0 on the flag-1 branch
    t = x.reshape(d, 2, 2, d, 2, 2)
    keep = np.zeros_like(t)
    keep[:, :, 0, :, :, 0] = t[:, :, 0, :, :, 0]
    rest = np.einsum("iabicd->abcd", t)[:, 1, :, 1]
    x = keep.reshape(4 * d, 4 * d) + np.kron(np.kron(sigma0, np.eye(1)), np.kron(rest, np.diag([0, 1])))
    # controlled discrimination channel on the system, label selects A_k
    t = x.reshape(d, 2, 2, d, 2, 2)
    y = np.zeros((d, 2, 2, d, 2, 2), dtype=complex)
    for k, ch in enumerate((a0, a1)):
        for f1 in range(2):
            for f2 in range(2):
                y[:, k, f1, :, k, f2] = ch(t[:, k, f1, :, k, f2])
    x = y.reshape(4 * d, 4 * d)
    proj = [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])]
    pis = [check_hermitian(e) for e in effects]
    success = sum(np.kron(np.kron(pis[k], proj[k]), np.eye(2)) for k in range(2))
    p0 = float(np.real(np.trace(x @ success)))
    return np.diag([p0, 1 - p0]).astype(complex)


def n_c(task: EstimationTask, rho, F: FreeSet) -> WitnessReport:
    """``F_C(rho) - max_F F_C(sigma)`` for a fixed task."""
    rho = validate_state(rho)
    value = classical_fisher(task, rho)
    fmax = max_cfi_over_free(task, F)
    flags = []
    if fmax.sampled:
        flags.append("sampled-free-max")
    if math.isinf(value) or math.isinf(fmax.value):
        flags.append("divergent-cfi")
    n = value - fmax.value if not (math.isinf(value) and math.isinf(fmax.value)) else math.nan
    if task.descriptor.get("branch") == "zero-regularized":
        flags.append("zero-reference-regularized")
    return WitnessReport(n, value, fmax.value, fmax.value <= 1 + 1e-9, flags=flags,
                         task_descriptor=_public(task.descriptor))


def n_q(fam: ChannelFamily, rho, F: FreeSet, theta: float = 0.0) -> WitnessReport:
    """``F_Q(rho) - max_F F_Q(sigma)`` for a fixed channel family."""
    rho = validate_state(rho)
    value = quantum_fisher_family(fam, rho, theta)
    fmax = max_qfi_over_free(fam, F, theta)
    flags = ["sampled-free-max"] if fmax.sampled else []
    return WitnessReport(value - fmax.value, value, fmax.value, fmax.value <= 1 + 1e-9, flags=flags,
                         task_descriptor={"family": fam.name, "theta": theta})


def _public(desc: dict) -> dict:
    return {k: v for k, v in desc.items() if not isinstance(v, np.ndarray)}


def nc_from_witness(rho, F: FreeSet, **task_kw) -> WitnessReport:
    """N_C on the task built from an optimal robustness witness, with bounds ``(R^2, R^2 + 2R)``.

    Raises NumericalFailure if the computed value leaves the bounds, or, for affine
    free sets, differs from ``R^2`` by more than 1e-6.
    """
    rho = validate_state(rho)
    r, wit = generalized_robustness(rho, F)
    if not math.isfinite(r):
        return WitnessReport(math.inf, math.inf, math.nan, True, bounds=(math.inf, math.inf),
                             flags=["infinite-robustness"], task_descriptor={"construction": "witness"})
    task = build_discrimination_task(wit, F, **task_kw)
    rep = n_c(task, rho, F)
    rep.bounds = (r * r, r * r + 2 * r)
    rep.task_descriptor["robustness"] = r
    n = rep.n_value
    if task.descriptor["branch"] != "zero-literal":
        if not (r * r - SANDWICH_TOL <= n <= r * r + 2 * r + SANDWICH_TOL):
            raise NumericalFailure(f"N_C={n} outside [{r * r}, {r * r + 2 * r}]")
        if F.affine and abs(n - r * r) > SANDWICH_TOL:
            raise NumericalFailure(f"affine free set but N_C={n} differs from R^2={r * r}")
    return rep


def certified_lower_bound(rho, F: FreeSet) -> float:
    """Certified lower bound on the maximal normalized advantage: max(N_C on the witness task, R^2)."""
    rep = nc_from_witness(rho, F)
    return max(rep.n_value, rep.bounds[0])


def _require_binary(task: EstimationTask) -> None:
    if not task.is_binary:
        raise NotBinary(f"task has {len(task.povm)} outcomes, expected 2")


def omega(task: EstimationTask, rho) -> float:
    """|d/dtheta Tr[P Phi_theta(rho)]| at theta = 0, P the first POVM element."""
    _require_binary(task)
    _, dp = task.statistics(validate_state(rho), 0.0)
    return abs(float(dp[0]))


@dataclass
class NcBounds:
    tight: float
    loose: float
    r: float
    omega: float
    standard_robustness: float
    q_range: tuple[float, float]
    corrected: float
    flags: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"bound_tight": self.tight, "bound_loose": self.loose, "bound_corrected": self.corrected,
                "cfi": self.r, "omega": self.omega, "standard_robustness": self.standard_robustness,
                "q_range": list(self.q_range), "flags": list(self.flags)}


def nc_upper_bound_binary(task: EstimationTask, rho, F: FreeSet) -> NcBounds:
    """Upper bounds on N_C for a two-outcome task, in terms of the standard robustness R_S.

    ``tight = r - omega^2 / ((R_S + 1)^2 max_F q(1 - q))`` and
    ``loose = r - 4 omega^2 / (R_S + 1)^2``, where ``q = Tr[P Phi_0(tau)]``. The
    maximum of the concave ``q(1 - q)`` is taken over the exact range of the linear
    functional q on F.

    These two do not hold for every task: writing ``rho = (1 + R_S) s1 - R_S s2`` with
    free s1, s2 only gives ``omega <= (1 + 2 R_S) max_F |dq/dtheta|``. `corrected`
    replaces ``(R_S + 1)^2`` in `tight` by ``(2 R_S + 1)^2`` and is a valid bound.
    """
    _require_binary(task)
    rho = validate_state(rho)
    r = classical_fisher(task, rho, 0.0)
    if not math.isfinite(r):
        raise ValueError("the probe's Fisher information must be finite")
    om = omega(task, rho)
    rs = standard_robustness(rho, F)
    q_obs = task.family.observable(task.povm[0], 0.0)
    rng = F.linear_range(q_obs)
    lo, hi = float(rng.min), float(rng.max)
    qmax = 0.25 if lo <= 0.5 <= hi else max(lo * (1 - lo), hi * (1 - hi))
    if not math.isfinite(rs):
        return NcBounds(r, r, r, om, rs, (lo, hi), r, ["vacuous-infinite-standard-robustness"])
    flags = []

    def bound(k):
        if qmax <= 0:
            return -math.inf if om > 0 else r
        return r - om * om / (k * qmax)

    if qmax <= 0:
        flags.append("deterministic-free-statistics")
    loose = r - 4 * om * om / (rs + 1) ** 2
    return NcBounds(bound((rs + 1) ** 2), loose, r, om, float(rs), (lo, hi), bound((2 * rs + 1) ** 2), flags)
