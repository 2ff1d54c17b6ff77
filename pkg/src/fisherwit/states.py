"""States, POVMs, Kraus channels and parameter-dependent channel families."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    NonSquare,
    NotNormalized,
    NotPositive,
    OutOfDomain,
    TraceNotOne,
)
from .linalg import as_matrix, check_hermitian, commutator, hermitian_part

STATE_TOL = 1e-10
POVM_TOL = 1e-9
FD_STEP = 1e-5


def validate_state(m, tol: float = STATE_TOL) -> np.ndarray:
    """Check that `m` is a density matrix and return a cleaned copy.

    Eigenvalues in ``[-tol, 0)`` are clamped to zero and a trace drift of at most
    `tol` is renormalized away. Anything worse raises.
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise NonSquare(f"state of shape {m.shape} is not square")
    h = check_hermitian(m)
    tr = float(np.real(np.trace(h)))
    if abs(tr - 1) > tol:
        raise TraceNotOne(f"trace is {tr!r}, not 1")
    w, v = np.linalg.eigh(h)
    if w[0] < -tol:
        raise NotPositive(f"smallest eigenvalue {w[0]:.3e} is negative")
    if w[0] < 0:
        w = np.clip(w, 0, None)
        h = (v * w) @ v.conj().T
    return hermitian_part(h) / np.real(np.trace(h))


def validate_povm(elements: Sequence, tol: float = POVM_TOL) -> list[np.ndarray]:
    """Validate POVM elements; small completeness drift is spread over the elements.

    With ``S = sum_i M_i`` the corrected elements are ``S^{-1/2} M_i S^{-1/2}``.
    """
    mats = [check_hermitian(e) for e in elements]
    if not mats:
        raise NotNormalized("POVM has no elements")
    d = mats[0].shape[0]
    for e in mats:
        if e.shape != (d, d):
            raise DimensionMismatch("POVM elements have different dimensions")
        if np.linalg.eigvalsh(e)[0] < -STATE_TOL:
            raise NotPositive("POVM element is not positive semidefinite")
    total = sum(mats)
    drift = np.linalg.norm(total - np.eye(d))
    if drift > tol:
        raise NotNormalized(f"POVM elements sum to identity only within {drift:.3e}")
    if drift > 0:
        w, v = np.linalg.eigh(total)
        s = (v / np.sqrt(w)) @ v.conj().T
        mats = [hermitian_part(s @ e @ s) for e in mats]
    return mats


def computational_povm(dim: int) -> list[np.ndarray]:
    out = []
    for i in range(dim):
        p = np.zeros((dim, dim), dtype=complex)
        p[i, i] = 1
        out.append(p)
    return out


@dataclass(frozen=True)
class KrausChannel:
    """A CPTP map in Kraus form; ``ch(rho)`` applies it."""

    kraus_ops: tuple

    def __init__(self, kraus_ops: Sequence, check: bool = True):
        ops = tuple(as_matrix(k) for k in kraus_ops)
        if not ops:
            raise NotNormalized("channel needs at least one Kraus operator")
        shape = ops[0].shape
        if any(k.shape != shape for k in ops):
            raise DimensionMismatch("Kraus operators have different shapes")
        object.__setattr__(self, "kraus_ops", ops)
        if check:
            tp = sum(k.conj().T @ k for k in ops)
            err = np.linalg.norm(tp - np.eye(shape[1]))
            if err > POVM_TOL:
                raise NotNormalized(f"channel is not trace preserving (defect {err:.3e})")

    @property
    def in_dim(self) -> int:
        return self.kraus_ops[0].shape[1]

    @property
    def out_dim(self) -> int:
        return self.kraus_ops[0].shape[0]

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (self.in_dim, self.in_dim):
            raise DimensionMismatch(f"channel expects dim {self.in_dim}, got {rho.shape}")
        return sum(k @ rho @ k.conj().T for k in self.kraus_ops)

    def adjoint(self, op: np.ndarray) -> np.ndarray:
        """Heisenberg picture: returns ``sum_k K_k^dag op K_k``."""
        return sum(k.conj().T @ op @ k for k in self.kraus_ops)

    def tensor_identity(self, ancilla_dim: int) -> "KrausChannel":
        """The channel ``id_ancilla (x) self`` with the ancilla as the first factor."""
        eye = np.eye(ancilla_dim)
        return KrausChannel([np.kron(eye, k) for k in self.kraus_ops], check=False)


def identity_channel(dim: int) -> KrausChannel:
    return KrausChannel([np.eye(dim)])


def unitary_channel(u) -> KrausChannel:
    return KrausChannel([u])


def dephasing_channel(dim: int) -> KrausChannel:
    return KrausChannel(computational_povm(dim))


def apply_channel(ch: KrausChannel, rho: np.ndarray) -> np.ndarray:
    return hermitian_part(ch(rho))


def outcome_distribution(rho: np.ndarray, povm: Sequence[np.ndarray]) -> np.ndarray:
    """Outcome probabilities ``Tr(rho M_i)``, clamped to ``[0, 1]``."""
    rho = np.asarray(rho, dtype=complex)
    if any(m.shape != rho.shape for m in povm):
        raise DimensionMismatch("POVM and state dimensions differ")
    p = np.array([np.real(np.einsum("ij,ji->", rho, m)) for m in povm])
    return np.clip(p, 0.0, 1.0)


class ChannelFamily:
    """A channel ``Phi_theta`` depending on one real parameter.

    `apply(rho, theta)` must be linear in `rho`. If `derivative` is omitted,
    derivatives come from central differences with step `step`.
    """

    def __init__(
        self,
        apply: Callable[[np.ndarray, float], np.ndarray],
        in_dim: int,
        out_dim: int | None = None,
        derivative: Callable[[np.ndarray, float], np.ndarray] | None = None,
        domain: tuple[float, float] = (-math.inf, math.inf),
        step: float = FD_STEP,
        kraus: Callable[[float], KrausChannel] | None = None,
        name: str = "family",
        meta: dict | None = None,
        second_derivative: Callable[[np.ndarray, float], np.ndarray] | None = None,
    ):
        self._apply = apply
        self._derivative = derivative
        self._second = second_derivative
        self.in_dim = in_dim
        self.out_dim = in_dim if out_dim is None else out_dim
        self.domain = (float(domain[0]), float(domain[1]))
        self.step = step
        self._kraus = kraus
        self.name = name
        self.meta = dict(meta or {})

    @property
    def has_analytic_derivative(self) -> bool:
        return self._derivative is not None

    def _check(self, theta: float) -> None:
        lo, hi = self.domain
        if not (lo - 1e-15 <= theta <= hi + 1e-15):
            raise OutOfDomain(f"theta={theta} outside {self.domain}")

    def output(self, rho: np.ndarray, theta: float) -> np.ndarray:
        self._check(theta)
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (self.in_dim, self.in_dim):
            raise DimensionMismatch(f"family expects dim {self.in_dim}, got {rho.shape}")
        return self._apply(rho, theta)

    def kraus_at(self, theta: float) -> KrausChannel:
        if self._kraus is None:
            raise NotImplementedError(f"{self.name} has no explicit Kraus form")
        self._check(theta)
        return self._kraus(theta)

    def derivative(self, rho: np.ndarray, theta: float, mode: str = "auto") -> np.ndarray:
        if mode == "auto":
            mode = "analytic" if self._derivative is not None else "fd"
        if mode == "analytic":
            if self._derivative is None:
                raise NotImplementedError(f"{self.name} has no analytic derivative")
            self._check(theta)
            return self._derivative(np.asarray(rho, dtype=complex), theta)
        h = self.step
        lo, hi = self.domain
        if theta - h < lo or theta + h > hi:
            raise OutOfDomain(f"finite difference at theta={theta} leaves {self.domain}")
        return (self.output(rho, theta + h) - self.output(rho, theta - h)) / (2 * h)

    def second_derivative(self, rho: np.ndarray, theta: float) -> np.ndarray:
        """d^2/dtheta^2 of ``Phi_theta(rho)``; analytic if supplied, else differences of the first derivative."""
        self._check(theta)
        if self._second is not None:
            return self._second(np.asarray(rho, dtype=complex), theta)
        h = self.step
        lo, hi = self.domain
        a, b = max(lo, theta - h), min(hi, theta + h)
        if b <= a:
            raise OutOfDomain(f"no room for a difference at theta={theta} in {self.domain}")
        return (self.derivative(rho, b) - self.derivative(rho, a)) / (b - a)

    def observable(self, effect: np.ndarray, theta: float, derivative: bool = False) -> np.ndarray:
        """Hermitian A with ``Tr(A rho) = Tr(effect Phi_theta(rho))`` (or its theta-derivative).

        Built by probing the linear map with matrix units.
        """
        d = self.in_dim
        a = np.zeros((d, d), dtype=complex)
        for i in range(d):
            for j in range(d):
                e = np.zeros((d, d), dtype=complex)
                e[i, j] = 1
                out = self.derivative(e, theta) if derivative else self._apply(e, theta)
                a[j, i] = np.einsum("ij,ji->", effect, out)
        return hermitian_part(a)


def family_derivative(fam: ChannelFamily, rho: np.ndarray, theta: float, mode: str = "auto") -> np.ndarray:
    """d/dtheta of ``Phi_theta(rho)``; analytic when the family supplies it."""
    return hermitian_part(fam.derivative(rho, theta, mode=mode))


def unitary_family(g) -> ChannelFamily:
    """``rho -> U rho U^dag`` with ``U = exp(-i theta G)``."""
    g = check_hermitian(g)
    d = g.shape[0]
    w, v = np.linalg.eigh(g)

    def unitary(theta):
        return (v * np.exp(-1j * theta * w)) @ v.conj().T

    def apply(rho, theta):
        u = unitary(theta)
        return u @ rho @ u.conj().T

    def deriv(rho, theta):
        return -1j * commutator(g, apply(rho, theta))

    def deriv2(rho, theta):
        return -commutator(g, commutator(g, apply(rho, theta)))

    return ChannelFamily(
        apply, d, derivative=deriv, kraus=lambda t: KrausChannel([unitary(t)]),
        name="unitary", meta={"generator": g}, second_derivative=deriv2,
    )


def kraus_family(kraus_at: Callable[[float], Sequence], in_dim: int, out_dim: int | None = None,
                 domain=(-math.inf, math.inf), step: float = FD_STEP) -> ChannelFamily:
    """Family from a function returning Kraus operators; derivatives by finite differences."""

    def channel(theta):
        return KrausChannel(kraus_at(theta))

    return ChannelFamily(lambda rho, t: channel(t)(rho), in_dim, out_dim, domain=domain, step=step,
                         kraus=channel, name="kraus")


def constant_family(ch: KrausChannel) -> ChannelFamily:
    return ChannelFamily(lambda rho, t: ch(rho), ch.in_dim, ch.out_dim,
                         derivative=lambda rho, t: np.zeros((ch.out_dim, ch.out_dim), dtype=complex),
                         kraus=lambda t: ch, name="constant")


def mixture_family(ch0: KrausChannel, ch1: KrausChannel) -> ChannelFamily:
    """``(1 - theta) ch0 + theta ch1`` on ``theta in [0, 1]``."""
    if (ch0.in_dim, ch0.out_dim) != (ch1.in_dim, ch1.out_dim):
        raise DimensionMismatch("mixed channels must share dimensions")

    def kraus(t):
        return KrausChannel([np.sqrt(1 - t) * k for k in ch0.kraus_ops]
                            + [np.sqrt(t) * k for k in ch1.kraus_ops], check=False)

    return ChannelFamily(lambda rho, t: (1 - t) * ch0(rho) + t * ch1(rho), ch0.in_dim, ch0.out_dim,
                         derivative=lambda rho, t: ch1(rho) - ch0(rho), domain=(0.0, 1.0),
                         kraus=kraus, name="mixture")


def bernoulli_family() -> ChannelFamily:
    """Replacement channel ``rho -> Tr(rho) diag(theta, 1 - theta)`` on ``[0, 1]``."""

    def apply(rho, t):
        return np.trace(rho) * np.diag([t, 1 - t]).astype(complex)

    def deriv(rho, t):
        return np.trace(rho) * np.diag([1.0, -1.0]).astype(complex)

    return ChannelFamily(apply, 2, 2, derivative=deriv, domain=(0.0, 1.0), name="bernoulli")


@dataclass
class EstimationTask:
    """A channel family, a measurement on its output, and the evaluation point."""

    family: ChannelFamily
    povm: list
    theta: float = 0.0
    descriptor: dict = field(default_factory=dict)

    def __post_init__(self):
        self.povm = validate_povm(self.povm)
        if self.povm[0].shape[0] != self.family.out_dim:
            raise DimensionMismatch(
                f"POVM acts on dim {self.povm[0].shape[0]}, family outputs dim {self.family.out_dim}")

    @property
    def is_binary(self) -> bool:
        return len(self.povm) == 2

    def statistics(self, rho: np.ndarray, theta: float | None = None) -> tuple[np.ndarray, np.ndarray]:
        """Outcome probabilities and their theta-derivatives at `theta` (default: eval point)."""
        t = self.theta if theta is None else theta
        out = self.family.output(rho, t)
        dout = self.family.derivative(rho, t)
        p = np.array([np.real(np.einsum("ij,ji->", out, m)) for m in self.povm])
        dp = np.array([np.real(np.einsum("ij,ji->", dout, m)) for m in self.povm])
        return p, dp

    def curvature(self, rho: np.ndarray, theta: float | None = None) -> np.ndarray:
        """Second theta-derivatives of the outcome probabilities."""
        t = self.theta if theta is None else theta
        d2 = self.family.second_derivative(rho, t)
        return np.array([np.real(np.einsum("ij,ji->", d2, m)) for m in self.povm])
