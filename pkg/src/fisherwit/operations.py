"""Fisher-information witnesses for resourceful quantum operations.

A channel Xi is compared against a finite list of free channels (the extreme points
of the free operations) through a discrimination game ``{p_i, rho_i}, {pi_i}`` with
success ``p_succ(L) = sum_i p_i Tr[(1 (x) L)(rho_i) pi_i]``. The probe trajectory mixes
the Xi branch with the worst free channel Omega_0, so the first-outcome statistic is
``theta p_succ(Xi) + (1 - theta) p_succ(Omega_0)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, EmptyFreeOps, NumericalFailure
from .fisher import binary_cfi, cfi_from_statistics
from .linalg import PAULI_X
from .states import KrausChannel, dephasing_channel, identity_channel, unitary_channel, validate_state

PROB_TOL = 1e-10
TIE_TOL = 1e-12
EXPLICIT_MAX_DIM = 8


@dataclass
class OperationGame:
    ensemble: list
    povms: list
    free_ops: list
    ancilla_dim: int = 1

    def __post_init__(self):
        self.ensemble = [(float(p), validate_state(r)) for p, r in self.ensemble]
        probs = np.array([p for p, _ in self.ensemble])
        if np.any(probs < 0) or abs(probs.sum() - 1) > PROB_TOL:
            raise ValueError(f"ensemble probabilities must be nonnegative and sum to 1, got {probs.sum()}")
        if len(self.povms) != len(self.ensemble):
            raise ValueError("one POVM element per ensemble member is required")
        checked = []
        for e in self.povms:
            e = np.asarray(e, dtype=complex)
            if np.linalg.eigvalsh((e + e.conj().T) / 2)[0] < -1e-9:
                raise ValueError("POVM elements must be positive semidefinite")
            checked.append((e + e.conj().T) / 2)
        self.povms = checked
        dims = {r.shape[0] for _, r in self.ensemble}
        if len(dims) != 1 or dims.pop() % self.ancilla_dim:
            raise DimensionMismatch("ensemble states must share one dimension divisible by the ancilla")

    @property
    def system_dim(self) -> int:
        return self.ensemble[0][1].shape[0] // self.ancilla_dim


def _extend(ch: KrausChannel, game: OperationGame) -> KrausChannel:
    if ch.in_dim != game.system_dim:
        raise DimensionMismatch(f"channel acts on dim {ch.in_dim}, game system has dim {game.system_dim}")
    return ch.tensor_identity(game.ancilla_dim) if game.ancilla_dim > 1 else ch


def op_psucc(ch: KrausChannel, game: OperationGame) -> float:
    ext = _extend(ch, game)
    total = sum(p * np.real(np.trace(ext(r) @ e)) for (p, r), e in zip(game.ensemble, game.povms))
    return float(total)


@dataclass
class OpGap:
    cfi_target: float
    cfi_free_max: float
    gap: float
    p_target: float
    p_reference: float
    reference_index: int
    flags: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"cfi_target": self.cfi_target, "cfi_free_max": self.cfi_free_max, "gap": self.gap,
                "p_succ_target": self.p_target, "p_succ_reference": self.p_reference,
                "reference_index": self.reference_index, "flags": list(self.flags)}


def trajectory_statistics(p_target: float, p_ref: float, theta: float) -> tuple[np.ndarray, np.ndarray]:
    p0 = theta * p_target + (1 - theta) * p_ref
    d = p_target - p_ref
    return np.array([p0, 1 - p0]), np.array([d, -d])


def channel_nc_gap(xi: KrausChannel, game: OperationGame) -> OpGap:
    """Fisher information at theta = 0 for Xi, its maximum over the free channels, and the difference."""
    if not game.free_ops:
        raise EmptyFreeOps("at least one free operation is required")
    free_p = np.array([op_psucc(o, game) for o in game.free_ops])
    ref = int(np.flatnonzero(free_p <= free_p.min() + TIE_TOL)[0])
    p_ref = float(free_p[ref])
    p_xi = op_psucc(xi, game)

    def cfi(p):
        # success probabilities within TIE_TOL of the reference carry no signal
        return cfi_from_statistics(*trajectory_statistics(p_ref if abs(p - p_ref) <= TIE_TOL else p, p_ref, 0.0))

    target = cfi(p_xi)
    closed = binary_cfi(p_ref, p_xi - p_ref)
    if math.isfinite(closed) and abs(target - closed) > 1e-8 * max(1.0, closed):
        raise NumericalFailure(f"trajectory CFI {target} disagrees with closed form {closed}")
    # the CFI is convex in p_succ, so its maximum over the hull sits on a listed channel
    free_max = max(cfi(p) for p in free_p)
    flags = []
    if min(p_ref, 1 - p_ref) <= 1e-12:
        flags.append("divergent-cfi")
    gap = target - free_max if not (math.isinf(target) and math.isinf(free_max)) else math.nan
    return OpGap(target, free_max, gap, p_xi, p_ref, ref, flags)


def explicit_trajectory_probability(xi: KrausChannel, reference: KrausChannel, game: OperationGame,
                                    theta: float) -> float:
    """First-outcome probability from the full label (x) flag (x) ancilla (x) system construction.

    The flag-0 branch is sent through Xi and the flag-1 branch through the reference
    channel by one controlled channel; only for ``ancilla * system <= 8``.
    """
    dim = game.ensemble[0][1].shape[0]
    if dim > EXPLICIT_MAX_DIM:
        raise ValueError(f"explicit construction limited to dimension {EXPLICIT_MAX_DIM}")
    n = len(game.ensemble)
    a, b = _extend(xi, game), _extend(reference, game)
    eye_n = np.eye(n)
    flags = [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])]
    weights = [theta, 1 - theta]
    state = sum(p * weights[f] * np.kron(np.kron(np.outer(eye_n[i], eye_n[i]), flags[f]), r)
                for i, (p, r) in enumerate(game.ensemble) for f in range(2))
    kraus = [np.kron(np.kron(eye_n, flags[0]), k) for k in a.kraus_ops]
    kraus += [np.kron(np.kron(eye_n, flags[1]), k) for k in b.kraus_ops]
    out = sum(k @ state @ k.conj().T for k in kraus)
    effect = sum(np.kron(np.kron(np.outer(eye_n[i], eye_n[i]), np.eye(2)), e) for i, e in enumerate(game.povms))
    return float(np.real(np.trace(out @ effect)))


def hadamard_game() -> OperationGame:
    """``|+>, |->`` with equal weights, guessed by ``|0>, |1>``; free ops identity, dephasing, bit flip."""
    plus = np.full((2, 2), 0.5, dtype=complex)
    minus = np.array([[0.5, -0.5], [-0.5, 0.5]], dtype=complex)
    return OperationGame([(0.5, plus), (0.5, minus)], [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])],
                         [identity_channel(2), dephasing_channel(2), unitary_channel(PAULI_X)])


def hadamard_channel() -> KrausChannel:
    return unitary_channel(np.array([[1, 1], [1, -1]]) / math.sqrt(2))


def mix_channels(channels: Sequence[KrausChannel], weights: Sequence[float]) -> KrausChannel:
    """Convex combination as a channel with rescaled Kraus operators."""
    ops = []
    for ch, w in zip(channels, weights):
        if w < 0:
            raise ValueError("mixture weights must be nonnegative")
        ops += [math.sqrt(w) * k for k in ch.kraus_ops]
    return KrausChannel(ops)
