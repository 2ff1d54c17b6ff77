"""Named, deterministic scenarios reproducing the reference results."""

from __future__ import annotations

import logging
import math

import numpy as np

from .criterion import criterion_sdp
from .errors import OutOfDomain
from .fisher import classical_fisher
from .freesets import BlochBall, Incoherent, Separable, Singleton, hemisphere
from .linalg import PAULI_Y, PAULI_Z, from_bloch, ket, projector
from .operations import channel_nc_gap, hadamard_channel, hadamard_game, op_psucc
from .states import EstimationTask, unitary_family
from .witness import n_c, nc_from_witness

log = logging.getLogger(__name__)

SANDWICH_SEED = 20240611


def emit_curve(task: EstimationTask, rho, grid) -> list[dict]:
    """Rows ``{theta, p0, cfi}``; grid points outside the family's domain are skipped."""
    rows = []
    for t in grid:
        try:
            p, _ = task.statistics(rho, float(t))
            f = classical_fisher(task, rho, float(t))
        except OutOfDomain as exc:
            log.warning("skipping theta=%s: %s", t, exc)
            continue
        rows.append({"theta": float(t), "p0": float(p[0]), "cfi": f})
    return rows


def worked_example_task() -> EstimationTask:
    """Rotation about y by ``sigma_y/2`` measured with ``{|0><0| + |1><1|/2, |1><1|/2}``."""
    m0 = np.diag([1.0, 0.5]).astype(complex)
    m1 = np.diag([0.0, 0.5]).astype(complex)
    return EstimationTask(unitary_family(PAULI_Y / 2), [m0, m1], descriptor={"family": "unitary sigma_y/2"})


def worked_example_closed_form(theta: float) -> float:
    return 2 * math.cos(theta / 2) ** 2 / (3 + math.cos(theta))


def worked_example() -> dict:
    task = worked_example_task()
    zero = projector([1, 0])
    plus = projector(ket(1, 1))
    rep = n_c(task, zero, hemisphere())
    grid = [0.0, math.pi / 4, math.pi / 2, 3 * math.pi / 4, math.pi]
    curve = emit_curve(task, zero, grid)
    for row in curve:
        row["closed_form"] = worked_example_closed_form(row["theta"])
    return {"scenario": "worked-example", "cfi_zero": classical_fisher(task, zero),
            "cfi_plus": classical_fisher(task, plus), "report": rep.to_dict(),
            "n_value": rep.n_value, "curve": curve}


def coherence_criterion() -> dict:
    out = {"scenario": "coherence-criterion"}
    for label, vec in (("zero", [1, 0]), ("one", [0, 1])):
        res = criterion_sdp(PAULI_Z, Singleton(projector(vec)))
        d = res.to_dict()
        d.pop("optimizer")
        out[label] = d
    out.update({k: out["zero"][k] for k in ("s_star", "gap_sq", "certified")})
    return out


def entanglement_tightness() -> dict:
    bell = np.zeros(4)
    bell[[0, 3]] = 1 / math.sqrt(2)
    rep = nc_from_witness(projector(bell), Separable((2, 2)))
    return {"scenario": "entanglement-tightness", "report": rep.to_dict(), "n_value": rep.n_value,
            "robustness": rep.task_descriptor["robustness"]}


def op_witness_hadamard() -> dict:
    game = hadamard_game()
    gap = channel_nc_gap(hadamard_channel(), game)
    return {"scenario": "op-witness-hadamard", "free_p_succ": [op_psucc(o, game) for o in game.free_ops],
            **gap.to_dict()}


def witness_sandwich(n: int = 50, seed: int = SANDWICH_SEED) -> dict:
    rng = np.random.default_rng(seed)
    rows = []
    for _ in range(n):
        v = rng.normal(size=3)
        v *= rng.uniform() ** (1 / 3) / np.linalg.norm(v)
        rho = from_bloch(v)
        for name, F in (("incoherent", Incoherent(2)), ("blochball", BlochBall(0.5))):
            rep = nc_from_witness(rho, F)
            rows.append({"free_set": name, "bloch": v.tolist(), "n_value": rep.n_value,
                         "lower": rep.bounds[0], "upper": rep.bounds[1]})
    return {"scenario": "witness-sandwich", "seed": seed, "rows": rows}


SCENARIOS = {
    "worked-example": worked_example,
    "coherence-criterion": coherence_criterion,
    "entanglement-tightness": entanglement_tightness,
    "op-witness-hadamard": op_witness_hadamard,
    "witness-sandwich": witness_sandwich,
}


def run_scenario(name: str) -> dict:
    if name not in SCENARIOS:
        raise ValueError(f"unknown scenario {name!r}; choose from {sorted(SCENARIOS)}")
    return SCENARIOS[name]()
