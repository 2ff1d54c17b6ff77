"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the verdict lines.
"""

import math

import numpy as np

from fisherwit.cli import run
from fisherwit.criterion import criterion_objective, criterion_sdp
from fisherwit.fisher import (cfi_from_statistics, classical_fisher, generator_extremal_state, quantum_fisher, quantum_fisher_family,
                              quantum_fisher_unitary, sld, variance)
from fisherwit.freesets import BlochBall, Incoherent, Separable, Singleton, hemisphere
from fisherwit.linalg import PAULI_Z, projector
from fisherwit.operations import channel_nc_gap, hadamard_channel, hadamard_game, mix_channels
from fisherwit.reproduce import worked_example_closed_form, worked_example_task
from fisherwit.robustness import generalized_robustness, standard_robustness
from fisherwit.states import EstimationTask, unitary_family
from fisherwit.witness import n_c, n_q, nc_from_witness, nc_upper_bound_binary
from oracles import (ball_robustness_geometry, coherence_robustness_bruteforce, rand_herm, rand_povm, rand_pure,
                     rand_state)
from test_properties import random_incoherent_channel

ZERO = projector([1, 0])
ONE = projector([0, 1])
PLUS = projector([1, 1]) / 2
MINUS = projector([1, -1]) / 2


def verdict(number, title, ok, detail=""):
    print(f"\nACCEPTANCE {number:2d} {title}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())
    assert ok, detail


def test_acceptance_01_worked_example():
    task = worked_example_task()
    grid = np.linspace(0, 2 * math.pi, 100)
    curve_err = max(abs(classical_fisher(task, projector([math.cos(t / 2), math.sin(t / 2)]))
                        - worked_example_closed_form(t)) for t in grid)
    f0, fp = classical_fisher(task, ZERO), classical_fisher(task, PLUS)
    nc = n_c(task, ZERO, hemisphere()).n_value
    analytic = f0 - max(classical_fisher(task, PLUS), classical_fisher(task, MINUS))
    ok = (curve_err <= 1e-9 and abs(f0 - 0.5) <= 1e-9 and abs(fp - 1 / 3) <= 1e-9
          and abs(nc - 1 / 6) <= 1e-3 and abs(analytic - 1 / 6) <= 1e-9)
    verdict(1, "worked example", ok, f"curve_err={curve_err:.1e} N_C={nc:.12f} analytic={analytic:.12f}")


def test_acceptance_02_coherence_criterion():
    errs = []
    ok = True
    for s in (ZERO, ONE):
        res = criterion_sdp(PAULI_Z, Singleton(s))
        errs.append(abs(res.s_star))
        ok &= abs(res.s_star) <= 1e-7 and res.certified and abs(res.gap_sq - 4) <= 1e-12
    verdict(2, "coherence criterion", ok, f"|s*|={max(errs):.1e}")


def test_acceptance_03_witness_sandwich():
    rng = np.random.default_rng(20240611)
    worst_affine = worst_oracle = 0.0
    ok = True
    for _ in range(50):
        v = rng.normal(size=3)
        v *= rng.uniform() ** (1 / 3) / np.linalg.norm(v)
        rho = 0.5 * (np.eye(2) + v[0] * np.array([[0, 1], [1, 0]]) + v[1] * np.array([[0, -1j], [1j, 0]])
                     + v[2] * PAULI_Z)
        rep = nc_from_witness(rho, Incoherent(2))
        r = rep.task_descriptor["robustness"]
        worst_affine = max(worst_affine, abs(rep.n_value - r * r))
        worst_oracle = max(worst_oracle, abs(r - coherence_robustness_bruteforce(rho, n_phase=512, n_diag=3)))
        rep = nc_from_witness(rho, BlochBall(0.5))
        lo, hi = rep.bounds
        ok &= lo - 1e-6 <= rep.n_value <= hi + 1e-6
    ok &= worst_affine <= 1e-6 and worst_oracle <= 1e-6
    verdict(3, "witness sandwich", ok, f"affine_err={worst_affine:.1e} oracle_err={worst_oracle:.1e}")


def test_acceptance_04_entanglement_tightness():
    rep = nc_from_witness(projector([1, 0, 0, 1]) / 2, Separable((2, 2)))
    r = rep.task_descriptor["robustness"]
    ok = abs(r - 1) <= 1e-6 and abs(rep.n_value - 3) <= 1e-6 and abs(rep.n_value - (r * r + 2 * r)) <= 1e-6
    verdict(4, "entanglement tightness", ok, f"R={r:.9f} N_C={rep.n_value:.9f}")


def test_acceptance_05_robustness_oracles():
    rng = np.random.default_rng(5)
    r_plus = generalized_robustness(PLUS, Incoherent(2))[0]
    e1 = abs(r_plus - 1) + abs(r_plus - coherence_robustness_bruteforce(PLUS))
    psi = rand_pure(rng, 2)
    r = generalized_robustness(psi, BlochBall(0.5))[0]
    rs = standard_robustness(psi, BlochBall(0.5))
    e2 = abs(r - 1 / 3) + abs(r - ball_robustness_geometry(psi, 0.5))
    e3 = abs(rs - 0.5) + abs(rs - ball_robustness_geometry(psi, 0.5, standard=True))
    rs_inf = standard_robustness(PLUS, Incoherent(2))
    ok = e1 <= 1e-7 and e2 <= 1e-7 and e3 <= 1e-7 and rs_inf == math.inf
    verdict(5, "robustness oracles", ok, f"errs={e1:.1e},{e2:.1e},{e3:.1e} R_S(+)={rs_inf}")


def test_acceptance_06_binary_task_bounds():
    # implemented as stated; the stated bound is expected to fail on generic tasks
    rng = np.random.default_rng(6)
    F = BlochBall(0.5)
    violations, worst, order_bad = 0, 0.0, 0
    for _ in range(100):
        p = rand_state(rng, 2) * rng.uniform()
        task = EstimationTask(unitary_family(rand_herm(rng, 2)), [p, np.eye(2) - p])
        rho = rand_pure(rng, 2)
        n = n_c(task, rho, F).n_value
        b = nc_upper_bound_binary(task, rho, F)
        if n > b.tight + 1e-8:
            violations += 1
            worst = max(worst, n - b.tight)
        order_bad += b.tight > b.loose + 1e-10
    ok = violations == 0 and order_bad == 0
    verdict(6, "binary task bounds", ok, f"violations={violations}/100 worst_excess={worst:.3f} order_bad={order_bad}")


def test_acceptance_07_fisher_core():
    rng = np.random.default_rng(7)
    worst = -math.inf
    for _ in range(1000):
        d = int(rng.integers(2, 4))
        fam = unitary_family(rand_herm(rng, d))
        rho = rand_state(rng, d, rank=int(rng.integers(1, d + 1)))
        task = EstimationTask(fam, rand_povm(rng, d, int(rng.integers(2, 5))))
        worst = max(worst, classical_fisher(task, rho) - quantum_fisher_family(fam, rho))
    sld_res = 0.0
    for _ in range(50):
        d = int(rng.integers(2, 5))
        rho = rand_state(rng, d, rank=int(rng.integers(1, d + 1)))
        g = rand_herm(rng, d)
        drho = -1j * (g @ rho - rho @ g)
        dd = sld(rho, drho)
        w, v = np.linalg.eigh(rho)
        supp = v[:, w > 1e-12]
        res = supp.conj().T @ (rho @ dd + dd @ rho - 2 * drho) @ supp
        sld_res = max(sld_res, float(np.abs(res).max()))
    sat = 0.0
    for _ in range(50):
        # diagonal state moving along a diagonal direction, measured in its eigenbasis
        rho = np.diag(rng.dirichlet(np.ones(3))).astype(complex)
        delta = rng.normal(size=3)
        delta -= delta.mean()
        cfi = cfi_from_statistics(np.real(np.diag(rho)), delta)
        sat = max(sat, abs(cfi - quantum_fisher(rho, np.diag(delta).astype(complex))))
    var_err = 0.0
    for _ in range(50):
        d = int(rng.integers(2, 5))
        g, psi = rand_herm(rng, d), rand_pure(rng, d)
        var_err = max(var_err, abs(quantum_fisher_unitary(psi, g) - 4 * variance(psi, g)))
    gap_err = 0.0
    for _ in range(50):
        g = rand_herm(rng, int(rng.integers(2, 5)))
        lam = np.linalg.eigvalsh(g)
        gap_err = max(gap_err, abs(quantum_fisher_unitary(generator_extremal_state(g), g) - (lam[-1] - lam[0]) ** 2))
    ok = worst <= 1e-8 and sld_res <= 1e-8 and sat <= 1e-8 and var_err <= 1e-9 and gap_err <= 1e-8
    verdict(7, "fisher core", ok,
            f"cfi-qfi={worst:.1e} sld_res={sld_res:.1e} sat={sat:.1e} var={var_err:.1e} gap={gap_err:.1e}")


def test_acceptance_08_operation_witness():
    rng = np.random.default_rng(8)
    game = hadamard_game()
    res = channel_nc_gap(hadamard_channel(), game)
    p0 = res.p_reference
    closed = (res.p_target - p0) ** 2 / (p0 * (1 - p0))
    worst_free = max(channel_nc_gap(mix_channels(game.free_ops, rng.dirichlet([1, 1, 1])), game).gap
                     for _ in range(100))
    ok = abs(res.gap - 1) <= 1e-9 and abs(res.cfi_target - closed) <= 1e-9 and worst_free <= 0
    verdict(8, "operation witness", ok, f"gap={res.gap:.12f} worst_free_gap={worst_free:.1e}")


def test_acceptance_09_criterion_soundness():
    rng = np.random.default_rng(9)
    res = criterion_sdp(PAULI_Z, BlochBall(1.0))
    c = criterion_objective(PAULI_Z)
    err = 0.0
    for _ in range(100):
        s = rand_state(rng, 2)
        err = max(err, abs(np.real(np.trace(c @ np.kron(s, s))) - 4 * variance(s, PAULI_Z)))
    ok = abs(res.s_star - 8) <= 1e-6 and not res.certified and err <= 1e-8
    verdict(9, "criterion soundness", ok, f"s*={res.s_star:.9f} objective_err={err:.1e}")


def test_acceptance_10_property_suites(capsys):
    rng = np.random.default_rng(10)
    convex_worst = -math.inf
    F = BlochBall(0.5)
    for i in range(500):
        g = rand_herm(rng, 2)
        fam = unitary_family(g)
        task = EstimationTask(fam, rand_povm(rng, 2, 2))
        a, b = rand_state(rng, 2), rand_state(rng, 2)
        t = rng.uniform()
        m = t * a + (1 - t) * b
        # the free-set term is common to all three states, so convexity reduces to the resource term
        nc = [classical_fisher(task, x) for x in (a, b, m)]
        nq = [quantum_fisher_unitary(x, g) for x in (a, b, m)]
        convex_worst = max(convex_worst, nc[2] - t * nc[0] - (1 - t) * nc[1], nq[2] - t * nq[0] - (1 - t) * nq[1])
        if i < 5:
            full = [n_c(task, x, F).n_value for x in (a, b, m)]
            fullq = [n_q(fam, x, F).n_value for x in (a, b, m)]
            convex_worst = max(convex_worst, full[2] - t * full[0] - (1 - t) * full[1],
                               fullq[2] - t * fullq[0] - (1 - t) * fullq[1])
    mono_worst = -math.inf
    for _ in range(200):
        rho = rand_state(rng, 2)
        ch = random_incoherent_channel(rng, 2)
        mono_worst = max(mono_worst, generalized_robustness(ch(rho), Incoherent(2))[0]
                         - generalized_robustness(rho, Incoherent(2))[0])
    outputs = []
    for _ in range(3):
        blob = []
        for name in ("worked-example", "coherence-criterion", "entanglement-tightness", "op-witness-hadamard",
                     "witness-sandwich"):
            assert run(["reproduce", name]) == 0
            blob.append(capsys.readouterr().out)
        outputs.append(blob)
    deterministic = outputs[0] == outputs[1] == outputs[2]
    ok = convex_worst <= 1e-9 and mono_worst <= 1e-7 and deterministic
    with capsys.disabled():
        verdict(10, "property suites", ok,
                f"convexity={convex_worst:.1e} monotonicity={mono_worst:.1e} deterministic={deterministic}")
