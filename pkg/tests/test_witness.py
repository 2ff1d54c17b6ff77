import math

import numpy as np
import pytest

from fisherwit import errors
from fisherwit.fisher import classical_fisher
from fisherwit.freesets import BlochBall, Incoherent, PolytopeHull, Separable, Singleton, hemisphere
from fisherwit.linalg import PAULI_X, PAULI_Y, PAULI_Z, from_bloch, projector
from fisherwit.reproduce import worked_example_task
from fisherwit.robustness import generalized_robustness, optimal_witness
from fisherwit.states import (EstimationTask, constant_family, dephasing_channel, identity_channel,
                              unitary_channel, unitary_family)
from fisherwit.witness import (build_discrimination_task, existence_task, existence_tower, n_c, n_q,
                               nc_from_witness, nc_upper_bound_binary, omega)
from oracles import rand_herm, rand_pure, rand_state

PLUS = np.full((2, 2), 0.5, dtype=complex)
ZERO = np.diag([1.0, 0.0]).astype(complex)
BELL = projector(np.array([1, 0, 0, 1]) / math.sqrt(2))


def test_nc_worked_example():
    rep = n_c(worked_example_task(), ZERO, hemisphere())
    assert abs(rep.n_value - 1 / 6) < 1e-9
    assert abs(rep.n_value - (rep.resource_value - rep.free_max)) < 1e-12
    assert rep.normalized


def test_nc_free_state_nonpositive():
    rep = n_c(worked_example_task(), projector([1, -1]) / 2, hemisphere())
    assert rep.n_value <= 1e-12


def test_nq_examples():
    fam = unitary_family(PAULI_Z)
    rep = n_q(fam, PLUS, Singleton(ZERO))
    assert abs(rep.n_value - 4) < 1e-9
    # no state beats the hemisphere under sigma_z rotations
    for rho in (PLUS, ZERO, from_bloch([0.3, 0.4, 0.5])):
        assert n_q(fam, rho, hemisphere()).n_value <= 1e-9


def test_discrimination_task_oracle_values():
    w = np.eye(2) + PAULI_X
    F = Incoherent(2)
    task = build_discrimination_task(w, F)
    assert abs(classical_fisher(task, PLUS) - 1) < 1e-8
    for sigma in (ZERO, np.eye(2) / 2, np.diag([0.3, 0.7])):
        assert classical_fisher(task, sigma) < 1e-12
    om = omega(task, PLUS)
    c, q = task.descriptor["scale"], task.descriptor["reference"]
    assert abs(om - c * abs(np.real(np.trace(w @ PLUS)) / 2 - q)) < 1e-12


def test_discrimination_task_cfi_formula(rng):
    # F_C(tau) = [Tr(W tau) - Tr(W sigma0)]^2 for any probe
    F = PolytopeHull([ZERO, PLUS, np.eye(2) / 2])
    for _ in range(10):
        rho = rand_state(rng, 2)
        r, wit = generalized_robustness(rho, F)
        task = build_discrimination_task(wit, F)
        for tau in (rand_state(rng, 2), rand_pure(rng, 2)):
            expected = (wit.value(tau) - wit.free_min) ** 2
            assert abs(classical_fisher(task, tau) - expected) < 1e-8


def test_task_normalized(rng):
    for F in (Incoherent(2), BlochBall(0.5), Incoherent(3)):
        rho = rand_state(rng, F.dim)
        rep = nc_from_witness(rho, F)
        assert rep.free_max <= 1 + 1e-9 and rep.normalized


def test_zero_branch_regularized_and_literal():
    F = Separable((2, 2))
    wit = optimal_witness(BELL, F)
    assert abs(wit.free_min) < 1e-7
    task = build_discrimination_task(wit, F)
    assert task.descriptor["branch"] == "zero-regularized"
    assert abs(classical_fisher(task, BELL) - 4) < 1e-8
    lit = build_discrimination_task(wit, F, zero_branch="literal")
    assert classical_fisher(lit, BELL) == math.inf
    assert "divergent-cfi" in n_c(lit, BELL, F).flags


def test_infeasible_witness():
    with pytest.raises(errors.InfeasibleWitness):
        build_discrimination_task(2 * np.eye(2), Incoherent(2))
    with pytest.raises(errors.InfeasibleWitness):
        build_discrimination_task(PAULI_Z, Incoherent(2))


def test_explicit_kraus_matches_generator(rng):
    F = Incoherent(2)
    task = build_discrimination_task(np.eye(2) + PAULI_X, F)
    fam = task.family
    tau = rand_state(rng, 2)
    for t in (0.0, 0.3, 1.0):
        assert np.allclose(fam.kraus_at(t)(tau), fam.output(tau, t), atol=1e-12)


def test_nc_from_witness_examples():
    rep = nc_from_witness(PLUS, Incoherent(2))
    assert abs(rep.n_value - 1) < 1e-6 and np.allclose(rep.bounds, (1, 3), atol=1e-6)
    rep = nc_from_witness(np.eye(2) / 2, Incoherent(2))
    assert abs(rep.n_value) < 1e-9
    rep = nc_from_witness(BELL, Separable((2, 2)))
    assert abs(rep.n_value - 3) < 1e-6


def test_nc_from_witness_infinite():
    rep = nc_from_witness(PLUS, Singleton(ZERO))
    assert rep.n_value == math.inf and "infinite-robustness" in rep.flags


def test_existence_task_matches_tower(rng):
    # game: guess which of identity / bit flip acted, measuring |0><0| / |1><1|
    channels = (identity_channel(2), unitary_channel(PAULI_X))
    effects = (np.diag([0.9, 0.1]), np.diag([0.1, 0.9]))
    F = Incoherent(2)
    task = existence_task(channels, effects, F)
    assert task.descriptor["branch"] == "generic"
    sigma0 = task.descriptor["sigma0"]
    for _ in range(5):
        tau = rand_state(rng, 2)
        for t in (0.0, 0.4, 1.0):
            p_gen = task.family.output(tau, t)[0, 0].real
            p_tow = existence_tower(tau, t, channels, effects, sigma0)[0, 0].real
            assert abs(p_gen - p_tow) < 1e-12


def test_existence_task_detects_coherence():
    # Hadamard-conjugated dephasing game rewards coherence
    h = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    channels = (unitary_channel(h), unitary_channel(h @ PAULI_Z))
    effects = (ZERO, np.diag([0.0, 1.0]))
    F = Incoherent(2)
    task = existence_task(channels, effects, F)
    assert n_c(task, PLUS, F).n_value > 1e-9
    assert n_c(task, np.diag([0.2, 0.8]), F).n_value <= 1e-9


def test_omega_constant_family_zero():
    task = EstimationTask(constant_family(dephasing_channel(2)), [ZERO, np.diag([0.0, 1.0])])
    assert omega(task, PLUS) == 0
    with pytest.raises(errors.NotBinary):
        omega(EstimationTask(unitary_family(np.diag([1.0, 0, -1])), [np.diag(e) for e in np.eye(3)]),
              np.eye(3) / 3)


def test_omega_sign_invariant():
    t1 = EstimationTask(unitary_family(PAULI_Y), [ZERO, np.diag([0.0, 1.0])])
    t2 = EstimationTask(unitary_family(-PAULI_Y), [ZERO, np.diag([0.0, 1.0])])
    assert abs(omega(t1, PLUS) - omega(t2, PLUS)) < 1e-15 and omega(t1, PLUS) > 0


def test_bounds_omega_zero_and_ordering(rng):
    F = BlochBall(0.5)
    task = EstimationTask(constant_family(dephasing_channel(2)), [ZERO, np.diag([0.0, 1.0])])
    b = nc_upper_bound_binary(task, PLUS, F)
    assert b.tight == b.loose == b.r
    task = EstimationTask(unitary_family(rand_herm(rng, 2)), [ZERO, np.diag([0.0, 1.0])])
    b = nc_upper_bound_binary(task, rand_pure(rng, 2), F)
    assert b.tight <= b.loose + 1e-10 and b.tight <= b.corrected + 1e-12


def test_bounds_vacuous_for_infinite_standard_robustness():
    task = EstimationTask(unitary_family(PAULI_Y), [ZERO, np.diag([0.0, 1.0])])
    b = nc_upper_bound_binary(task, PLUS, Incoherent(2))
    assert b.tight == b.loose == b.r and "vacuous-infinite-standard-robustness" in b.flags


def test_stated_bound_holds_on_witness_tasks(rng):
    # tasks built from the robustness witness keep the free gains nonnegative, and the
    # stated bound holds there
    F = BlochBall(0.5)
    for _ in range(10):
        rho = rand_pure(rng, 2)
        _, wit = generalized_robustness(rho, F)
        task = build_discrimination_task(wit, F)
        b = nc_upper_bound_binary(task, rho, F)
        assert n_c(task, rho, F).n_value <= b.tight + 1e-8


def test_stated_bound_counterexample():
    # rotation about y, measured in z, probe |+>, free ball of radius 1/2
    task = EstimationTask(unitary_family(PAULI_Y / 2), [ZERO, np.diag([0.0, 1.0])])
    F = BlochBall(0.5)
    b = nc_upper_bound_binary(task, PLUS, F)
    n = n_c(task, PLUS, F).n_value
    assert abs(n - 0.75) < 1e-7 and abs(b.tight - 5 / 9) < 1e-9
    assert n > b.tight
    assert n <= b.corrected + 1e-8


def test_corrected_bound_random_tasks(rng):
    F = BlochBall(0.5)
    for _ in range(25):
        p = rand_state(rng, 2) * rng.uniform()
        task = EstimationTask(unitary_family(rand_herm(rng, 2)), [p, np.eye(2) - p])
        rho = rand_pure(rng, 2)
        assert n_c(task, rho, F).n_value <= nc_upper_bound_binary(task, rho, F).corrected + 1e-8


def test_measurement_dominance(rng):
    # the SLD measurement makes N_C reach N_Q
    from fisherwit.fisher import sld_measurement
    F = BlochBall(0.5)
    for _ in range(5):
        fam = unitary_family(rand_herm(rng, 2))
        rho = rand_pure(rng, 2)
        m = sld_measurement(fam.output(rho, 0.0), fam.derivative(rho, 0.0))
        nc = n_c(EstimationTask(fam, m), rho, F).n_value
        assert nc >= n_q(fam, rho, F).n_value - 1e-7
