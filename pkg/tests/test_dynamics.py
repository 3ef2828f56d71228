"""转子状态、Lax 矩阵与 RK4 参照轨道"""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from common.errors import BlowUpDetected, LambdaZeroError, RegimeError
from curve import COMPACT, NONCOMPACT
from dynamics import (
    RotatorState, build_lax, commutator, evolve_state, exp_traceless, hamiltonian,
    hamiltonian_residual, integrate_lax, integrate_phase, matrix_exp, matrix_exp_taylor,
    modulus_ksq, omega_tilde, phase_at_times, rotation_period,
)
from special import elliptic_K

LAMBDAS = [np.exp(0.3j), 0.6 - 1.4j, 2.5 + 0.1j]


def test_initial_state_from_energy(compact_state, noncompact_state):
    assert_allclose(compact_state.momentum, math.sqrt(8.0))
    assert_allclose(compact_state.energy, 3.0)
    assert_allclose(noncompact_state.momentum, math.sqrt(8.0))
    assert_allclose(noncompact_state.energy, 3.0)
    with pytest.raises(RegimeError):
        RotatorState.from_energy(COMPACT, 1.0, -2.0, 0.0)
    with pytest.raises(ValueError):
        RotatorState("spherical", 1.0, 0.0, 1.0)


def test_modulus_and_period():
    assert_allclose(modulus_ksq(1.0, 3.0), 0.5)
    assert_allclose(omega_tilde(1.0, 3.0), math.sqrt(8.0))
    assert_allclose(rotation_period(1.0, 3.0), 2.0 * elliptic_K(0.5) / math.sqrt(8.0))
    with pytest.raises(RegimeError):
        rotation_period(1.0, 0.5)


@pytest.mark.parametrize("variant", [COMPACT, NONCOMPACT])
def test_hamiltonian_residue_form(variant):
    state = RotatorState(variant, 1.3, 0.4, 2.1)
    assert hamiltonian_residual(state) < 1e-10 * max(1.0, abs(state.energy))
    assert hamiltonian(state) == state.energy


@pytest.mark.parametrize("variant", [COMPACT, NONCOMPACT])
def test_lax_matrix_is_traceless_with_expected_determinant(variant):
    state = RotatorState(variant, 1.0, 0.3, 1.7)
    sign = -1.0 if variant == COMPACT else 1.0
    for lam in LAMBDAS:
        L = build_lax(state, lam).L
        assert abs(np.trace(L)) < 1e-14
        mu2 = state.a ** 2 * lam ** 2 + sign * 2.0 * state.energy + state.a ** 2 / lam ** 2
        assert_allclose(-np.linalg.det(L), mu2, rtol=1e-12)


def test_lambda_zero_rejected(compact_state):
    with pytest.raises(LambdaZeroError):
        build_lax(compact_state, 0.0)


@pytest.mark.parametrize("variant", [COMPACT, NONCOMPACT])
def test_lax_equation_by_finite_difference(variant):
    state = RotatorState(variant, 1.0, 0.2, 2.0)
    delta = 1e-4
    ahead = evolve_state(state, delta, delta)
    behind = RotatorState(variant, 1.0, state.angle, -state.momentum)
    behind = evolve_state(behind, delta, delta)
    behind = RotatorState(variant, 1.0, behind.angle, -behind.momentum)
    for lam in LAMBDAS:
        sample = build_lax(state, lam)
        derivative = (build_lax(ahead, lam).L - build_lax(behind, lam).L) / (2.0 * delta)
        expected = commutator(sample.L, sample.Mplus)
        assert_allclose(derivative, expected, atol=1e-6 * np.linalg.norm(expected))
        # M₊ 与 M₋ 给出同一条流
        assert_allclose(commutator(sample.L, sample.Mminus), expected, atol=1e-12 * np.linalg.norm(expected))


def test_lax_flow_is_isospectral(compact_state, period):
    run = integrate_lax(compact_state, LAMBDAS[1], period, 2e-3 * period)
    dets = [np.linalg.det(L) for L in run.matrices]
    assert max(abs(d - dets[0]) for d in dets) < 1e-8
    rebuilt = build_lax(run.states[-1], LAMBDAS[1]).L
    assert_allclose(run.matrices[-1], rebuilt, atol=1e-8)


@pytest.mark.parametrize("t", [1e-9, 0.05, 0.7, 2.0])
def test_matrix_exponential_closed_form(compact_state, t):
    for lam in LAMBDAS:
        L = build_lax(compact_state, lam).L
        closed = matrix_exp(compact_state, lam, t)
        reference = matrix_exp_taylor(L, t)
        assert_allclose(closed, reference, rtol=1e-10, atol=1e-12 * np.linalg.norm(reference))
        assert_allclose(np.linalg.det(closed), 1.0, rtol=1e-9)


def test_exp_traceless_at_zero_time():
    L = np.array([[0.3, 1.2], [-0.4, -0.3]], dtype=complex)
    assert_allclose(exp_traceless(L, 0.0), np.eye(2))


def test_rk4_conserves_energy(compact_state, period):
    run = integrate_phase(compact_state, 5.0 * period, period / 4000.0)
    energies = [run.state(i).energy for i in range(len(run.times))]
    assert max(abs(e - 3.0) for e in energies) < 1e-9


def test_rk4_rotation_is_periodic(compact_state, period):
    run = phase_at_times(compact_state, [0.5 * period, period], 1e-3 * period)
    assert_allclose(run.sin2()[0], 1.0, atol=1e-9)
    assert_allclose(run.sin2()[1], 0.0, atol=1e-9)
    assert_allclose(run.angles[1], math.pi, atol=1e-9)


def test_sample_times_must_increase(compact_state):
    with pytest.raises(ValueError):
        phase_at_times(compact_state, [0.2, 0.1], 1e-3)
    with pytest.raises(ValueError):
        integrate_phase(compact_state, 1.0, 0.0)


def test_noncompact_orbit_blows_up(noncompact_state, blowup_time):
    with pytest.raises(BlowUpDetected) as info:
        integrate_phase(noncompact_state, 2.0 * blowup_time, 1e-3)
    error = info.value
    assert error.kind == "blow-up-detected"
    assert error.bracket[0] <= error.blowup_time <= error.bracket[1]
    assert abs(error.blowup_time - blowup_time) < 1e-6
    assert error.trajectory is not None and len(error.trajectory.times) > 0


def test_noncompact_energy_before_blowup(noncompact_state, blowup_time):
    run = phase_at_times(noncompact_state, np.linspace(0.0, 0.9 * blowup_time, 10), 1e-4)
    for i in range(len(run.times)):
        assert abs(run.state(i).energy - 3.0) < 1e-8 * max(1.0, run.momenta[i] ** 2)
