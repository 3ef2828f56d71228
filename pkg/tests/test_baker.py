"""Baker-Akhiezer 函数、恒等式与闭式解"""

import math
from dataclasses import replace

import numpy as np
import pytest
from numpy.testing import assert_allclose

from baker import (
    additive_constants, analytic_constant, ba_minus, ba_plus, build_context, canonical_margin,
    check_condition_b, check_cosid, check_sinid, default_context, default_divisor, expansion_coeffs,
    gamma_j, leading_coefficient, offdiag_value, richardson, solution_sin2, solution_sin2_theta,
    solution_sinh2, solution_sinh2_theta, solution_sn, time_scale,
)
from common.errors import (
    CanonicalWindowError, DegenerateDivisorError, IdentityViolation, PoleError, QuadratureError,
)
from curve import (
    COMPACT, NONCOMPACT, SurfacePoint, abel, build_curve, infinity_point, lattice_reduce, mu, zero_point,
)
from dynamics import RotatorState, phase_at_times


def test_context_constants(compact_ctx):
    ctx = compact_ctx
    assert ctx.physical
    assert ctx.gamma0 is not None
    assert ctx.dj[0] == 1.0
    assert_allclose(ctx.c0, 1j * math.pi + 0.5 * ctx.curve.B)
    for j in (0, 1):
        assert_allclose(ctx.c[j] + ctx.c0, ctx.c1 + ctx.cj[j])
    assert_allclose(ctx.alpha_j, (ctx.curve.alpha, -ctx.curve.alpha))
    assert check_condition_b(ctx.curve, ctx.AP, ctx.c0, ctx.cj) < 1e-6
    assert ctx.to_dict()['physical'] is True


def test_noncompact_context_is_physical(noncompact_ctx):
    assert noncompact_ctx.physical
    assert noncompact_ctx.gamma0 is not None


def test_default_divisor_without_state(compact_curve, noncompact_curve):
    ctx = build_context(compact_curve, check_expansion=False)
    assert ctx.gamma0 is None
    assert ctx.additive_constant is None
    assert_allclose(ctx.p1.lam, 1j * compact_curve.lplus)
    # 非紧情形 λ = i·l₊ 是分支点，顺延到下一个候选
    assert_allclose(default_divisor(noncompact_curve).lam, 2j * noncompact_curve.lplus)


@pytest.mark.parametrize("fixture", ["compact_ctx", "noncompact_ctx"])
def test_physical_divisor_at_half_period(request, fixture):
    ctx = request.getfixturevalue(fixture)
    c = ctx.curve
    assert abs(lattice_reduce(ctx.A1 - 1j * math.pi, c)) < 1e-12
    assert_allclose(ctx.p1.lam, c.rho * c.lplus)
    nearby = SurfacePoint(c.rho * (c.lplus + 1e-7j), 1)
    assert abs(lattice_reduce(abel(nearby, c) - 1j * math.pi, c)) < 1e-2


def test_explicit_divisor_at_branch_point_is_rejected(compact_curve, compact_state):
    with pytest.raises(DegenerateDivisorError):
        build_context(compact_curve, compact_state, p1=SurfacePoint(compact_curve.lminus, 1))


def test_explicit_divisor_without_state(compact_curve):
    ctx = build_context(compact_curve, p1=SurfacePoint(0.8 + 1.9j, 1), check_expansion=False)
    assert ctx.gamma0 is None
    assert ctx.dj == (1.0 + 0j, 1.0 + 0j)
    assert_allclose(leading_coefficient(2, 0.0, ctx), 1.0, rtol=1e-6)


@pytest.mark.parametrize("fixture", ["compact_ctx", "noncompact_ctx"])
@pytest.mark.parametrize("j", [1, 2])
def test_residue_normalization(request, fixture, j):
    ctx = request.getfixturevalue(fixture)
    scale = time_scale(ctx)
    for t in (0.0, 0.1 * scale, 0.2 * scale):
        assert_allclose(leading_coefficient(j, t, ctx), ctx.dj[j - 1], rtol=1e-8)


def test_no_monodromy(compact_ctx):
    c = compact_ctx.curve
    rng = np.random.default_rng(7)
    for _ in range(4):
        r = rng.uniform(2.5, 5.0) * c.lplus
        p = SurfacePoint(r * np.exp(1j * rng.uniform(-1.2, 1.2)), int(rng.choice([1, -1])))
        for j in (1, 2):
            up = ba_minus(j, p, 0.1, compact_ctx, sigma=1)
            down = ba_minus(j, p, 0.1, compact_ctx, sigma=-1)
            assert abs(up - down) < 1e-8 * abs(up)


def test_singularities(compact_ctx):
    rho = compact_ctx.curve.rho
    with pytest.raises(PoleError) as info:
        ba_minus(1, infinity_point(1, rho), 0.0, compact_ctx)
    assert info.value.kind == "pole-of-BA"
    with pytest.raises(PoleError) as info:
        ba_minus(2, zero_point(-1), 0.0, compact_ctx)
    assert info.value.kind == "pole-at-marked-point"
    with pytest.raises(ValueError):
        ba_minus(3, SurfacePoint(1.0 + 1.0j, 1), 0.0, compact_ctx)


def test_value_at_opposite_infinity(compact_ctx):
    rho = compact_ctx.curve.rho
    for j, k in ((1, 2), (2, 1)):
        value = ba_minus(j, infinity_point(k, rho), 0.2, compact_ctx)
        assert value == offdiag_value(j, 0.2, compact_ctx)
        far = ba_minus(j, SurfacePoint(1e6 * (1 + 1j), infinity_point(k, rho).sheet), 0.2, compact_ctx)
        assert_allclose(far, value, rtol=1e-5)


def test_plus_function_carries_exponential(compact_ctx):
    p = SurfacePoint(0.9 + 1.3j, -1)
    t = 0.15
    ratio = ba_plus(1, p, t, compact_ctx) / ba_minus(1, p, t, compact_ctx)
    assert_allclose(ratio, np.exp(-mu(p, compact_ctx.curve) * t), rtol=1e-12)


def test_expansion_leading_term(compact_ctx):
    psi0, psi1 = expansion_coeffs(2, 0.1, compact_ctx)
    assert_allclose(psi0, [0.0, compact_ctx.dj[1]])
    assert psi1[0] == offdiag_value(1, 0.1, compact_ctx)


@pytest.mark.parametrize("fixture", ["compact_ctx", "noncompact_ctx"])
def test_diagonal_and_offdiagonal_identities(request, fixture):
    ctx = request.getfixturevalue(fixture)
    scale = time_scale(ctx)
    times = [0.0, 0.1 * scale, 0.2 * scale]
    states = phase_at_times(ctx.state0, times, 1e-3 * scale)
    for i, t in enumerate(times):
        for j in (1, 2):
            assert check_cosid(t, ctx, j, states.state(i)) < 1e-5
            assert check_sinid(t, ctx, j, states.state(i)) < 1e-5


def test_compact_solution_triple_agreement(compact_ctx, period):
    times = np.linspace(0.0, period, 17)
    reference = phase_at_times(compact_ctx.state0, times, 1e-3 * period).sin2()
    for t, r in zip(times, reference):
        pipeline = solution_sin2(t, compact_ctx)
        closed = solution_sn(t, 1.0, 3.0)
        assert abs(pipeline - r) < 1e-6
        assert abs(closed - r) < 1e-6
        assert abs(solution_sin2_theta(t, compact_ctx) - pipeline) < 1e-8


def test_compact_solution_from_shifted_initial_angle():
    curve = build_curve(1.0, 3.0, COMPACT)
    state0 = RotatorState.from_energy(COMPACT, 1.0, 3.0, 0.4)
    ctx = build_context(curve, state0)
    scale = time_scale(ctx)
    times = np.linspace(0.0, scale, 9)
    reference = phase_at_times(state0, times, 1e-3 * scale).sin2()
    for t, r in zip(times, reference):
        assert abs(solution_sin2(t, ctx) - r) < 1e-6


def test_additive_constants_agree(compact_ctx):
    constants = additive_constants(compact_ctx)
    assert_allclose(constants['analytic'], (1.0 + 2.0) / 3.0)
    assert abs(constants['t0_matched'] - constants['analytic']) < 1e-8
    assert abs(constants['theta_route'] - constants['analytic']) < 1e-8


def test_fitted_constant_reproduces_initial_angle(compact_ctx):
    assert_allclose(compact_ctx.additive_constant, analytic_constant(compact_ctx), atol=1e-9)
    assert abs(solution_sin2(0.0, compact_ctx)) < 1e-12
    shifted = build_context(compact_ctx.curve, RotatorState.from_energy(COMPACT, 1.0, 3.0, 0.4))
    assert_allclose(solution_sin2(0.0, shifted), math.sin(0.4) ** 2, atol=1e-12)
    assert_allclose(solution_sin2(0.0, shifted, constant=analytic_constant(shifted)),
                    math.sin(0.4) ** 2, atol=1e-7)


def test_complex_solution_is_rejected(compact_ctx, period):
    shifted = replace(compact_ctx, A1=compact_ctx.A1 + 0.3j)
    with pytest.raises(IdentityViolation) as info:
        solution_sin2(0.13 * period, shifted)
    assert info.value.kind == "reality-violated"


def test_noncompact_solution_before_blowup(noncompact_ctx, blowup_time):
    times = np.linspace(0.0, 0.9 * blowup_time, 17)
    reference = phase_at_times(noncompact_ctx.state0, times, 1e-3 * blowup_time).sin2()
    for t, r in zip(times, reference):
        value = solution_sinh2(t, noncompact_ctx)
        assert abs(value - r) < 1e-5 * max(1.0, abs(r))
        assert abs(solution_sinh2_theta(t, noncompact_ctx) - value) < 1e-7 * max(1.0, abs(value))


def test_noncompact_solution_diverges_at_blowup(noncompact_ctx, blowup_time):
    assert solution_sinh2(blowup_time - 1e-4, noncompact_ctx) > 1e6
    assert canonical_margin(blowup_time, noncompact_ctx) < 1e-6
    with pytest.raises(CanonicalWindowError):
        gamma_j(1, blowup_time, noncompact_ctx)


def test_solutions_check_variant(compact_ctx, noncompact_ctx):
    with pytest.raises(ValueError):
        solution_sinh2(0.1, compact_ctx)
    with pytest.raises(ValueError):
        solution_sin2(0.1, noncompact_ctx)


def test_default_context_matches_fixture(compact_ctx):
    ctx = default_context(1.0, 3.0, COMPACT)
    assert_allclose(ctx.A1, compact_ctx.A1)
    assert_allclose(ctx.dj, compact_ctx.dj)


def test_richardson_extrapolation():
    zetas = 1e-2 * 2.0 ** -np.arange(6)
    values = 3.0 + 2.0 * zetas - zetas ** 2 + 0.5j * zetas ** 3
    assert_allclose(richardson(zetas, values), 3.0, atol=1e-12)
    noisy = values + np.array([0.0, 1e-3, -1e-3, 1e-3, -1e-3, 1e-3])
    with pytest.raises(QuadratureError):
        richardson(zetas, noisy)


def test_normalization_scales_with_d1(compact_curve, compact_state, compact_ctx):
    ctx = build_context(compact_curve, compact_state, d1=2.0, check_expansion=False)
    assert_allclose(ctx.dj[1], 2.0 * compact_ctx.dj[1])
    assert_allclose(leading_coefficient(1, 0.05, ctx), 2.0, rtol=1e-6)
    shifted = replace(ctx, dj=(1.0 + 0j, ctx.dj[1]))
    assert_allclose(leading_coefficient(1, 0.05, shifted), 1.0, rtol=1e-6)
