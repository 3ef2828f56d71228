"""谱曲线、周期、Abel 映射与 Ω"""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from common.errors import IdentityViolation, PoleError, RegimeError
from curve import (
    COMPACT, NONCOMPACT, SurfacePoint, abel, abel_invert, branch_points, branch_value, build_curve,
    expansion_at_infinity, expansion_closed_form, infinity_point, lattice_equal, lattice_reduce,
    marked_images, mu, mu_pair, omega_quadrature, omega_sk, quartic, v_constant, velocity_residuals, w,
    zero_point,
)


def test_branch_points():
    lminus, lplus = branch_points(1.0, 3.0)
    assert_allclose(lplus, 1.0 + math.sqrt(2.0), rtol=1e-14)
    assert_allclose(lminus, math.sqrt(2.0) - 1.0, rtol=1e-14)
    assert_allclose(lplus * lminus, 1.0, rtol=1e-15)
    for root in (lminus, lplus, -lminus, -lplus):
        assert abs(quartic(root, 1.0, 3.0)) < 1e-12


@pytest.mark.parametrize("a,E", [(1.0, 1.0), (1.0, 0.5), (2.0, 3.9), (0.0, 3.0)])
def test_non_rotating_regime_rejected(a, E):
    with pytest.raises(RegimeError) as info:
        build_curve(a, E)
    assert info.value.kind == "regime-unsupported"


def test_branch_value_normalization():
    lminus, lplus = branch_points(1.0, 3.0)
    assert_allclose(branch_value(0j, lminus, lplus), -1.0)
    big = 1e4 * (1 + 1j)
    assert_allclose(branch_value(big, lminus, lplus) / big ** 2, 1.0, rtol=1e-6)


def test_marked_point_sheets():
    assert zero_point(+1).sheet == -1
    assert zero_point(-1).sheet == 1
    assert infinity_point(1, 1.0).sheet == 1
    assert infinity_point(1, 1j).sheet == -1
    assert infinity_point(2, 1j).sheet == 1
    with pytest.raises(ValueError):
        infinity_point(3, 1.0)


@pytest.mark.parametrize("variant", [COMPACT, NONCOMPACT])
def test_periods_and_constants(variant):
    c = build_curve(1.0, 3.0, variant)
    assert c.tau.imag > 0.0
    assert_allclose(c.tau, c.Bcal / c.Acal, rtol=1e-15)
    assert_allclose(c.alpha, 2j * math.pi / c.Acal, rtol=1e-15)
    assert_allclose(c.V, 2.0 * c.alpha, rtol=1e-15)
    assert_allclose(c.B, c.alpha * c.Bcal, rtol=1e-15)
    assert c.to_dict()['im_tau_positive']


def test_ksq_and_frequency(compact_curve):
    assert_allclose(compact_curve.ksq, 0.5)
    assert_allclose(compact_curve.omega_tilde, math.sqrt(8.0))


def test_periods_do_not_depend_on_contour():
    base = build_curve(1.0, 3.0)
    other = build_curve(1.0, 3.0, contour_scale=0.5)
    assert_allclose(other.Acal, base.Acal, rtol=1e-10)
    assert_allclose(other.Bcal, base.Bcal, rtol=1e-10)


@pytest.mark.parametrize("variant", [COMPACT, NONCOMPACT])
def test_mu_satisfies_characteristic_equation(variant):
    c = build_curve(1.0, 3.0, variant)
    sign = -1.0 if variant == COMPACT else 1.0
    for lam in (0.7 + 1.1j, -2.3 + 0.4j, 3.0j):
        p = SurfacePoint(lam, 1)
        kappa = p.kappa(c.rho)
        assert_allclose(w(p, c) ** 2, quartic(kappa, c.a, c.E), rtol=1e-12)
        expected = c.a ** 2 * lam ** 2 + sign * 2.0 * c.E + c.a ** 2 / lam ** 2
        assert_allclose(mu(p, c) ** 2, expected, rtol=1e-12)
        assert_allclose(mu(p.involution(), c), -mu(p, c))


def test_mu_has_poles_at_marked_points(compact_curve):
    with pytest.raises(PoleError):
        mu(zero_point(+1), compact_curve)
    with pytest.raises(PoleError):
        w(infinity_point(1, compact_curve.rho), compact_curve)


def test_abel_odd_under_involution(compact_curve):
    p = SurfacePoint(1.3 + 0.8j, 1)
    assert_allclose(abel(p.involution(), compact_curve), -abel(p, compact_curve), rtol=1e-14)


def test_marked_images_of_infinity_are_opposite(compact_curve):
    _, a_p1, a_p2 = marked_images(compact_curve)
    assert lattice_equal(a_p2, -a_p1, compact_curve)


@pytest.mark.parametrize("variant", [COMPACT, NONCOMPACT])
def test_abel_invert_round_trip(variant):
    c = build_curve(1.0, 3.0, variant)
    p = SurfacePoint(c.rho * (1.3 + 0.8j), 1)
    target = abel(p, c)
    q = abel_invert(target, c)
    assert lattice_equal(abel(q, c), target, c)


def test_lattice_reduce_removes_periods(compact_curve):
    c = compact_curve
    z = 0.2 + 0.3j
    shifted = z + 3 * 2j * math.pi - 2 * c.B
    assert_allclose(lattice_reduce(shifted, c), z, atol=1e-12)
    assert lattice_equal(shifted, z, c)
    assert not lattice_equal(z + 0.5 * c.B, z, c)


@pytest.mark.parametrize("variant", [COMPACT, NONCOMPACT])
def test_velocity_identities(variant):
    residuals = velocity_residuals(build_curve(1.0, 3.0, variant))
    assert residuals['vt'] < 1e-9
    assert residuals['residue'] < 1e-8
    assert residuals['b_cycle'] < 1e-6


def test_perturbed_period_breaks_residue_identity():
    c = build_curve(1.0, 3.0, fault="perturb-acal")
    assert c.fault == "perturb-acal"
    assert velocity_residuals(c)['residue'] > 1e-8


@pytest.mark.parametrize("j", [1, 2])
def test_expansion_at_infinity_matches_closed_form(compact_curve, j):
    alpha_j, omega0, omega1 = expansion_closed_form(j, compact_curve)
    assert_allclose(alpha_j, compact_curve.alpha if j == 1 else -compact_curve.alpha)
    _, sampled0, sampled1 = expansion_at_infinity(j, compact_curve)
    scale = max(1.0, abs(omega0), abs(omega1))
    assert abs(sampled0 - omega0) < 1e-6 * scale
    assert abs(sampled1 - omega1) < 1e-6 * scale


def test_unknown_variant_and_fault():
    with pytest.raises(ValueError):
        build_curve(1.0, 3.0, "spherical")
    with pytest.raises(ValueError):
        build_curve(1.0, 3.0, fault="drop-bits")


def test_v_constant_self_check(compact_curve):
    assert v_constant(compact_curve) == compact_curve.V
    with pytest.raises(IdentityViolation):
        v_constant(build_curve(1.0, 3.0, fault="perturb-acal"))


def test_omega_quadrature_matches_theta_form(compact_curve):
    c = compact_curve
    for lam in (1.7 + 0.9j, -0.6 + 2.2j, 0.3 - 0.2j):
        for sheet in (1, -1):
            p = SurfacePoint(lam, sheet)
            theta_form = omega_sk(p, c)
            assert abs(omega_quadrature(p, c) - theta_form) < 1e-7 * max(1.0, abs(theta_form))
    with pytest.raises(PoleError):
        omega_sk(zero_point(+1), c)


@pytest.mark.parametrize("variant", [COMPACT, NONCOMPACT])
@pytest.mark.parametrize("energy", [1.5, 2.0, 5.0, 10.0])
def test_velocity_identities_across_energies(variant, energy):
    residuals = velocity_residuals(build_curve(1.0, energy, variant))
    assert residuals['vt'] < 1e-9
    assert residuals['residue'] < 1e-8
    assert residuals['b_cycle'] < 1e-6


@pytest.mark.parametrize("variant", [COMPACT, NONCOMPACT])
def test_omega_residues_at_zero(variant):
    c = build_curve(1.0, 3.0, variant)
    lam = c.rho * 1e-6 * np.exp(1j * math.pi / 3)
    # 0⁺ 在 sheet -1，0⁻ 在 sheet +1
    assert_allclose(lam * omega_sk(SurfacePoint(lam, -1), c), c.a, atol=1e-4)
    assert_allclose(lam * omega_sk(SurfacePoint(lam, 1), c), -c.a, atol=1e-4)


@pytest.mark.parametrize("variant", [COMPACT, NONCOMPACT])
def test_abel_gains_two_pi_i_around_a_cycle(variant):
    c = build_curve(1.0, 3.0, variant)
    # 上下两条路径到 κ = -3 之差恰好逆时针绕左割线一周
    p = SurfacePoint(-3.0 * c.rho, 1)
    difference = abel(p, c, sigma=1) - abel(p, c, sigma=-1)
    assert_allclose(difference, 2j * math.pi, atol=1e-9)


@pytest.mark.parametrize("variant", [COMPACT, NONCOMPACT])
def test_mu_symmetric_under_inversion(variant):
    c = build_curve(1.0, 3.0, variant)
    for lam in (0.7 + 0.4j, -1.3 + 2.1j, 0.2 - 0.9j):
        inverted = mu_pair(1.0 / lam, c)
        for value in mu_pair(lam, c):
            assert np.min(np.abs(inverted - value)) < 1e-12 * abs(value)


@pytest.mark.parametrize("variant", [COMPACT, NONCOMPACT])
def test_second_expansion_coefficients_are_opposite(variant):
    c = build_curve(1.0, 3.0, variant)
    first = expansion_closed_form(1, c)[2]
    second = expansion_closed_form(2, c)[2]
    assert abs(first + second) < 1e-9 * max(1.0, abs(first))
