"""e^{tL} 的 Riemann-Hilbert 分解与发散检测"""

from dataclasses import replace

import numpy as np
import pytest
from numpy.testing import assert_allclose

from baker import time_scale
from common.errors import IllConditionedError, QuadratureError
from curve import SurfacePoint, mu
from dynamics import build_lax, evolve_state
from factorization import (
    CANONICAL, MINUS, NON_CANONICAL, PLUS, build_Phi, conjugation_residuals, default_contour,
    detect_blowup, evolve_by_conjugation, factor_pair, g_factor, verify_factorization,
)

CONTOUR = default_contour(1.0, 16)


def test_default_contour_avoids_real_axis():
    points = default_contour(1.0, 64)
    assert len(points) == 64
    assert all(abs(abs(p) - 1.0) < 1e-15 for p in points)
    assert min(abs(p.imag) for p in points) > 0.04


def test_factors_are_identity_at_time_zero(compact_state, compact_ctx):
    for lam in CONTOUR[:4]:
        pair = factor_pair(compact_state, compact_ctx, lam, 0.0)
        assert_allclose(pair.gplus, np.eye(2), atol=1e-12)
        assert_allclose(pair.gminus, np.eye(2), atol=1e-12)
        assert pair.residual < 1e-12


def test_phi_columns_are_eigenvectors(compact_state, compact_ctx, period):
    t = 0.1 * period
    state = evolve_state(compact_state, t, 1e-3 * period)
    for lam in CONTOUR[::4]:
        L = build_lax(state, lam).L
        phi = build_Phi(lam, t, compact_ctx)
        mu_plus = mu(SurfacePoint(lam, 1), compact_ctx.curve)
        for k, eigen in enumerate((mu_plus, -mu_plus)):
            col = phi[:, k]
            assert np.linalg.norm(L @ col - eigen * col) < 1e-7 * np.linalg.norm(L) * np.linalg.norm(col)


@pytest.mark.parametrize("fixture,state_fixture", [
    ("compact_ctx", "compact_state"), ("noncompact_ctx", "noncompact_state"),
])
def test_factorization_residual(request, fixture, state_fixture):
    ctx = request.getfixturevalue(fixture)
    state0 = request.getfixturevalue(state_fixture)
    scale = time_scale(ctx)
    report = verify_factorization(state0, ctx, [0.05 * scale, 0.1 * scale, 0.2 * scale], CONTOUR, workers=2)
    assert report.canonical
    assert report.classification == CANONICAL
    assert not report.skipped
    assert len(report.pairs) == 3 * len(CONTOUR)
    assert report.max_residual < 1e-6
    assert all(p.det_error < 1e-6 for p in report.pairs)
    payload = report.to_dict()
    assert payload['contour_points'] == len(CONTOUR)
    assert len(payload['per_time']) == 3


def test_conjugation_evolution(compact_state, compact_ctx, period):
    lam = CONTOUR[3]
    t = 0.15 * period
    checks = conjugation_residuals(compact_state, compact_ctx, lam, t)
    assert checks['plus_minus'] < 1e-7
    assert checks['oracle'] < 1e-6
    assert checks['det'] < 1e-8
    evolved = evolve_by_conjugation(compact_state, compact_ctx, lam, t)
    reference = build_lax(evolve_state(compact_state, t, 1e-3 * period), lam).L
    assert_allclose(evolved, reference, atol=1e-6)


def test_g_factor_signs(compact_ctx):
    lam = CONTOUR[5]
    assert_allclose(g_factor(lam, 0.0, compact_ctx, PLUS), np.eye(2), atol=1e-12)
    assert_allclose(g_factor(lam, 0.0, compact_ctx, MINUS), np.eye(2), atol=1e-12)
    with pytest.raises(ValueError):
        build_Phi(lam, 0.0, compact_ctx, "*")


def test_branch_point_collision(compact_ctx):
    with pytest.raises(QuadratureError) as info:
        build_Phi(compact_ctx.curve.lplus + 0j, 0.0, compact_ctx)
    assert info.value.kind == "branch-point-collision"


def test_ill_conditioned_points_are_skipped(compact_state, compact_ctx):
    with pytest.raises(IllConditionedError):
        factor_pair(compact_state, compact_ctx, CONTOUR[0], 0.1, cond_max=1.0)
    report = verify_factorization(compact_state, compact_ctx, 0.1, CONTOUR[:4], cond_max=1.0)
    assert len(report.skipped) == 4
    assert all(s['kind'] == "ill-conditioned-basis" for s in report.skipped)
    assert report.pairs == []


def test_compact_orbit_never_blows_up(compact_ctx):
    assert detect_blowup(compact_ctx) is None


def test_noncompact_blowup_time(noncompact_ctx, blowup_time):
    t_star = detect_blowup(noncompact_ctx)
    assert t_star is not None
    assert abs(t_star - blowup_time) < 1e-8 * blowup_time


def test_blowup_from_constructed_divisor(compact_ctx):
    shifted = replace(compact_ctx, A1=-compact_ctx.curve.alpha)
    assert_allclose(shifted.u1, -1.0)
    assert_allclose(detect_blowup(shifted), 0.5, rtol=1e-12)


def test_non_canonical_near_blowup(noncompact_state, noncompact_ctx, blowup_time):
    report = verify_factorization(noncompact_state, noncompact_ctx, [0.1 * blowup_time, blowup_time], CONTOUR[:4])
    assert report.classification == NON_CANONICAL
    assert report.margins[1] < 1e-6
    assert report.max_residual_at(0.1 * blowup_time) < 1e-6
    assert report.blowup_time_estimate is not None


def test_classification_changes_before_blowup(noncompact_state, noncompact_ctx, blowup_time):
    t_star = detect_blowup(noncompact_ctx)
    times = [t_star * f for f in (0.9, 0.95, 0.98, 0.99, 0.999, 1.0 - 1e-9)]
    report = verify_factorization(noncompact_state, noncompact_ctx, times, CONTOUR[:4])
    assert report.classification == NON_CANONICAL

    def flagged(i):
        t = times[i]
        return (report.margins[i] < 1e-6 or report.max_residual_at(t) >= 1e-5
                or any(s['t'] == t for s in report.skipped))

    first = next(i for i in range(len(times)) if flagged(i))
    assert first > 0
    assert times[first] < t_star
    # 残差发散的时刻与 t* 相差不到 2%
    assert abs(times[first] - blowup_time) < 0.02 * blowup_time


@pytest.mark.parametrize("angle", [0.3, 1.9, 4.1])
def test_factors_stay_bounded_off_the_contour(compact_ctx, period, angle):
    t = 0.1 * period
    ray = np.exp(1j * angle)
    reference = np.linalg.norm(g_factor(ray, t, compact_ctx, MINUS))
    for radius in (10.0, 100.0):
        assert np.linalg.norm(g_factor(radius * ray, t, compact_ctx, MINUS)) < 100.0 * reference
    reference = np.linalg.norm(g_factor(ray, t, compact_ctx, PLUS))
    assert np.linalg.norm(g_factor(0.1 * ray, t, compact_ctx, PLUS)) < 100.0 * reference
