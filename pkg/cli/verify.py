"""
不变量检验套件
逐项运行各模块的自检，记录实测残差与阈值
"""

import math
from typing import Callable, List, Optional

import numpy as np

from baker import (
    BAContext, ba_minus, build_context, check_cosid, check_sinid, leading_coefficient,
    solution_sin2, solution_sinh2, solution_sn, time_scale,
)
from common.errors import BlowUpDetected, SpinTopError
from common.log import get_logger
from curve import COMPACT, CurveData, SurfacePoint, build_curve, mu, velocity_residuals
from dynamics import (
    RotatorState, build_lax, hamiltonian_residual, integrate_lax, integrate_phase, modulus_ksq,
    phase_at_times,
)
from factorization import (
    build_Phi, conjugation_residuals, default_contour, detect_blowup, verify_factorization,
)
from special import WeierstrassLattice, theta, u0_integral, wp, wp_lattice_sum
from .config import RunConfig

logger = get_logger("CLI")


class Suite:
    """收集检验结果"""

    def __init__(self):
        self.checks: List[dict] = []

    def run(self, name: str, tolerance: float, measure: Callable[[], float]) -> Optional[float]:
        try:
            residual = float(measure())
        except SpinTopError as e:
            logger.warning(f"检验 {name} 失败: {e}")
            self.checks.append({'name': name, 'passed': False, 'residual': None,
                                'tolerance': tolerance, 'kind': e.kind, 'error': str(e)})
            return None
        passed = bool(residual <= tolerance)
        if not passed:
            logger.warning(f"检验 {name} 未通过: {residual:.3e} > {tolerance:.1e}")
        self.checks.append({'name': name, 'passed': passed, 'residual': residual, 'tolerance': tolerance})
        return residual

    def record(self, name: str, passed: bool, detail: dict) -> None:
        self.checks.append({'name': name, 'passed': bool(passed), **detail})

    @property
    def passed(self) -> bool:
        return all(c['passed'] for c in self.checks)


def _theta_checks(suite: Suite, curve: CurveData, rng: np.random.Generator) -> None:
    m = curve.modulus
    z = 0.31 - 0.47j

    def quasi():
        base = theta(z, m)
        shift_a = abs(theta(z + 2j * math.pi, m) - base)
        shift_b = abs(theta(z + m.B, m) - np.exp(-0.5 * m.B - z) * base)
        return max(shift_a, shift_b) / abs(base)

    suite.run('theta_quasi_periodicity', 1e-13, quasi)

    lattice = WeierstrassLattice.from_periods(curve.Acal, curve.Bcal)
    u = 0.23 * curve.Acal + 0.41 * curve.Bcal

    def lattice_sum():
        reference = wp_lattice_sum(u, lattice)
        return abs(wp(u, lattice) - reference) / abs(reference)

    suite.run('wp_lattice_sum', 1e-8, lattice_sum)

    def scaling():
        s = rng.uniform(0.5, 2.0) * np.exp(1j * rng.uniform(0.0, 2.0 * math.pi))
        scaled = WeierstrassLattice(s * lattice.omega1, s * lattice.omega2)
        direct = wp(u, lattice)
        return abs(s * s * wp(s * u, scaled) - direct) / abs(direct)

    suite.run('wp_scaling', 1e-9, scaling)


def _curve_checks(suite: Suite, curve: CurveData) -> None:
    suite.record('im_tau_positive', curve.tau.imag > 0.0, {'im_tau': curve.tau.imag})
    try:
        residuals = velocity_residuals(curve)
    except SpinTopError as e:
        suite.record('velocity_identities', False, {'kind': e.kind, 'error': str(e)})
        return
    suite.run('velocity_theta_increment', 1e-9, lambda: residuals['vt'])
    suite.run('velocity_residue_sum', 1e-8, lambda: residuals['residue'])
    suite.run('velocity_b_cycle', 1e-6, lambda: residuals['b_cycle'])


def _dynamics_checks(suite: Suite, state0: RotatorState, scale: float, compact: bool) -> None:
    suite.run('hamiltonian_residue', 1e-10 * max(1.0, abs(state0.energy)), lambda: hamiltonian_residual(state0))

    lam = np.exp(0.2j * math.pi)
    horizon = scale if compact else 0.5 * scale

    def isospectral():
        run = integrate_lax(state0, lam, horizon, 2e-3 * scale)
        dets = [np.linalg.det(L) for L in run.matrices]
        return max(abs(d - dets[0]) for d in dets)

    suite.run('lax_isospectrality', 1e-8, isospectral)

    if compact:
        def energy_drift():
            run = integrate_phase(state0, 5.0 * scale, scale / 4000.0)
            energies = [run.state(i).energy for i in range(len(run.times))]
            return max(abs(e - energies[0]) for e in energies)

        suite.run('energy_conservation', 1e-9, energy_drift)


def _ba_checks(suite: Suite, ctx: BAContext, rng: np.random.Generator, scale: float) -> None:
    c = ctx.curve

    def monodromy():
        worst = 0.0
        for _ in range(6):
            r = rng.uniform(2.5, 5.0) * c.lplus
            angle = rng.uniform(-0.4, 0.4) * math.pi
            p = SurfacePoint(c.rho * r * np.exp(1j * angle), int(rng.choice([1, -1])))
            t = rng.uniform(0.0, 0.2) * scale
            for j in (1, 2):
                up = ba_minus(j, p, t, ctx, sigma=1)
                down = ba_minus(j, p, t, ctx, sigma=-1)
                worst = max(worst, abs(up - down) / abs(up))
        return worst

    suite.run('ba_no_monodromy', 1e-8, monodromy)

    grid = [0.0, 0.1 * scale, 0.2 * scale]

    def residue():
        worst = 0.0
        for j in (1, 2):
            values = [leading_coefficient(j, t, ctx) for t in grid]
            target = ctx.dj[j - 1]
            worst = max(worst, max(abs(v - target) for v in values) / abs(target))
        return worst

    suite.run('ba_residue_normalization', 1e-8, residue)

    if ctx.gamma0 is None:
        return
    states = phase_at_times(ctx.state0, grid, 1e-3 * scale)

    def identities(check):
        def measure():
            return max(check(t, ctx, j, states.state(i)) for i, t in enumerate(grid) for j in (1, 2))
        return measure

    suite.run('cosid', 1e-5, identities(check_cosid))
    suite.run('sinid', 1e-5, identities(check_sinid))

    def eigen_relation():
        worst = 0.0
        for i, t in enumerate(grid):
            lam = np.exp(1j * rng.uniform(0.0, 2.0 * math.pi))
            L = build_lax(states.state(i), lam).L
            phi = build_Phi(lam, t, ctx)
            mu_plus = mu(SurfacePoint(lam, 1), c)
            for k, eigen in enumerate((mu_plus, -mu_plus)):
                col = phi[:, k]
                worst = max(worst, np.linalg.norm(L @ col - eigen * col) / (np.linalg.norm(L) * np.linalg.norm(col)))
        return worst

    suite.run('eigen_relation', 1e-7, eigen_relation)


def _solution_checks(suite: Suite, ctx: BAContext, scale: float) -> None:
    c = ctx.curve
    if ctx.gamma0 is None:
        return
    if c.variant == COMPACT:
        times = np.linspace(0.0, scale, 33)
        rk4 = phase_at_times(ctx.state0, times, 1e-3 * scale).sin2()

        def triple():
            worst = 0.0
            for t, reference in zip(times, rk4):
                pipeline = solution_sin2(t, ctx)
                worst = max(worst, abs(pipeline - reference))
                if ctx.state0.angle == 0.0 and ctx.state0.momentum > 0.0:
                    closed = solution_sn(t, c.a, c.E)
                    worst = max(worst, abs(pipeline - closed), abs(closed - reference))
            return worst

        suite.run('triple_oracle', 1e-6, triple)
        suite.record('no_blowup_compact', detect_blowup(ctx) is None, {'blowup_time': detect_blowup(ctx)})
        return

    t_star = detect_blowup(ctx)
    expected = u0_integral(modulus_ksq(c.a, c.E), c.variant).real / (2.0 * c.a)
    if ctx.state0.angle == 0.0:
        suite.run('blowup_time', 1e-4, lambda: abs(t_star - expected) if t_star is not None else math.inf)
    horizon = 0.9 * (t_star if t_star is not None else expected)
    times = np.linspace(0.0, horizon, 33)

    def pre_blowup():
        rk4 = phase_at_times(ctx.state0, times, 1e-3 * scale).sin2()
        return max(abs(solution_sinh2(t, ctx) - r) / max(1.0, abs(r)) for t, r in zip(times, rk4))

    suite.run('pre_blowup_trajectory', 1e-5, pre_blowup)


def _factorization_checks(suite: Suite, config: RunConfig, ctx: BAContext,
                          rng: np.random.Generator, scale: float) -> None:
    state0 = ctx.state0 if ctx.state0 is not None else config.initial_state()
    contour = default_contour(config.contour_radius, config.contour_points)
    fractions = (0.05, 0.1, 0.2)
    report = verify_factorization(state0, ctx, [f * scale for f in fractions], contour,
                                  cond_max=config.tolerance('cond_max'), tol_fact=config.tolerance('tol_fact'),
                                  eps_canonical=config.tolerance('eps_canonical'), workers=config.workers)
    suite.run('factorization_residual', 1e-6, lambda: report.max_residual)
    suite.record('factorization_canonical', report.canonical,
                 {'classification': report.classification, 'skipped': len(report.skipped)})

    if ctx.gamma0 is None:
        return

    def conjugation():
        worst = 0.0
        for _ in range(4):
            lam = np.exp(1j * rng.uniform(0.0, 2.0 * math.pi))
            t = rng.uniform(0.0, 0.2) * scale
            checks = conjugation_residuals(state0, ctx, lam, t, config.tolerance('cond_max'))
            worst = max(worst, checks['oracle'], checks['plus_minus'], checks['det'])
        return worst

    suite.run('conjugation_evolution', 1e-6, conjugation)


def run_suite(config: RunConfig) -> dict:
    """
    运行全部检验

    Returns:
        {'passed': bool, 'checks': [...]}
    """
    suite = Suite()
    rng = np.random.default_rng(config.seed)
    state0 = config.initial_state()
    try:
        curve = build_curve(config.a, state0.energy, config.variant, fault=config.inject_fault,
                            contour_scale=config.contour_radius)
    except SpinTopError as e:
        suite.record('curve', False, {'kind': e.kind, 'error': str(e)})
        return {'passed': False, 'checks': suite.checks}

    _theta_checks(suite, curve, rng)
    _curve_checks(suite, curve)
    try:
        ctx = build_context(curve, state0, p1=config.divisor_point())
    except SpinTopError as e:
        suite.record('ba_context', False, {'kind': e.kind, 'error': str(e)})
        return {'passed': False, 'checks': suite.checks}
    suite.record('ba_context', True, {'physical': ctx.physical})

    scale = time_scale(ctx)
    _dynamics_checks(suite, state0, scale, curve.variant == COMPACT)
    _ba_checks(suite, ctx, rng, scale)
    try:
        _solution_checks(suite, ctx, scale)
        _factorization_checks(suite, config, ctx, rng, scale)
    except BlowUpDetected as e:
        suite.record('horizon', False, {'kind': e.kind, 'error': str(e)})

    logger.info(f"检验套件完成: {'全部通过' if suite.passed else '存在失败项'}")
    return {'passed': suite.passed, 'checks': suite.checks}
