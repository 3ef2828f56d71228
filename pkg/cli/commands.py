"""
子命令实现
每个命令接收 RunConfig，返回 CommandResult（报告字典、可选表格与退出码）
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from baker import (
    BAContext, additive_constants, build_context, solution_sin2, solution_sin2_theta, solution_sinh2,
    solution_sinh2_theta, solution_sn, time_scale,
)
from common.errors import BlowUpDetected, PoleError
from common.log import get_logger
from curve import COMPACT, build_curve, velocity_residuals
from dynamics import RotatorState, modulus_ksq, phase_at_times
from factorization import default_contour, detect_blowup, verify_factorization
from special import u0_integral
from .config import RunConfig
from .verify import run_suite

logger = get_logger("CLI")

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NON_CANONICAL = 3
EXIT_IDENTITY = 4

ORACLE_STEP = 1e-3
SCAN_SAMPLES = 17


@dataclass
class CommandResult:
    """命令输出：JSON 报告，time series 类命令另带表格"""

    report: dict
    exit_code: int = EXIT_OK
    columns: Optional[List[str]] = None
    rows: List[list] = field(default_factory=list)


def _header(config: RunConfig, command: str) -> dict:
    return {'command': command, 'fingerprint': config.fingerprint(), 'config': config.to_dict()}


def _context(config: RunConfig) -> BAContext:
    state0 = config.initial_state()
    curve = build_curve(config.a, state0.energy, config.variant, fault=config.inject_fault,
                        contour_scale=config.contour_radius)
    return build_context(curve, state0, p1=config.divisor_point())


def cmd_curve(config: RunConfig) -> CommandResult:
    """谱曲线数据与恒等式残差"""
    state0 = config.initial_state()
    curve = build_curve(config.a, state0.energy, config.variant, fault=config.inject_fault,
                        contour_scale=config.contour_radius)
    # 换一条 a-cycle 围道重算 𝒜，检验路径无关性
    alternate = build_curve(config.a, state0.energy, config.variant, contour_scale=0.5 * config.contour_radius)
    ksq = modulus_ksq(config.a, curve.E)
    report = _header(config, 'curve')
    report['curve'] = curve.to_dict()
    report['ksq'] = ksq
    report['u0'] = u0_integral(ksq, config.variant)
    report['identity_residuals'] = velocity_residuals(curve)
    report['acal_self_convergence'] = abs(alternate.Acal - curve.Acal) / abs(curve.Acal) if not curve.fault else None
    logger.info(f"曲线报告完成: τ = {curve.tau:.12g}")
    return CommandResult(report)


def _time_grid(config: RunConfig, ctx: BAContext) -> np.ndarray:
    t_max = config.t_max
    if t_max == 0.0:
        scale = time_scale(ctx)
        t_max = scale if ctx.curve.variant == COMPACT else 0.9 * scale
    return np.linspace(0.0, t_max, config.t_steps)


def cmd_solve(config: RunConfig) -> CommandResult:
    """
    sin²φ（或 sinh²q）时间序列

    紧情形列：t, sin2_theta_pipeline, sin2_sn, sin2_rk4, pairwise_err；
    非紧情形列：t, sinh2_theta_pipeline, sinh2_theta_form, sinh2_rk4, pairwise_err。
    --p1 覆盖时参照列为空，误差只比较 ℘ 与 theta 两种形式
    """
    ctx = _context(config)
    compact = ctx.curve.variant == COMPACT
    times = _time_grid(config, ctx)
    physical = ctx.gamma0 is not None
    state0 = ctx.state0
    blowup = detect_blowup(ctx)

    reference = [None] * len(times)
    if physical:
        try:
            reference = list(phase_at_times(state0, times, ORACLE_STEP * time_scale(ctx)).sin2())
        except BlowUpDetected as e:
            logger.warning(f"参照轨道发散: {e}")
            partial = e.trajectory.sin2() if e.trajectory is not None else []
            reference = list(partial) + [None] * (len(times) - len(partial))

    standard = physical and state0.angle == 0.0 and state0.momentum > 0.0
    rows = []
    for t, ref in zip(times, reference):
        try:
            if compact:
                pipeline = solution_sin2(t, ctx)
                second = solution_sn(t, ctx.curve.a, ctx.curve.E) if standard else solution_sin2_theta(t, ctx)
            else:
                pipeline = solution_sinh2(t, ctx)
                second = solution_sinh2_theta(t, ctx)
        except PoleError:
            logger.info(f"t={t} 处解发散，截断序列")
            break
        if physical and ref is None:
            break
        values = [v for v in (pipeline, second, ref) if v is not None]
        err = max(abs(x - y) for i, x in enumerate(values) for y in values[i + 1:])
        rows.append([float(t), pipeline, second, ref, err])

    prefix = 'sin2' if compact else 'sinh2'
    second_name = 'sin2_sn' if compact and standard else f'{prefix}_theta_form'
    columns = ['t', f'{prefix}_theta_pipeline', second_name, f'{prefix}_rk4', 'pairwise_err']
    report = _header(config, 'solve')
    report['metadata'] = {
        'variant': ctx.curve.variant,
        'rows': len(rows),
        'blowup_time': blowup,
        'max_pairwise_err': max((r[-1] for r in rows), default=0.0),
        'additive_constants': additive_constants(ctx),
        'physical_divisor': physical,
    }
    report['columns'] = columns
    report['rows'] = rows
    return CommandResult(report, EXIT_OK, columns, rows)


def cmd_factorize(config: RunConfig) -> CommandResult:
    """围道上的分解报告，疑似非规范时退出码 3"""
    ctx = _context(config)
    state0 = ctx.state0
    t_max = config.t_max if config.t_max > 0.0 else 0.1 * time_scale(ctx)
    times = np.linspace(0.0, t_max, config.t_steps)
    contour = default_contour(config.contour_radius, config.contour_points)
    report = verify_factorization(state0, ctx, times, contour,
                                  cond_max=config.tolerance('cond_max'),
                                  tol_fact=config.tolerance('tol_fact'),
                                  eps_canonical=config.tolerance('eps_canonical'),
                                  workers=config.workers)
    payload = _header(config, 'factorize')
    payload['factorization'] = report.to_dict()
    return CommandResult(payload, EXIT_OK if report.canonical else EXIT_NON_CANONICAL)


def cmd_verify(config: RunConfig) -> CommandResult:
    """全部不变量检验，任一失败退出码 4"""
    suite = run_suite(config)
    payload = _header(config, 'verify')
    payload.update(suite)
    return CommandResult(payload, EXIT_OK if suite['passed'] else EXIT_IDENTITY)


def _scan_point(config: RunConfig, energy: float) -> dict:
    curve = build_curve(config.a, energy, config.variant, contour_scale=config.contour_radius)
    state0 = RotatorState.from_energy(config.variant, config.a, energy, 0.0)
    ctx = build_context(curve, state0, check_expansion=False)
    scale = time_scale(ctx)
    row = {
        'energy': energy,
        'Acal': curve.Acal,
        'Bcal': curve.Bcal,
        'tau': curve.tau,
        'V': curve.V,
        'blowup_time': detect_blowup(ctx),
    }
    if curve.variant == COMPACT:
        times = np.linspace(0.0, scale, SCAN_SAMPLES)
        reference = phase_at_times(state0, times, ORACLE_STEP * scale).sin2()
        row['oracle_err'] = max(
            max(abs(solution_sin2(t, ctx) - r), abs(solution_sn(t, config.a, energy) - r))
            for t, r in zip(times, reference))
    else:
        row['oracle_err'] = abs(row['blowup_time'] - scale) if row['blowup_time'] is not None else math.inf
    return row


def cmd_scan(config: RunConfig) -> CommandResult:
    """能量网格扫描，线程池并发，按网格顺序输出"""
    energies: Sequence[float] = config.energies
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        results = list(pool.map(lambda e: _scan_point(config, e), energies))
    columns = ['energy', 'Acal_re', 'Acal_im', 'Bcal_re', 'Bcal_im', 'tau_re', 'tau_im', 'V_re', 'V_im',
               'blowup_time', 'oracle_err']
    rows = [[r['energy'], r['Acal'].real, r['Acal'].imag, r['Bcal'].real, r['Bcal'].imag,
             r['tau'].real, r['tau'].imag, r['V'].real, r['V'].imag, r['blowup_time'], r['oracle_err']]
            for r in results]
    report = _header(config, 'scan')
    report['columns'] = columns
    report['rows'] = rows
    return CommandResult(report, EXIT_OK, columns, rows)


COMMANDS: Dict[str, Callable[[RunConfig], CommandResult]] = {
    'curve': cmd_curve,
    'solve': cmd_solve,
    'factorize': cmd_factorize,
    'verify': cmd_verify,
    'scan': cmd_scan,
}
