"""
命令行主程序入口
python -m cli.main <curve|solve|factorize|verify|scan> [选项]
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

# 添加项目根目录到路径
sys.path.insert(0, str(Path(__file__).parent.parent))

from common.errors import ConfigError, IdentityViolation, ModulusError, RegimeError, SpinTopError
from common.log import get_logger, setup_logging
from common.settings import override
from cli.commands import COMMANDS, EXIT_IDENTITY, EXIT_INVALID, CommandResult
from cli.config import FAULTS, FORMATS, resolve_config
from cli.output import emit, to_csv, to_json
from curve import VARIANTS

logger = get_logger("CLI")

# 参数名 -> RunConfig 字段
_FLAG_FIELDS = {
    'a': 'a', 'energy': 'energy', 'angle0': 'angle0', 'momentum0': 'momentum0', 'variant': 'variant',
    't_max': 't_max', 't_steps': 't_steps', 'contour_radius': 'contour_radius',
    'contour_points': 'contour_points', 'p1': 'p1', 'format': 'output_format', 'out': 'out',
    'seed': 'seed', 'inject_fault': 'inject_fault', 'workers': 'workers', 'energies': 'energies',
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help="JSON 或 INI 配置文件")
    common.add_argument('--a', type=float, help="耦合常数 a > 0")
    common.add_argument('--energy', type=float, help="能量 E")
    common.add_argument('--angle0', type=float, help="初始角 φ(0) 或 q(0)")
    common.add_argument('--momentum0', type=float, help="初始动量")
    common.add_argument('--variant', choices=VARIANTS)
    common.add_argument('--t-max', dest='t_max', type=float)
    common.add_argument('--t-steps', dest='t_steps', type=int)
    common.add_argument('--contour-radius', dest='contour_radius', type=float)
    common.add_argument('--contour-points', dest='contour_points', type=int)
    common.add_argument('--p1', help="除子点 're,im,sheet'")
    common.add_argument('--format', choices=FORMATS)
    common.add_argument('--out', help="输出文件，缺省为 stdout")
    common.add_argument('--seed', type=int)
    common.add_argument('--workers', type=int)
    common.add_argument('--inject-fault', dest='inject_fault', choices=FAULTS)
    common.add_argument('--log-level', dest='log_level', help="覆盖 SPINTOP_LOG")

    parser = argparse.ArgumentParser(prog='spintop', description="SO(2) 转子的代数几何分解工具")
    sub = parser.add_subparsers(dest='command', required=True)
    sub.add_parser('curve', parents=[common], help="谱曲线、周期与恒等式残差")
    sub.add_parser('solve', parents=[common], help="sin²φ / sinh²q 时间序列")
    sub.add_parser('factorize', parents=[common], help="e^{tL} 的 Riemann-Hilbert 分解检验")
    sub.add_parser('verify', parents=[common], help="不变量检验套件")
    scan = sub.add_parser('scan', parents=[common], help="能量网格扫描")
    scan.add_argument('--energies', help="逗号分隔的能量列表")
    return parser


def render(result: CommandResult, fmt: str) -> str:
    if fmt == 'csv' and result.columns is not None:
        comments = {'fingerprint': result.report['fingerprint']}
        comments.update({k: v for k, v in result.report.get('metadata', {}).items()
                         if isinstance(v, (int, float, str)) or v is None})
        return to_csv(result.columns, result.rows, comments)
    return to_json(result.report)


def main(argv: Optional[List[str]] = None) -> int:
    """主函数，返回退出码"""
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)
    flags = {field: getattr(args, name, None) for name, field in _FLAG_FIELDS.items()}

    try:
        config = resolve_config(flags, args.config)
        with override(config.tolerances):
            result = COMMANDS[args.command](config)
    except (ConfigError, RegimeError, ModulusError) as e:
        logger.error(f"输入无效: {e}")
        emit(to_json(e.to_dict()))
        return EXIT_INVALID
    except IdentityViolation as e:
        logger.error(f"恒等式校验失败: {e}")
        emit(to_json(e.to_dict()))
        return EXIT_IDENTITY
    except SpinTopError as e:
        logger.error(f"数值管线失败: {e}")
        emit(to_json(e.to_dict()))
        return EXIT_IDENTITY

    emit(render(result, config.output_format), config.out)
    return result.exit_code


if __name__ == '__main__':
    sys.exit(main())
