"""命令行入口、配置合并与报告格式"""

import json

import pytest

from cli import RunConfig, resolve_config
from cli.config import load_environment, load_file
from cli.main import main
from cli.output import format_float, to_csv, to_json
from common.errors import ConfigError
from common.settings import override, tolerances
from curve import build_curve, path_integral


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_curve_report(capsys):
    code, out = run(capsys, 'curve', '--a', '1', '--energy', '3')
    assert code == 0
    report = json.loads(out)
    assert report['command'] == 'curve'
    assert abs(report['curve']['lplus'] - 2.414213562373095) < 1e-12
    assert report['curve']['im_tau_positive'] is True
    assert report['identity_residuals']['residue'] < 1e-8
    assert report['acal_self_convergence'] < 1e-10
    assert len(report['fingerprint']) == 16


def test_curve_report_is_deterministic(capsys):
    _, first = run(capsys, 'curve', '--variant', 'noncompact')
    _, second = run(capsys, 'curve', '--variant', 'noncompact')
    assert first == second


@pytest.mark.parametrize("argv", [
    ['curve', '--a', '-1'],
    ['curve', '--energy', '0.5'],
    ['solve', '--t-steps', '1'],
    ['solve', '--energy', '3', '--angle0', '0.1', '--momentum0', '2'],
    ['factorize', '--p1', 'one,two'],
])
def test_invalid_input_exit_code(capsys, argv):
    code, out = run(capsys, *argv)
    assert code == 2
    assert json.loads(out)['success'] is False


def test_solve_compact_csv(capsys):
    code, out = run(capsys, 'solve', '--t-steps', '9', '--format', 'csv')
    assert code == 0
    lines = out.splitlines()
    comments = [line for line in lines if line.startswith('#')]
    assert any(line.startswith('# fingerprint=') for line in comments)
    header = lines[len(comments)]
    assert header == 't,sin2_theta_pipeline,sin2_sn,sin2_rk4,pairwise_err'
    rows = [line.split(',') for line in lines[len(comments) + 1:]]
    assert len(rows) == 9
    assert max(float(r[-1]) for r in rows) < 1e-6


def test_solve_noncompact_reports_blowup(capsys, blowup_time):
    code, out = run(capsys, 'solve', '--variant', 'noncompact', '--t-steps', '9')
    assert code == 0
    report = json.loads(out)
    assert report['columns'][1] == 'sinh2_theta_pipeline'
    assert abs(report['metadata']['blowup_time'] - blowup_time) < 1e-8
    assert report['metadata']['rows'] == 9
    assert report['metadata']['max_pairwise_err'] < 1e-4


def test_factorize_canonical(capsys):
    code, out = run(capsys, 'factorize', '--t-steps', '3', '--contour-points', '8')
    assert code == 0
    report = json.loads(out)['factorization']
    assert report['classification'] == 'canonical'
    assert report['max_residual'] < 1e-6


def test_factorize_past_blowup_is_non_canonical(capsys, blowup_time):
    code, out = run(capsys, 'factorize', '--variant', 'noncompact', '--t-max', repr(blowup_time),
                    '--t-steps', '2', '--contour-points', '8')
    assert code == 3
    assert json.loads(out)['factorization']['classification'] == 'non-canonical-suspected'


def test_verify_detects_injected_fault(capsys):
    code, out = run(capsys, 'verify', '--inject-fault', 'perturb-acal', '--contour-points', '8')
    assert code == 4
    report = json.loads(out)
    assert report['passed'] is False
    failed = {c['name'] for c in report['checks'] if not c['passed']}
    assert 'velocity_residue_sum' in failed


def test_scan_rows(capsys):
    code, out = run(capsys, 'scan', '--energies', '2,5', '--workers', '2')
    assert code == 0
    report = json.loads(out)
    assert [row[0] for row in report['rows']] == [2.0, 5.0]
    assert all(row[-1] < 1e-6 for row in report['rows'])


def test_precedence_file_env_flags(tmp_path):
    path = tmp_path / 'run.json'
    path.write_text(json.dumps({'a': 2.0, 'energy': 9.0, 't-steps': 5}), encoding='utf-8')
    config = resolve_config({}, str(path), environ={})
    assert (config.a, config.energy, config.t_steps) == (2.0, 9.0, 5)

    config = resolve_config({}, str(path), environ={'SPINTOP_ENERGY': '7'})
    assert config.energy == 7.0

    config = resolve_config({'energy': 6.0, 'a': None}, str(path), environ={'SPINTOP_ENERGY': '7'})
    assert (config.a, config.energy) == (2.0, 6.0)


def test_ini_config(tmp_path):
    path = tmp_path / 'run.ini'
    path.write_text('[Model]\nvariant = noncompact\nenergy = 4\n\n[Contour]\npoints = 16\n\n'
                    '[Tolerances]\ntol_fact = 1e-4\n', encoding='utf-8')
    data = load_file(str(path))
    assert data['variant'] == 'noncompact'
    config = resolve_config({}, str(path), environ={})
    assert config.variant == 'noncompact'
    assert config.energy == 4.0
    assert config.contour_points == 16
    assert config.tolerance('tol_fact') == 1e-4
    assert config.tolerance('cond_max') == 1e8


def test_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_file(str(tmp_path / 'missing.json'))
    bad = tmp_path / 'bad.json'
    bad.write_text('[1, 2]', encoding='utf-8')
    with pytest.raises(ConfigError):
        load_file(str(bad))
    with pytest.raises(ConfigError):
        RunConfig.from_dict({'colour': 'red'})
    with pytest.raises(ConfigError):
        RunConfig(momentum0=1.0).validate()
    with pytest.raises(ConfigError):
        RunConfig(tolerances={'eps_unknown': 1.0}).validate()


def test_state_flags_override_file_energy(tmp_path):
    path = tmp_path / 'run.json'
    path.write_text(json.dumps({'energy': 9.0}), encoding='utf-8')
    config = resolve_config({'angle0': 0.2, 'momentum0': 3.0}, str(path), environ={})
    assert config.energy is None
    assert config.initial_state().momentum == 3.0


def test_environment_loader_ignores_empty_values():
    assert load_environment({'SPINTOP_A': '', 'SPINTOP_VARIANT': 'noncompact'}) == {'variant': 'noncompact'}


def test_fingerprint_tracks_config():
    base = RunConfig().validate()
    assert base.fingerprint() == RunConfig().validate().fingerprint()
    changed = RunConfig(seed=1).validate()
    assert changed.fingerprint() != base.fingerprint()
    assert RunConfig(p1='0.5,1.5,-1').validate().divisor_point().sheet == -1


def test_output_formats():
    assert format_float(0.1) == '0.10000000000000001'
    text = to_json({'z': 1 + 2j, 'x': float('inf'), 'ok': True, 'n': None})
    assert json.loads(text) == {'z': [1.0, 2.0], 'x': None, 'ok': True, 'n': None}
    csv_text = to_csv(['t', 'v'], [[0.5, None]], {'seed': 3})
    assert csv_text == '# seed=3\nt,v\n0.5,\n'


def test_default_verify_passes_and_is_deterministic(capsys):
    code, first = run(capsys, 'verify')
    assert code == 0
    report = json.loads(first)
    assert report['passed'] is True
    assert all(check['passed'] for check in report['checks'])
    _, second = run(capsys, 'verify')
    assert first == second


def test_config_tolerances_reach_pipeline(capsys, tmp_path):
    path = tmp_path / 'loose.ini'
    path.write_text('[Tolerances]\neps_canonical = 1000\n', encoding='utf-8')
    code, out = run(capsys, 'factorize', '--config', str(path), '--contour-points', '8', '--t-steps', '2')
    assert code == 3
    assert json.loads(out)['factorization']['classification'] == 'non-canonical-suspected'
    assert tolerances.eps_canonical == 1e-6


def test_tolerance_override_is_scoped():
    c = build_curve(1.0, 3.0)
    near = c.lminus + 0.01j
    assert path_integral(near, c.lminus, c.lplus) != 0
    with override({'eps_branch': 0.1}):
        assert path_integral(near, c.lminus, c.lplus) == 0
    assert tolerances.eps_branch == 1e-8


@pytest.mark.parametrize("line", ['eps_pole = -1', 'eps_fancy = 1e-3'])
def test_invalid_tolerance_rejected(capsys, tmp_path, line):
    path = tmp_path / 'bad.ini'
    path.write_text(f'[Tolerances]\n{line}\n', encoding='utf-8')
    code, _ = run(capsys, 'curve', '--config', str(path))
    assert code == 2
