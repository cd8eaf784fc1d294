import json
import os
import re

import numpy as np
import pandas as pd
import pytest

from cli import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, create_parser, main
from config import parse_config, validate_config
from errors import ConfigError
from gauge_algebra import Family


def write_config(tmp_path, **sections):
    sections.setdefault('out_dir', str(tmp_path / 'out'))
    fn = tmp_path / 'conf.json'
    fn.write_text(json.dumps(sections))
    return str(fn)


def report(tmp_path, name):
    with open(os.path.join(str(tmp_path), 'out', name)) as f:
        return json.load(f)


# ----------------------------------------------------------------------
# configuration
# ----------------------------------------------------------------------
def test_defaults():
    cfg = validate_config({})
    assert cfg.grid.n == 256 and cfg.grid.length == 20.0
    assert cfg.dt is None
    assert cfg.tolerances['eps_cls'] == 1e-9
    assert cfg.linear[0](0.0) == -0.5 and cfg.linear[1](0.0) == 1.0
    assert cfg.gauge is None
    assert cfg.coefficients_or_linear().nu1(0.0) == -0.5


def test_flags_override_file(tmp_path):
    fn = write_config(tmp_path, grid={'n': 64, 'length': 10.0})
    cfg = parse_config(fn, grid_n=128, t_final=2.0, seed=7)
    assert cfg.grid.n == 128 and cfg.grid.length == 10.0
    assert cfg.t1 == 2.0
    assert cfg.seed == 7


@pytest.mark.parametrize('raw, path', [
    ({'grid': {'n': 256, 'size': 20.0}}, 'grid.size'),
    ({'grid': {'n': 100}}, 'grid.n'),
    ({'time': {'t0': 1.0, 't1': 0.0}}, 'time.t1'),
    ({'units': {'hbar': -1.0}}, 'units.hbar'),
    ({'state': {'kind': 'gaussian', 'k': 1.0}}, 'state.k'),
    ({'coefficients': {'preset': 'Foo'}}, 'coefficients.preset'),
    ({'coefficients': {'preset': 'BM', 'params': {'f': 0.1}}},
     'coefficients.params'),
    ({'coefficients': {'nu1': -0.5, 'mu6': 1.0}}, 'coefficients.mu6'),
    ({'gauge': {'lambda': {'kind': 'tabulated',
                           'params': {'t0': 0.0, 'values': [1, 2, 3]}}}},
     'gauge.lambda.params.step'),
    ({'gauge': {'lambda': 0.0}}, 'gauge'),
    ({'potential': {'kind': 'array', 'values': [0.0]}}, 'potential.values'),
    ({'colour': 'blue'}, 'colour'),
    ({'grid': {'n': '256'}}, 'grid.n'),
    ({'potential': {'kind': 'array', 'values': [0.0, 'a']}},
     'potential.values[1]'),
    ({'state': {'kind': 'csv'}}, 'state.path'),
    ({'gauge': {'gamma': {'kind': 'linear', 'params': {
        'slope': 1.0, 'intercept': 0.0, 'offset': 2.0}}}},
     'gauge.gamma.params.offset'),
    ({'gauge': {'theta': {'kind': 'fourier',
                         'params': {'coefficients': [0.1]}}}},
     'gauge.theta.kind'),
])
def test_config_errors_name_the_key(raw, path):
    with pytest.raises(ConfigError) as e:
        validate_config(raw)
    assert e.value.path == path


@pytest.mark.parametrize('raw, msg', [
    ({'grid': {'length': 1.0, 'cells': 4}}, 'unknown key'),
    ({'gauge': {'gamma': {'kind': 'constant'}}}, 'missing key'),
    ({'grid': {'n': 64.5}}, 'expected type integer'),
    ({'chain': 'G'}, 'expected one of F, R'),
])
def test_config_error_messages(raw, msg):
    with pytest.raises(ConfigError) as e:
        validate_config(raw)
    assert e.value.msg == msg


def test_preset_coefficients_from_config():
    cfg = validate_config({'coefficients': {
        'preset': 'DG', 'params': {'D': 0.05, 'c2': 0.3}}})
    c = cfg.coefficients
    assert c.nu2(0.0) == pytest.approx(0.025)
    assert c.mu2(0.0) == pytest.approx(0.015 - 0.25)


# ----------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------
def test_parser():
    args = create_parser().parse_args(['verify', 'boost', '--grid-n', '64'])
    assert args.command == 'verify' and args.scenario == 'boost'
    assert args.grid_n == 64
    with pytest.raises(SystemExit):
        create_parser().parse_args(['verify', 'nothing'])


def test_invariants_then_classify(tmp_path):
    fn = write_config(tmp_path, linear={'nu1': -0.5, 'mu0': 1.0})
    assert main(['invariants', '--config', fn]) == EXIT_OK
    iv = report(tmp_path, 'invariants.json')
    assert iv['iota0'] == -0.5
    assert iv['iota1'] == 0.125
    assert iv['iota2'] == 0.0

    fn = write_config(tmp_path, invariants_file=str(
        tmp_path / 'out' / 'invariants.json'))
    assert main(['classify', '--config', fn]) == EXIT_OK
    assert report(tmp_path, 'classify.json')['family'] == Family.F0.value


def test_classify_restricted_chain(tmp_path):
    fn = write_config(tmp_path, chain='R', coefficients={
        'preset': 'Kostin', 'params': {'f': 0.1}})
    assert main(['classify', '--config', fn]) == EXIT_OK
    out = report(tmp_path, 'classify.json')
    assert out['family'] == 'Unclassified'
    assert out['preset'] == 'Kostin'


def test_preset_command(tmp_path):
    fn = write_config(tmp_path, coefficients={
        'preset': 'DG', 'params': {'D': 0.05, 'c2': 0.3}})
    assert main(['preset', '--config', fn]) == EXIT_OK
    out = report(tmp_path, 'preset.json')
    assert out['family'] == 'F3'
    assert out['preset'] == 'DG'
    assert out['coefficients']['nu2'] == pytest.approx(0.025)


def test_act_keeps_family(tmp_path):
    fn = write_config(tmp_path, gauge={'gamma': 0.5, 'lambda': 2.0})
    assert main(['act', '--config', fn]) == EXIT_OK
    out = report(tmp_path, 'act.json')
    assert out['input_classification']['family'] == 'F0'
    assert out['classification']['family'] == 'F0'
    assert out['coefficients']['nu1'] == pytest.approx(-0.25)


def test_transform_writes_states(tmp_path):
    fn = write_config(tmp_path, gauge={'gamma': 0.3, 'lambda': -1.0},
                      state={'kind': 'gaussian', 'k0': 1.0})
    assert main(['transform', '--config', fn]) == EXIT_OK
    out = report(tmp_path, 'transform.json')
    assert out['norm_out'] == pytest.approx(1.0, abs=1e-12)
    assert out['max_density_change'] <= 1e-12
    df = pd.read_csv(str(tmp_path / 'out' / 'transformed.csv'))
    assert len(df) == 256


def test_transform_needs_gauge(tmp_path):
    fn = write_config(tmp_path)
    assert main(['transform', '--config', fn]) == EXIT_CONFIG


def test_state_file_off_grid_is_config_error(tmp_path):
    x = np.linspace(-10.0, 10.0, 100, endpoint=False)
    fn = str(tmp_path / 'psi.csv')
    pd.DataFrame({'x': x, 're': np.exp(-x**2), 'im': 0.0}).to_csv(
        fn, index=False)
    conf = write_config(tmp_path, gauge={'lambda': -1.0},
                        state={'kind': 'csv', 'path': fn})
    assert main(['transform', '--config', conf]) == EXIT_CONFIG


def test_state_file_with_text_values_is_config_error(tmp_path):
    fn = str(tmp_path / 'psi.csv')
    pd.DataFrame({'x': ['a', 'b'], 're': [1.0, 0.0],
                  'im': [0.0, 0.0]}).to_csv(fn, index=False)
    conf = write_config(tmp_path, gauge={'lambda': -1.0},
                        state={'kind': 'csv', 'path': fn})
    assert main(['transform', '--config', conf]) == EXIT_CONFIG


def test_fractional_lambda_on_gaussian_is_numerical_failure(tmp_path):
    fn = write_config(tmp_path, gauge={'lambda': 0.5})
    assert main(['transform', '--config', fn]) == EXIT_NUMERICAL


def test_evolve(tmp_path):
    fn = write_config(tmp_path, coefficients={
        'preset': 'BM', 'params': {'b': 0.3}}, time={'t1': 0.05, 'stride': 5},
        state={'kind': 'gausson', 'b': 0.3})
    assert main(['evolve', '--config', fn, '--grid-n', '128']) == EXIT_OK
    out = report(tmp_path, 'evolve.json')
    assert out['status'] == 'ok'
    assert out['family'] == 'F1'
    assert abs(out['norm_drift']) <= 1e-8
    traj = pd.read_csv(str(tmp_path / 'out' / 'trajectory.csv'))
    assert traj['t'].iloc[-1] == pytest.approx(0.05)


def test_dt_above_bound_is_config_error(tmp_path):
    fn = write_config(tmp_path)
    assert main(['evolve', '--config', fn, '--dt', '1.0']) == EXIT_CONFIG


@pytest.mark.parametrize('argv', [
    ['invariants', '--config', 'missing.json'],
    ['act'],
])
def test_config_exit_code(tmp_path, argv):
    assert main(argv + ['--out-dir', str(tmp_path / 'out')]) == EXIT_CONFIG


def test_unknown_key_exit_code(tmp_path):
    fn = write_config(tmp_path, gird={'n': 64})
    assert main(['invariants', '--config', fn]) == EXIT_CONFIG


def test_tabulated_lambda_without_step(tmp_path):
    fn = write_config(tmp_path, gauge={'lambda': {
        'kind': 'tabulated', 'params': {'t0': 0.0, 'values': [1, 2, 3]}}})
    assert main(['act', '--config', fn]) == EXIT_CONFIG


# ----------------------------------------------------------------------
# verification scenarios
# ----------------------------------------------------------------------
def test_verify_commuting_diagram(tmp_path):
    fn = write_config(tmp_path, grid={'n': 128}, time={'t1': 0.5})
    assert main(['verify', 'commuting-diagram', '--config', fn]) == EXIT_OK
    out = report(tmp_path, 'verify_commuting_diagram.json')
    assert out['passed']
    assert out['max_density_mismatch'] <= 1e-6


def test_verify_algebra_is_deterministic(tmp_path):
    texts = []
    for i in range(2):
        out = str(tmp_path / str(i))
        fn = write_config(tmp_path, samples=50, out_dir=out)
        assert main(['verify', 'algebra', '--config', fn,
                     '--seed', '3']) == EXIT_OK
        with open(os.path.join(out, 'verify_algebra.json')) as f:
            texts.append(f.read())
    assert texts[0] == texts[1]
    out = json.loads(texts[0])
    assert out['passed'] and out['seed'] == 3 and out['samples'] == 50


def test_verify_separation(tmp_path):
    fn = write_config(tmp_path)
    assert main(['verify', 'separation', '--config', fn]) == EXIT_OK
    out = report(tmp_path, 'verify_separation.json')
    assert out['max_pair_mismatch'] <= 1e-12


def test_verify_ehrenfest(tmp_path):
    fn = write_config(tmp_path, grid={'n': 128}, time={'t1': 0.2},
                      state={'kind': 'gaussian', 'k0': 1.0})
    assert main(['verify', 'ehrenfest', '--config', fn]) == EXIT_OK
    out = report(tmp_path, 'verify_ehrenfest.json')
    assert out['relation1_resid'] <= 1e-6
    assert os.path.isfile(str(tmp_path / 'out' / 'trajectory.csv'))


def test_verify_continuity_needs_records(tmp_path):
    fn = write_config(tmp_path, time={'t1': 0.01, 'stride': 100})
    assert main(['verify', 'continuity', '--config', fn]) == EXIT_CONFIG


def test_reports_are_plain_json(tmp_path):
    fn = write_config(tmp_path, coefficients={
        'preset': 'Kostin', 'params': {'f': 0.1}})
    assert main(['preset', '--config', fn]) == EXIT_OK
    with open(str(tmp_path / 'out' / 'preset.json')) as f:
        text = f.read()
    assert json.loads(text) == report(tmp_path, 'preset.json')
    assert 'NaN' not in text
    assert re.search(r'-0\.0[,\s]', text) is None
