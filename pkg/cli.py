""" Command line front end.

    python cli.py <command> [--config conf.json] [--out-dir DIR] [...]

Commands: transform, act, invariants, classify, preset, evolve and
verify {commuting-diagram, ehrenfest, continuity, separation, boost,
algebra}. Reports are written as JSON (sorted keys) and series as CSV in the
output directory.

Exit codes: 0 success, 1 numerical failure (diverged run, phase branch
error, failed verification), 2 configuration error.
"""
import argparse
import os
import sys

import numpy as np

from config import parse_config
from dynamics import (EvolutionSpec, boost_check, commuting_diagram,
                      continuity_residual, ehrenfest_check, gausson,
                      observed_order, run)
from errors import (ConfigError, DomainError, EmptyRegionError,
                    GridMismatchError, InvalidElementError, NlseGaugeError,
                    NumericalDomainError, PhaseBranchError,
                    SingularInvariantError, UnknownPresetError)
from gauge_algebra import (GaugeElement, InvariantVector, act_on_coefficients,
                           classify, identify_preset, invariants,
                           property_suite)
from timing import Timing
from utils import read_json, sizeof_fmt, write_json
from wavefield import (WaveFunction, apply_gauge, apply_gauge_pair, gaussian,
                       measure_project, plane_wave, product_state)

COMMANDS = ('transform', 'act', 'invariants', 'classify', 'preset', 'evolve',
            'verify')
SCENARIOS = ('commuting-diagram', 'ehrenfest', 'continuity', 'separation',
             'boost', 'algebra')

EXIT_OK, EXIT_NUMERICAL, EXIT_CONFIG = 0, 1, 2

EHRENFEST1_TOL = 1e-6
EHRENFEST2_TOL = 1e-4
FRICTION_RTOL = 0.02
CONTINUITY_ORDER = 1.9
SEPARATION_TOL = 1e-12
CONTINUITY_HALF_WIDTHS = (4, 2, 1)


def create_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=str, default=None,
                        help='JSON configuration file')
    common.add_argument('--out-dir', type=str, default=None,
                        help='directory for the CSV/JSON artifacts')
    common.add_argument('--seed', type=int, default=None,
                        help='seed of the randomized property suites')
    common.add_argument('--grid-n', type=int, default=None,
                        help='number of grid points (power of two)')
    common.add_argument('--box-l', type=float, default=None,
                        help='length of the periodic box')
    common.add_argument('--dt', type=float, default=None,
                        help='time step (default: stability bound)')
    common.add_argument('--t-final', type=float, default=None,
                        help='final time of the evolution')

    parser = argparse.ArgumentParser(
        description='Nonlinear gauge transformations of Schrodinger '
                    'equations: algebra, classification and dynamics',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog='Log verbosity is read from $NLSE_GAUGE_LOG '
               '(quiet, info, debug).')
    sub = parser.add_subparsers(dest='command', metavar='command')
    sub.required = True
    helps = {
        'transform': 'apply a gauge element to a state',
        'act': 'transform a coefficient vector with a gauge element',
        'invariants': 'gauge invariant parameters of a coefficient vector',
        'classify': 'family of a coefficient vector or invariants file',
        'preset': 'coefficients of a named equation',
        'evolve': 'integrate an equation and record diagnostics',
        'verify': 'run a verification scenario',
    }
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common], help=helps[name])
        if name == 'verify':
            p.add_argument('scenario', choices=SCENARIOS)
    return parser


# ----------------------------------------------------------------------
# helpers
# ----------------------------------------------------------------------
def make_state(cfg):
    """ Initial state at t0 described by the `state` section."""
    s, grid, t0 = cfg.state, cfg.grid, cfg.t0
    if s['kind'] == 'gaussian':
        return gaussian(grid, s['x0'], s['sigma'], s['k0'], t0)
    if s['kind'] == 'plane_wave':
        return plane_wave(grid, s['k'], t0)
    if s['kind'] == 'gausson':
        return gausson(grid, s['b'], cfg.hbar, cfg.m, s['x0'], t0)
    if not os.path.isfile(s['path']):
        raise ConfigError('state.path', 'file %s not found' % s['path'])
    try:
        if s['kind'] == 'csv':
            psi = WaveFunction.from_csv(s['path'], t0)
        else:
            psi = WaveFunction.from_json(s['path'])
    except NlseGaugeError:
        raise
    except (ValueError, KeyError, IndexError) as e:
        raise ConfigError('state.path', 'cannot read a state from %s: %s'
                          % (s['path'], e))
    if psi.grid != grid:
        raise GridMismatchError('state %s is on %r, configuration uses %r'
                                % (s['path'], psi.grid, grid))
    return psi


def evolution_spec(cfg, coefficients, **changes):
    kwargs = dict(t0=cfg.t0, t1=cfg.t1, dt=cfg.dt, potential=cfg.potential,
                  stride=cfg.stride, eps_rel=cfg.tolerances['eps_reg'],
                  eps_phase=cfg.tolerances['eps_phase'], form=cfg.form)
    kwargs.update(changes)
    try:
        return EvolutionSpec(coefficients, cfg.grid, **kwargs)
    except ValueError as e:
        raise ConfigError('time.dt', str(e))


def gauge_or_default(cfg, gamma=0.5, lam=1.0):
    if cfg.gauge is not None:
        return cfg.gauge
    return GaugeElement(gamma, lam, window=cfg.window)


def require_gauge(cfg, command):
    if cfg.gauge is None:
        raise ConfigError('gauge', 'required by %s' % command)
    return cfg.gauge


def out_path(cfg, name):
    return os.path.join(cfg.out_dir, name)


def save_report(cfg, name, report):
    fn = write_json(out_path(cfg, name), report)
    Timing.prt('Report %s ( %s ).' % (fn, sizeof_fmt(fn)))
    return fn


def family_entry(c, cfg):
    iv = invariants(c)
    p = identify_preset(c, cfg.hbar, cfg.m)
    return {'family': classify(iv, 'F', eps=cfg.tolerances['eps_cls']).value,
            'restricted_family': classify(
                iv, 'R', eps=cfg.tolerances['eps_cls']).value,
            'preset': None if p is None else p.value}


# ----------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------
def cmd_transform(cfg):
    g = require_gauge(cfg, 'transform')
    psi = make_state(cfg)
    out = apply_gauge(g, psi, cfg.t0, cfg.tolerances['eps_phase'])
    psi.to_csv(out_path(cfg, 'state.csv'))
    out.to_csv(out_path(cfg, 'transformed.csv'))
    save_report(cfg, 'transform.json', {
        'gauge': g.to_dict(), 't': cfg.t0,
        'norm_in': psi.norm, 'norm_out': out.norm,
        'max_density_change': float(np.abs(out.rho - psi.rho).max()),
        'winding': out.meta.get('winding')})
    return EXIT_OK


def cmd_act(cfg):
    g = require_gauge(cfg, 'act')
    c = cfg.coefficients_or_linear()
    out = act_on_coefficients(g, c)
    report = {'gauge': g.to_dict(), 'input': c.to_dict(flat=True),
              'coefficients': out.to_dict(flat=True),
              'warnings': out.meta['warnings']}
    report['input_classification'] = family_entry(c, cfg)
    report['classification'] = family_entry(out, cfg)
    save_report(cfg, 'act.json', report)
    return EXIT_OK


def cmd_invariants(cfg):
    iv = invariants(cfg.coefficients_or_linear())
    d = iv.to_dict(flat=True)
    Timing.prt(', '.join('%s=%s' % (k, d[k]) for k in sorted(d)
                         if k.startswith('iota')))
    save_report(cfg, 'invariants.json', d)
    return EXIT_OK


def cmd_classify(cfg):
    eps = cfg.tolerances['eps_cls']
    if cfg.invariants_file is not None:
        if not os.path.isfile(cfg.invariants_file):
            raise ConfigError('invariants_file',
                              'file %s not found' % cfg.invariants_file)
        try:
            d = read_json(cfg.invariants_file)
        except ValueError as e:
            raise ConfigError('invariants_file', 'invalid JSON: %s' % e)
        iv = InvariantVector.from_dict(d, cfg.window, 'invariants_file')
        p = None
    else:
        c = cfg.coefficients_or_linear()
        iv = invariants(c)
        p = identify_preset(c, cfg.hbar, cfg.m)
    family = classify(iv, cfg.chain, eps=eps)
    Timing.prt('family: %s' % family.value)
    save_report(cfg, 'classify.json', {
        'chain': cfg.chain, 'family': family.value,
        'preset': None if p is None else p.value})
    return EXIT_OK


def cmd_preset(cfg):
    if cfg.coefficients is None:
        raise ConfigError('coefficients', 'expected {"preset": name, '
                          '"params": {...}}')
    c = cfg.coefficients
    report = {'units': {'hbar': cfg.hbar, 'm': cfg.m},
              'coefficients': c.to_dict(flat=True),
              'invariants': invariants(c).to_dict(flat=True)}
    report.update(family_entry(c, cfg))
    save_report(cfg, 'preset.json', report)
    return EXIT_OK


def cmd_evolve(cfg):
    c = cfg.coefficients_or_linear()
    spec = evolution_spec(cfg, c)
    psi0 = make_state(cfg)
    rec = run(spec, psi0)
    rec.to_csv(out_path(cfg, 'trajectory.csv'))
    rec.final.to_csv(out_path(cfg, 'final_state.csv'))
    report = {'status': rec.status, 'steps': spec.n_steps, 'dt': spec.dt,
              'dt_max': spec.dt_max, 't0': spec.t0, 't1': spec.t1,
              'grid': cfg.grid.to_dict(), 'norm_drift':
              float(rec.norm[-1] / rec.norm[0] - 1),
              'warnings': rec.meta['warnings']}
    report.update(family_entry(c, cfg))
    save_report(cfg, 'evolve.json', report)
    return EXIT_OK if rec.status == 'ok' else EXIT_NUMERICAL


# ----------------------------------------------------------------------
# verification scenarios
# ----------------------------------------------------------------------
def verify_commuting_diagram(cfg):
    nu1, mu0 = cfg.linear
    g = gauge_or_default(cfg)
    return commuting_diagram(nu1, mu0, g, make_state(cfg), cfg.t1 - cfg.t0,
                             cfg.dt, cfg.potential, cfg.workers,
                             cfg.tolerances['density'])


def verify_ehrenfest(cfg):
    c = cfg.coefficients_or_linear()
    rec = run(evolution_spec(cfg, c), make_state(cfg))
    rec.to_csv(out_path(cfg, 'trajectory.csv'))
    if rec.status != 'ok':
        return {'status': rec.status, 'passed': False}
    report = ehrenfest_check(rec, c, (cfg.t0, cfg.t1))
    passed = report['relation1_resid'] <= EHRENFEST1_TOL
    if report['relation2'] == 'ok':
        passed = passed and report['relation2_resid'] <= EHRENFEST2_TOL
    if report['fitted_rate'] is not None and report['iota7'] != 0:
        rel = abs(abs(report['fitted_rate']) / abs(report['iota7']) - 1)
        report['friction_rate_rel_err'] = rel
        passed = passed and rel <= FRICTION_RTOL
    report.update(status='ok', passed=bool(passed))
    return report


def verify_continuity(cfg):
    """ Residual of the continuity relation at the middle record, with
    ∂tρ differenced over 8, 4 and 2 record intervals."""
    c = cfg.coefficients_or_linear()
    spec = evolution_spec(cfg, c, snapshots=True)
    rec = run(spec, make_state(cfg))
    if rec.status != 'ok':
        return {'status': rec.status, 'passed': False}
    snaps = rec.snapshots
    mid = len(snaps) // 2
    widest = CONTINUITY_HALF_WIDTHS[0]
    if mid < widest or mid + widest >= len(snaps):
        raise ConfigError('time', 'continuity check needs at least %d '
                          'records, got %d' % (2 * widest + 1, len(snaps)))
    errors, intervals = [], []
    for j in CONTINUITY_HALF_WIDTHS:
        _, resid = continuity_residual(
            [snaps[mid - j], snaps[mid], snaps[mid + j]], c,
            cfg.tolerances['eps_reg'])
        errors.append(float(resid[0]))
        intervals.append(2 * j * spec.stride * spec.dt)
    orders = observed_order(errors)
    return {'status': 'ok', 't': snaps[mid].time_tag,
            'intervals': intervals, 'residuals': errors,
            'orders': orders.tolist(),
            'passed': bool(np.all(orders >= CONTINUITY_ORDER))}


def verify_separation(cfg):
    """ Product states stay product states under the gauge transformation,
    and transformation commutes with a half-box position measurement."""
    g = gauge_or_default(cfg, gamma=1.0)
    eps = cfg.tolerances['eps_phase']
    psi1 = make_state(cfg)
    psi2 = gaussian(cfg.grid, psi1.mean_x - 2.0, 1.0, -1.0, cfg.t0)
    t = cfg.t0
    pair = apply_gauge_pair(g, product_state(psi1, psi2), cfg.grid, t, eps)
    separate = product_state(apply_gauge(g, psi1, t, eps),
                             apply_gauge(g, psi2, t, eps))
    pair_err = float(np.abs(pair - separate).max())

    half = (0, cfg.grid.n // 2)
    try:
        a = measure_project(apply_gauge(g, psi1, t, eps), half)
        b = apply_gauge(g, measure_project(psi1, half), t, eps)
        measure_err = float(np.abs(a.amplitude - b.amplitude).max())
    except EmptyRegionError:
        measure_err = None
    passed = pair_err <= SEPARATION_TOL and (
        measure_err is None or measure_err <= SEPARATION_TOL)
    return {'status': 'ok', 'passed': bool(passed),
            'max_pair_mismatch': pair_err,
            'max_measurement_mismatch': measure_err}


def verify_boost(cfg):
    spec = evolution_spec(cfg, cfg.coefficients_or_linear())
    return boost_check(spec, make_state(cfg), cfg.velocity, cfg.workers,
                       cfg.tolerances['density'])


def verify_algebra(cfg):
    report = property_suite(cfg.samples, cfg.seed, cfg.window)
    report['status'] = 'ok'
    return report


VERIFY = {
    'commuting-diagram': verify_commuting_diagram,
    'ehrenfest': verify_ehrenfest,
    'continuity': verify_continuity,
    'separation': verify_separation,
    'boost': verify_boost,
    'algebra': verify_algebra,
}


def cmd_verify(cfg, scenario):
    report = VERIFY[scenario](cfg)
    report['scenario'] = scenario
    save_report(cfg, 'verify_%s.json' % scenario.replace('-', '_'), report)
    Timing.prt('%s: %s' % (scenario, 'passed' if report['passed']
                           else 'FAILED (%s)' % report['status']))
    return EXIT_OK if report['passed'] else EXIT_NUMERICAL


COMMAND_FUNCS = {
    'transform': cmd_transform,
    'act': cmd_act,
    'invariants': cmd_invariants,
    'classify': cmd_classify,
    'preset': cmd_preset,
    'evolve': cmd_evolve,
}


def dispatch(cfg, command, scenario=None):
    os.makedirs(cfg.out_dir, exist_ok=True)
    if command == 'verify':
        return cmd_verify(cfg, scenario)
    return COMMAND_FUNCS[command](cfg)


def main(argv=None):
    args = create_parser().parse_args(argv)
    name = args.command + (' ' + args.scenario if args.command == 'verify'
                           else '')
    try:
        cfg = parse_config(args.config, grid_n=args.grid_n, box_l=args.box_l,
                           dt=args.dt, t_final=args.t_final, seed=args.seed,
                           out_dir=args.out_dir)
    except ConfigError as e:
        print('Configuration error: %s' % e, file=sys.stderr)
        return EXIT_CONFIG

    t = Timing("Running '%s'" % name)
    try:
        code = dispatch(cfg, args.command, getattr(args, 'scenario', None))
    except (ConfigError, DomainError, InvalidElementError, GridMismatchError,
            EmptyRegionError, UnknownPresetError) as e:
        print('Configuration error: %s' % e, file=sys.stderr)
        code = EXIT_CONFIG
    except (PhaseBranchError, NumericalDomainError,
            SingularInvariantError) as e:
        print('Numerical failure: %s' % e, file=sys.stderr)
        code = EXIT_NUMERICAL
    t.finished('exit code %d' % code)
    return code


if __name__ == '__main__':
    sys.exit(main())
