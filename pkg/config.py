""" Run configuration: one JSON file per run, checked against `RUN_SCHEMA`
with jsonschema (unknown keys rejected, types checked). Errors are
ConfigError with the dotted path of the offending key.

    {
      "units":       {"hbar": 1.0, "m": 1.0},
      "grid":        {"n": 256, "length": 20.0},
      "time":        {"t0": 0.0, "t1": 1.0, "dt": null, "stride": 1},
      "window":      [0.0, 1.0],
      "seed":        0,
      "out_dir":     "out",
      "workers":     1,
      "samples":     1000,
      "chain":       "F",
      "form":        "laplacian",
      "tolerances":  {"eps_cls": 1e-9, "eps_reg": 1e-12, "eps_phase": 1e-8,
                      "density": 1e-6},
      "coefficients": {"preset": "DG", "params": {"D": 0.05}}
                      or {"nu1": -0.5, "mu0": 1.0, ...},
      "linear":      {"nu1": -0.5, "mu0": 1.0},
      "gauge":       {"gamma": 0.5, "lambda": 1.0, "theta": null},
      "state":       {"kind": "gaussian", "x0": 0.0, "sigma": 1.0, "k0": 0.0},
      "potential":   {"kind": "zero"},
      "invariants_file": "out/invariants.json",
      "velocity":    1.0
    }

Every section is optional. TimeFn values are numbers (constants) or
{"kind": ..., "params": {...}}. The schema covers shapes and types; the
checks that need several values at once (t1 after t0, a power-of-two grid,
the potential length, preset parameters, non-degenerate gauge elements)
are made while building the RunConfig.
"""
import copy
import os

from dynamics import Potential
from errors import ConfigError, UnknownPresetError
from gauge_algebra import (FIELDS, CoefficientVector, GaugeElement, Preset,
                           preset)
from schema import (NUMBER, NUMBERS, POSITIVE, TIMEFN, case, check, closed,
                    document, timefn_map, validator)
from timefn import TimeFn
from utils import read_json
from wavefield import GridSpec

DEFAULTS = {
    'units': {'hbar': 1.0, 'm': 1.0},
    'grid': {'n': 256, 'length': 20.0},
    'time': {'t0': 0.0, 't1': 1.0, 'dt': None, 'stride': 1},
    'window': [0.0, 1.0],
    'seed': 0,
    'out_dir': 'out',
    'workers': 1,
    'samples': 1000,
    'chain': 'F',
    'form': 'laplacian',
    'tolerances': {'eps_cls': 1e-9, 'eps_reg': 1e-12, 'eps_phase': 1e-8,
                   'density': 1e-6},
    'coefficients': None,
    'linear': None,
    'gauge': None,
    'state': {'kind': 'gaussian'},
    'potential': {'kind': 'zero'},
    'invariants_file': None,
    'velocity': 1.0,
}

STRING = {'type': 'string'}
COUNT = {'type': 'integer', 'minimum': 1}

STATE_FIELDS = {
    'gaussian': {'x0': NUMBER, 'sigma': POSITIVE, 'k0': NUMBER},
    'plane_wave': {'k': NUMBER},
    'gausson': {'b': POSITIVE, 'x0': NUMBER},
    'csv': {'path': STRING},
    'json': {'path': STRING},
}
STATE_DEFAULTS = {
    'gaussian': {'x0': 0.0, 'sigma': 1.0, 'k0': 0.0},
    'plane_wave': {'k': 1.0},
    'gausson': {'b': 0.3, 'x0': 0.0},
    'csv': {},
    'json': {},
}

RUN_SCHEMA = validator(document(closed({
    'units': closed({'hbar': POSITIVE, 'm': POSITIVE}),
    'grid': closed({'n': {'type': 'integer', 'minimum': 16},
                    'length': POSITIVE}),
    'time': closed({'t0': NUMBER, 't1': NUMBER,
                    'dt': {'type': ['number', 'null'],
                           'exclusiveMinimum': 0},
                    'stride': COUNT}),
    'window': dict(NUMBERS, minItems=2, maxItems=2),
    'seed': {'type': 'integer', 'minimum': 0},
    'out_dir': STRING,
    'workers': COUNT,
    'samples': COUNT,
    'chain': {'enum': ['F', 'R']},
    'form': {'enum': ['laplacian', 'functional']},
    'tolerances': closed({key: POSITIVE for key in DEFAULTS['tolerances']}),
    'coefficients': {
        'if': {'type': 'object', 'required': ['preset']},
        'then': closed({'preset': STRING,
                        'params': {'type': 'object',
                                   'additionalProperties': TIMEFN}},
                       ('preset',)),
        'else': timefn_map(FIELDS, ('nu1',))},
    'linear': timefn_map(('nu1', 'mu0')),
    'gauge': {'$ref': '#/definitions/gauge'},
    'state': {'type': 'object',
              'properties': {'kind': {'enum': list(STATE_FIELDS)}},
              'allOf': [case('kind', kind,
                             closed(dict(fields, kind={}),
                                    [k for k in fields if k == 'path']),
                             optional=kind == 'gaussian')
                        for kind, fields in STATE_FIELDS.items()]},
    'potential': dict(
        closed({'kind': {'enum': ['zero', 'harmonic', 'array']},
                'omega': NUMBER, 'values': NUMBERS}),
        allOf=[case('kind', 'array', {'required': ['values']})]),
    'invariants_file': {'type': ['string', 'null']},
    'velocity': NUMBER,
})))

FLAG_PATHS = {
    'grid_n': ('grid', 'n'),
    'box_l': ('grid', 'length'),
    'dt': ('time', 'dt'),
    't_final': ('time', 't1'),
    'seed': ('seed',),
    'out_dir': ('out_dir',),
}


class RunConfig:
    """ A validated configuration. Raw sections stay available in `raw`;
    parsed objects (grid, coefficients, gauge, potential) are attributes."""

    def __init__(self, raw):
        self.raw = raw
        self.hbar = float(raw['units']['hbar'])
        self.m = float(raw['units']['m'])

        grid = raw['grid']
        try:
            self.grid = GridSpec(int(grid['n']), float(grid['length']))
        except ValueError as e:
            raise ConfigError('grid.n', str(e))

        time = raw['time']
        self.t0, self.t1 = float(time['t0']), float(time['t1'])
        if self.t1 < self.t0:
            raise ConfigError('time.t1', 't1 must not precede t0')
        self.dt = None if time['dt'] is None else float(time['dt'])
        self.stride = int(time['stride'])

        self.window = tuple(float(t) for t in raw['window'])
        if self.window[1] < self.window[0]:
            raise ConfigError('window', 'empty time window')

        self.seed = int(raw['seed'])
        self.out_dir = raw['out_dir']
        self.workers = int(raw['workers'])
        self.samples = int(raw['samples'])
        self.chain = raw['chain']
        self.form = raw['form']
        self.velocity = float(raw['velocity'])
        self.tolerances = {key: float(v)
                           for key, v in raw['tolerances'].items()}
        self.invariants_file = raw['invariants_file']

        self.coefficients = self._coefficients(raw['coefficients'])
        self.linear = self._linear(raw['linear'])
        self.gauge = self._gauge(raw['gauge'])
        self.state = self._state(raw['state'])
        self.potential = self._potential(raw['potential'])

    # ------------------------------------------------------------------
    def _coefficients(self, d):
        if d is None:
            return None
        if 'preset' not in d:
            return CoefficientVector.from_dict(d, self.window, 'coefficients')
        params = {k: TimeFn.from_dict(v, 'coefficients.params.' + k)
                  for k, v in d.get('params', {}).items()}
        try:
            return preset(d['preset'], self.hbar, self.m, self.window,
                          **params)
        except UnknownPresetError as e:
            raise ConfigError('coefficients.preset', e.args[0])
        except ValueError as e:
            raise ConfigError('coefficients.params', str(e))

    def _linear(self, d):
        d = d or {}
        return (TimeFn.from_dict(d.get('nu1', -self.hbar / (2 * self.m)),
                                 'linear.nu1'),
                TimeFn.from_dict(d.get('mu0', 1.0 / self.hbar), 'linear.mu0'))

    def _gauge(self, d):
        if d is None:
            return None
        try:
            return GaugeElement.from_dict(d, self.window, 'gauge')
        except ConfigError:
            raise
        except ValueError as e:
            raise ConfigError('gauge', str(e))

    def _state(self, d):
        kind = d.get('kind', 'gaussian')
        out = dict(STATE_DEFAULTS[kind], **d)
        out['kind'] = kind
        return {k: v if k in ('kind', 'path') else float(v)
                for k, v in out.items()}

    def _potential(self, d):
        if d['kind'] != 'array':
            return Potential(d['kind'], float(d.get('omega', 1.0)))
        if len(d['values']) != self.grid.n:
            raise ConfigError('potential.values', 'expected a list of %d '
                              'numbers' % self.grid.n)
        return Potential('array', values=[float(v) for v in d['values']])

    def coefficients_or_linear(self):
        if self.coefficients is not None:
            return self.coefficients
        return preset(Preset.LINEAR, self.hbar, self.m, self.window)


def validate_config(cfg):
    """ Check `cfg` against RUN_SCHEMA, then merge it over the defaults."""
    check(cfg, RUN_SCHEMA)
    raw = copy.deepcopy(DEFAULTS)
    for key, value in cfg.items():
        if isinstance(DEFAULTS[key], dict) and key != 'state':
            raw[key] = dict(raw[key], **value)
        else:
            raw[key] = value
    return RunConfig(raw)


def load_config(fn):
    if not os.path.isfile(fn):
        raise ConfigError('config', 'file %s not found' % fn)
    try:
        return read_json(fn)
    except ValueError as e:
        raise ConfigError('config', 'invalid JSON in %s: %s' % (fn, e))


def parse_config(fn=None, **flags):
    """ Load `fn` (if any), apply the command line overrides
    (grid_n, box_l, dt, t_final, seed, out_dir) and validate."""
    cfg = load_config(fn) if fn is not None else {}
    check(cfg, validator({'type': 'object'}), 'config')
    for flag, value in flags.items():
        if value is None:
            continue
        if flag not in FLAG_PATHS:
            raise ConfigError(flag, 'unknown override')
        path = FLAG_PATHS[flag]
        if len(path) == 1:
            cfg[path[0]] = value
        else:
            section = cfg.setdefault(path[0], {})
            if isinstance(section, dict):
                section[path[1]] = value
    return validate_config(cfg)
