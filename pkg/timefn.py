""" Scalar functions of time with exact derivatives, and polynomial phase
fields θ(x, t).

A TimeFn is a value object identified by a kind and its parameters:

    constant     f = value
    linear       f = slope * t + intercept
    exponential  f = amplitude * exp(rate * t)
    tabulated    samples f_i on t_i = t0 + i * step, linear interpolation,
                 derivative by 2nd-order centered differences (one-sided
                 2nd order at the table ends)

Arithmetic between TimeFns returns TimeFns. Closed forms are folded when
the result stays in the same kind (constant + linear -> linear, product of
exponentials -> exponential, ...); otherwise the result is an expression
node ('sum', 'product' or 'reciprocal') whose derivative follows the sum,
product and reciprocal rules, so derivatives of gauge-transformed
coefficients stay exact.
"""
import numbers

import numpy as np

from errors import ConfigError, DomainError, InvalidElementError
from lazy import lazy_property
from schema import PHASEFIELD_SCHEMA, TIMEFN_PARAMS, TIMEFN_SCHEMA, check

CLOSED_KINDS = ('constant', 'linear', 'exponential')
KINDS = tuple(TIMEFN_PARAMS)
PARAM_KEYS = {kind: tuple(params) for kind, params in TIMEFN_PARAMS.items()}

# relative slack on the table range when checking the domain
DOMAIN_SLACK = 1e-9
# samples used when a closed-form zero test is not available
VANISH_SAMPLES = 2049


class TimeFn:
    """ Immutable scalar function of time. Use the class constructors
    (`constant`, `linear`, `exponential`, `tabulated`) or `as_timefn`."""

    def __init__(self, kind, params):
        if kind not in KINDS:
            raise ValueError("Unknown TimeFn kind '%s'" % kind)
        self.kind = kind
        self.params = params
        self.domain = self._domain()
        self.grid = self._grid()

    # ------------------------------------------------------------------
    # constructors
    # ------------------------------------------------------------------
    @classmethod
    def constant(cls, value):
        return cls('constant', {'value': float(value)})

    @classmethod
    def linear(cls, slope, intercept=0.0):
        if slope == 0:
            return cls.constant(intercept)
        return cls('linear', {'slope': float(slope),
                              'intercept': float(intercept)})

    @classmethod
    def exponential(cls, rate, amplitude=1.0):
        if rate == 0 or amplitude == 0:
            return cls.constant(amplitude)
        return cls('exponential', {'rate': float(rate),
                                   'amplitude': float(amplitude)})

    @classmethod
    def tabulated(cls, t0, step, values):
        values = tuple(float(v) for v in values)
        if step is None or not step > 0:
            raise DomainError('tabulated TimeFn needs a positive step')
        if len(values) < 3:
            raise DomainError('tabulated TimeFn needs at least 3 samples')
        return cls('tabulated', {'t0': float(t0), 'step': float(step),
                                 'values': values})

    @classmethod
    def from_samples(cls, times, values):
        """ Tabulated TimeFn from uniformly spaced sample times."""
        times = np.asarray(times, dtype=float)
        steps = np.diff(times)
        if not np.allclose(steps, steps[0], rtol=1e-9, atol=0):
            raise DomainError('tabulated TimeFn needs a uniform t-step')
        return cls.tabulated(times[0], steps[0], values)

    # ------------------------------------------------------------------
    # structure
    # ------------------------------------------------------------------
    @property
    def children(self):
        if self.kind == 'sum':
            return self.params['terms']
        if self.kind == 'product':
            return self.params['factors']
        if self.kind == 'reciprocal':
            return (self.params['of'],)
        return ()

    def _domain(self):
        if self.kind == 'tabulated':
            p = self.params
            return (p['t0'], p['t0'] + p['step'] * (len(p['values']) - 1))
        lo, hi = -np.inf, np.inf
        for c in self.children:
            lo, hi = max(lo, c.domain[0]), min(hi, c.domain[1])
        if lo > hi:
            raise DomainError('TimeFn operands have disjoint domains')
        return (lo, hi)

    def _grid(self):
        """ (t0, step, n) of the table(s) this function depends on."""
        if self.kind == 'tabulated':
            p = self.params
            return (p['t0'], p['step'], len(p['values']))
        grid = None
        for c in self.children:
            grid = _merge_grid(grid, c.grid)
        return grid

    @property
    def is_tabulated(self):
        return self.grid is not None

    @property
    def is_constant(self):
        return self.kind == 'constant'

    @property
    def value(self):
        """ Value of a constant TimeFn."""
        if self.kind != 'constant':
            raise ValueError('TimeFn of kind %s has no single value'
                             % self.kind)
        return self.params['value']

    # ------------------------------------------------------------------
    # evaluation
    # ------------------------------------------------------------------
    def check_domain(self, t):
        lo, hi = self.domain
        t = np.asarray(t, dtype=float)
        slack = DOMAIN_SLACK * max(1.0, abs(lo) if np.isfinite(lo) else 1.0,
                                   abs(hi) if np.isfinite(hi) else 1.0)
        if np.any(t < lo - slack) or np.any(t > hi + slack):
            raise DomainError('t=%s outside TimeFn domain [%g, %g]'
                              % (np.min(t) if np.any(t < lo - slack)
                                 else np.max(t), lo, hi))

    def __call__(self, t):
        self.check_domain(t)
        out = self._eval(np.asarray(t, dtype=float))
        if np.ndim(t) == 0:
            return float(out)
        return out

    def _eval(self, t):
        p = self.params
        if self.kind == 'constant':
            return np.full(np.shape(t), p['value'])
        if self.kind == 'linear':
            return p['slope'] * t + p['intercept']
        if self.kind == 'exponential':
            return p['amplitude'] * np.exp(p['rate'] * t)
        if self.kind == 'tabulated':
            lo, hi = self.domain
            nodes = np.linspace(lo, hi, len(p['values']))
            return np.interp(t, nodes, p['values'])
        if self.kind == 'sum':
            out = np.zeros(np.shape(t))
            for term in p['terms']:
                out = out + term._eval(t)
            return out
        if self.kind == 'product':
            out = np.ones(np.shape(t))
            for factor in p['factors']:
                out = out * factor._eval(t)
            return out
        return 1.0 / p['of']._eval(t)

    @lazy_property
    def derivative_fn(self):
        """ The derivative as a TimeFn (cached)."""
        p = self.params
        if self.kind == 'constant':
            return ZERO
        if self.kind == 'linear':
            return TimeFn.constant(p['slope'])
        if self.kind == 'exponential':
            return TimeFn.exponential(p['rate'], p['amplitude'] * p['rate'])
        if self.kind == 'tabulated':
            dv = np.gradient(np.asarray(p['values']), p['step'],
                             edge_order=2)
            return TimeFn.tabulated(p['t0'], p['step'], dv)
        if self.kind == 'sum':
            return add_all([term.derivative_fn for term in p['terms']])
        if self.kind == 'product':
            factors = p['factors']
            terms = []
            for i, f in enumerate(factors):
                others = factors[:i] + factors[i+1:]
                terms.append(multiply_all((f.derivative_fn,) + others))
            return add_all(terms)
        of = p['of']
        return -(of.derivative_fn * self * self)

    def derivative(self, t):
        return self.derivative_fn(t)

    def sample_times(self, window, n=VANISH_SAMPLES):
        lo = max(window[0], self.domain[0])
        hi = min(window[1], self.domain[1])
        if lo > hi:
            raise DomainError('window [%g, %g] outside TimeFn domain [%g, %g]'
                              % (window[0], window[1], *self.domain))
        return np.linspace(lo, hi, n)

    def vanishes(self, window):
        """ True if the function has a zero (or sign change) on `window`."""
        p = self.params
        if self.kind == 'constant':
            return p['value'] == 0.0
        if self.kind == 'exponential':
            return p['amplitude'] == 0.0
        if self.kind == 'linear':
            root = -p['intercept'] / p['slope']
            lo = max(window[0], self.domain[0])
            hi = min(window[1], self.domain[1])
            return lo <= root <= hi
        times = self.sample_times(window)
        if self.kind == 'tabulated':
            # include every table node inside the window
            nodes = np.linspace(*self.domain, len(p['values']))
            times = np.union1d(times, nodes[(nodes >= times[0])
                                            & (nodes <= times[-1])])
        values = self._eval(times)
        if np.any(values == 0.0):
            return True
        return bool(np.any(np.sign(values[1:]) != np.sign(values[:-1])))

    def max_abs(self, window, n=VANISH_SAMPLES):
        if self.kind == 'constant':
            return abs(self.params['value'])
        return float(np.max(np.abs(self._eval(self.sample_times(window, n)))))

    def is_time_independent(self, window, rtol=1e-12):
        if self.kind == 'constant':
            return True
        values = self._eval(self.sample_times(window, 257))
        scale = max(np.max(np.abs(values)), 1e-300)
        return bool(np.ptp(values) <= rtol * scale)

    # ------------------------------------------------------------------
    # arithmetic
    # ------------------------------------------------------------------
    def __add__(self, other):
        return add(self, as_timefn(other))

    __radd__ = __add__

    def __neg__(self):
        return multiply(MINUS_ONE, self)

    def __sub__(self, other):
        return add(self, -as_timefn(other))

    def __rsub__(self, other):
        return add(as_timefn(other), -self)

    def __mul__(self, other):
        return multiply(self, as_timefn(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return multiply(self, reciprocal(as_timefn(other)))

    def __rtruediv__(self, other):
        return multiply(as_timefn(other), reciprocal(self))

    # ------------------------------------------------------------------
    # comparison and serialization
    # ------------------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, TimeFn):
            return NotImplemented
        return self.kind == other.kind and self.params == other.params

    __hash__ = None

    def __repr__(self):
        if self.kind in ('sum', 'product', 'reciprocal'):
            return 'TimeFn(%s, %r)' % (self.kind, list(self.children))
        if self.kind == 'tabulated':
            return 'TimeFn(tabulated, t0=%g, step=%g, n=%d)' % self.grid
        return 'TimeFn(%s, %s)' % (self.kind, ', '.join(
            '%s=%g' % (k, v) for k, v in self.params.items()))

    def to_dict(self):
        p = self.params
        if self.kind == 'tabulated':
            params = {'t0': p['t0'], 'step': p['step'],
                      'values': list(p['values'])}
        elif self.kind == 'reciprocal':
            params = {'of': p['of'].to_dict()}
        elif self.kind in ('sum', 'product'):
            key = PARAM_KEYS[self.kind][0]
            params = {key: [c.to_dict() for c in p[key]]}
        else:
            params = dict(p)
        return {'kind': self.kind, 'params': params}

    @classmethod
    def from_dict(cls, d, path='timefn'):
        """ Rebuild a TimeFn from a number or its {kind, params} form,
        checked against the TimeFn schema first (violations raise
        ConfigError with the dotted path of the offending key)."""
        check(d, TIMEFN_SCHEMA, path)
        return cls._build(d, path)

    @classmethod
    def _build(cls, d, path):
        if not isinstance(d, dict):
            return cls.constant(d)
        kind, params = d['kind'], d['params']
        ppath = path + '.params'
        if kind in CLOSED_KINDS:
            return cls(kind, {k: float(params[k]) for k in PARAM_KEYS[kind]})
        if kind == 'tabulated':
            try:
                return cls.tabulated(params['t0'], params['step'],
                                     params['values'])
            except DomainError as e:
                raise ConfigError(ppath, str(e))
        if kind == 'reciprocal':
            return cls(kind, {'of': cls._build(params['of'], ppath + '.of')})
        key = PARAM_KEYS[kind][0]
        return cls(kind, {key: tuple(
            cls._build(c, '%s.%s[%d]' % (ppath, key, i))
            for i, c in enumerate(params[key]))})


def _merge_grid(a, b):
    if a is None:
        return b
    if b is None or a == b:
        return a
    raise DomainError('tabulated TimeFns on different tables: '
                      't0=%g step=%g n=%d vs t0=%g step=%g n=%d' % (a + b))


def as_timefn(v):
    """ Numbers become constants, dicts are parsed, TimeFns pass."""
    if isinstance(v, TimeFn):
        return v
    if isinstance(v, dict):
        return TimeFn.from_dict(v)
    if isinstance(v, numbers.Real):
        return TimeFn.constant(v)
    raise TypeError('Cannot make a TimeFn from %r' % (v,))


ZERO = TimeFn.constant(0.0)
ONE = TimeFn.constant(1.0)
MINUS_ONE = TimeFn.constant(-1.0)


def _as_linear(f):
    if f.kind == 'constant':
        return 0.0, f.params['value']
    return f.params['slope'], f.params['intercept']


def add(a, b):
    _merge_grid(a.grid, b.grid)
    if a.kind == 'constant' and a.params['value'] == 0.0:
        return b
    if b.kind == 'constant' and b.params['value'] == 0.0:
        return a
    if a.kind in ('constant', 'linear') and b.kind in ('constant', 'linear'):
        sa, ia = _as_linear(a)
        sb, ib = _as_linear(b)
        return TimeFn.linear(sa + sb, ia + ib)
    if (a.kind == 'exponential' and b.kind == 'exponential'
            and a.params['rate'] == b.params['rate']):
        return TimeFn.exponential(a.params['rate'],
                                  a.params['amplitude'] + b.params['amplitude'])
    if a.kind == 'tabulated' and b.kind in ('tabulated', 'constant'):
        return _tab_combine(a, b, np.add)
    if b.kind == 'tabulated' and a.kind == 'constant':
        return _tab_combine(b, a, np.add)
    terms = []
    for f in (a, b):
        terms.extend(f.params['terms'] if f.kind == 'sum' else (f,))
    return TimeFn('sum', {'terms': tuple(terms)})


def multiply(a, b):
    _merge_grid(a.grid, b.grid)
    if b.kind == 'constant' and a.kind != 'constant':
        a, b = b, a
    if a.kind == 'constant':
        c = a.params['value']
        if c == 0.0:
            return ZERO
        if c == 1.0:
            return b
        if b.kind == 'constant':
            return TimeFn.constant(c * b.params['value'])
        if b.kind == 'linear':
            return TimeFn.linear(c * b.params['slope'],
                                 c * b.params['intercept'])
        if b.kind == 'exponential':
            return TimeFn.exponential(b.params['rate'],
                                      c * b.params['amplitude'])
        if b.kind == 'tabulated':
            return _tab_combine(b, a, np.multiply)
        if b.kind == 'sum':
            return add_all([multiply(a, t) for t in b.params['terms']])
        if b.kind == 'product':
            f0 = b.params['factors'][0]
            return multiply_all((multiply(a, f0),) + b.params['factors'][1:])
    if a.kind == 'exponential' and b.kind == 'exponential':
        return TimeFn.exponential(a.params['rate'] + b.params['rate'],
                                  a.params['amplitude'] * b.params['amplitude'])
    factors = []
    for f in (a, b):
        factors.extend(f.params['factors'] if f.kind == 'product' else (f,))
    return TimeFn('product', {'factors': tuple(factors)})


def reciprocal(a):
    if a.kind == 'constant':
        if a.params['value'] == 0.0:
            raise InvalidElementError('reciprocal of a vanishing TimeFn')
        return TimeFn.constant(1.0 / a.params['value'])
    if a.kind == 'exponential':
        return TimeFn.exponential(-a.params['rate'], 1.0 / a.params['amplitude'])
    if a.kind == 'reciprocal':
        return a.params['of']
    if a.kind == 'product':
        return multiply_all([reciprocal(f) for f in a.params['factors']])
    return TimeFn('reciprocal', {'of': a})


def add_all(fns):
    out = ZERO
    for f in fns:
        out = add(out, f)
    return out


def multiply_all(fns):
    out = ONE
    for f in fns:
        out = multiply(out, f)
    return out


def _tab_combine(tab, other, op):
    p = tab.params
    if other.kind == 'constant':
        values = op(np.asarray(p['values']), other.params['value'])
    else:
        values = op(np.asarray(p['values']), np.asarray(other.params['values']))
    return TimeFn.tabulated(p['t0'], p['step'], values)


class PhaseField:
    """ θ(x, t) = Σ_j c_j(t) x^j with TimeFn coefficients (radians).

    The empty polynomial is θ ≡ 0."""

    def __init__(self, coefficients=()):
        coefficients = [as_timefn(c) for c in coefficients]
        while coefficients and coefficients[-1] == ZERO:
            coefficients.pop()
        self.coefficients = tuple(coefficients)

    @classmethod
    def zero(cls):
        return cls(())

    @property
    def is_zero(self):
        return len(self.coefficients) == 0

    def __call__(self, x, t):
        x = np.asarray(x, dtype=float)
        out = np.zeros(np.shape(x))
        for j, c in enumerate(self.coefficients):
            out = out + c(t) * x**j
        return out

    def grad(self, x, t):
        x = np.asarray(x, dtype=float)
        out = np.zeros(np.shape(x))
        for j, c in enumerate(self.coefficients[1:], start=1):
            out = out + j * c(t) * x**(j - 1)
        return out

    def dt(self, x, t):
        x = np.asarray(x, dtype=float)
        out = np.zeros(np.shape(x))
        for j, c in enumerate(self.coefficients):
            out = out + c.derivative(t) * x**j
        return out

    def __add__(self, other):
        n = max(len(self.coefficients), len(other.coefficients))
        a = self.coefficients + (ZERO,) * (n - len(self.coefficients))
        b = other.coefficients + (ZERO,) * (n - len(other.coefficients))
        return PhaseField([ca + cb for ca, cb in zip(a, b)])

    def scaled(self, f):
        """ f(t) θ(x, t) for a TimeFn (or number) f."""
        f = as_timefn(f)
        return PhaseField([f * c for c in self.coefficients])

    def __eq__(self, other):
        if not isinstance(other, PhaseField):
            return NotImplemented
        return self.coefficients == other.coefficients

    __hash__ = None

    def __repr__(self):
        return 'PhaseField(%r)' % (list(self.coefficients),)

    def to_dict(self):
        return {'kind': 'polynomial',
                'params': {'coefficients': [c.to_dict()
                                            for c in self.coefficients]}}

    @classmethod
    def from_dict(cls, d, path='theta'):
        check(d, PHASEFIELD_SCHEMA, path)
        if d is None:
            return cls.zero()
        coefficients = d['params']['coefficients']
        return cls([TimeFn._build(c, '%s.params.coefficients[%d]' % (path, i))
                    for i, c in enumerate(coefficients)])
