""" Algebra of the nonlinear gauge group acting on the F5 family of
nonlinear Schrödinger equations

    i ∂t ψ = i Σ_j ν_j R_j ψ + Σ_k μ_k R_k ψ + μ0 V ψ
             + α1 ln|ψ|² ψ + α2 (arg ψ) ψ

Group elements are triples (γ(t), Λ(t), θ(x, t)) composed as

    (γa, Λa, θa) ∘ (γb, Λb, θb) = (γa + Λa γb, Λa Λb, θa + Λa θb)

and acting on states by ψ = R e^{iS} ↦ R exp i(γ ln R + Λ S + θ). The pure
nonlinear part (θ ≡ 0) maps the ten coefficients of F5 linearly (ν, μ) and
affinely (α) onto themselves. `invariants` returns the eight functions of
the coefficients left unchanged by that action and `classify` reads the
subfamily (F0 ⊂ F1 ⊂ F3 ⊂ F5, or the restricted chain R0 ⊂ ... ⊂ R5) from
their zero pattern.

Everything in this module is a pure function of immutable values.
"""
from enum import Enum

import numpy as np

from errors import (DomainError, InvalidElementError, SingularInvariantError,
                    UnknownPresetError)
from schema import GAUGE_SCHEMA, check, document, timefn_map, validator
from timefn import ONE, ZERO, PhaseField, TimeFn, as_timefn
from timing import Timing

FIELDS = ('nu1', 'nu2', 'mu0', 'mu1', 'mu2', 'mu3', 'mu4', 'mu5',
          'alpha1', 'alpha2')
INVARIANTS = tuple('iota%d' % i for i in range(8))

COEFFICIENTS_SCHEMA = validator(document(timefn_map(FIELDS, ('nu1',))))
INVARIANTS_SCHEMA = validator(document(
    timefn_map(INVARIANTS + ('nu1', 'mu0'), INVARIANTS)))

DEFAULT_WINDOW = (0.0, 1.0)
EPS_CLS = 1e-9


class Family(str, Enum):
    F0 = 'F0'
    F1 = 'F1'
    F3 = 'F3'
    F5 = 'F5'
    R0 = 'R0'
    R1 = 'R1'
    R3 = 'R3'
    R5 = 'R5'
    UNCLASSIFIED = 'Unclassified'


class Preset(str, Enum):
    LINEAR = 'Linear'
    BM = 'BM'
    KOSTIN = 'Kostin'
    DG = 'DG'
    GUERRA_PUSTERLA = 'GuerraPusterla'

    @classmethod
    def lookup(cls, name):
        if isinstance(name, cls):
            return name
        for p in cls:
            if str(name).lower() in (p.value.lower(), p.name.lower()):
                return p
        raise UnknownPresetError(
            "Unknown preset '%s' (expected one of %s)"
            % (name, ', '.join(p.value for p in cls)))


def overlap(w1, w2):
    """ Intersection of two time windows."""
    lo, hi = max(w1[0], w2[0]), min(w1[1], w2[1])
    if lo > hi:
        raise DomainError('time windows [%g, %g] and [%g, %g] do not overlap'
                          % (w1[0], w1[1], w2[0], w2[1]))
    return (lo, hi)


def _window(window):
    if window is None:
        return DEFAULT_WINDOW
    lo, hi = float(window[0]), float(window[1])
    if lo > hi:
        raise DomainError('empty time window [%g, %g]' % (lo, hi))
    return (lo, hi)


# ----------------------------------------------------------------------
# group elements
# ----------------------------------------------------------------------
class GaugeElement:
    """ (γ(t), Λ(t), θ(x, t)); Λ must not vanish on `window`."""

    def __init__(self, gamma=0.0, lam=1.0, theta=None, window=None):
        self.gamma = as_timefn(gamma)
        self.lam = as_timefn(lam)
        if theta is None:
            theta = PhaseField.zero()
        elif not isinstance(theta, PhaseField):
            theta = PhaseField(theta)
        self.theta = theta
        self.window = _window(window)
        if self.lam.vanishes(self.window):
            raise InvalidElementError(
                'degenerate gauge element: lambda vanishes on [%g, %g]'
                % self.window)

    @classmethod
    def identity(cls, window=None):
        return cls(ZERO, ONE, None, window)

    @property
    def is_identity(self):
        return self.gamma == ZERO and self.lam == ONE and self.theta.is_zero

    def at(self, t):
        """ (γ(t), Λ(t))."""
        return self.gamma(t), self.lam(t)

    def __eq__(self, other):
        if not isinstance(other, GaugeElement):
            return NotImplemented
        return (self.gamma == other.gamma and self.lam == other.lam
                and self.theta == other.theta)

    __hash__ = None

    def __repr__(self):
        return 'GaugeElement(gamma=%r, lambda=%r, theta=%r)' % (
            self.gamma, self.lam, self.theta)

    def to_dict(self):
        return {'gamma': self.gamma.to_dict(),
                'lambda': self.lam.to_dict(),
                'theta': self.theta.to_dict()}

    @classmethod
    def from_dict(cls, d, window=None, path='gauge'):
        check(d, GAUGE_SCHEMA, path)
        theta = d.get('theta')
        return cls(TimeFn._build(d.get('gamma', 0.0), path + '.gamma'),
                   TimeFn._build(d.get('lambda', 1.0), path + '.lambda'),
                   PhaseField.zero() if theta is None
                   else PhaseField.from_dict(theta, path + '.theta'),
                   window)


def compose(a, b):
    """ a ∘ b = (γa + Λa γb, Λa Λb, θa + Λa θb)."""
    window = overlap(a.window, b.window)
    return GaugeElement(a.gamma + a.lam * b.gamma,
                        a.lam * b.lam,
                        a.theta + b.theta.scaled(a.lam),
                        window)


def inverse(a):
    """ (−γ/Λ, 1/Λ, −θ/Λ)."""
    if a.lam.vanishes(a.window):
        raise InvalidElementError('cannot invert: lambda vanishes')
    inv_lam = 1.0 / a.lam
    return GaugeElement(-a.gamma * inv_lam, inv_lam,
                        a.theta.scaled(-inv_lam), a.window)


def matrix_rep(a, t, x=0.0):
    """ Lower triangular 3×3 matrix rows (1,0,0), (θ,Λ,0), (γ,0,Λ); θ is
    taken at position `x`."""
    gamma, lam = a.at(t)
    theta = float(a.theta(x, t))
    return np.array([[1.0, 0.0, 0.0],
                     [theta, lam, 0.0],
                     [gamma, 0.0, lam]])


def linear_gauge(theta, window=None):
    """ The gauge transformation of the second kind ψ ↦ e^{iθ} ψ."""
    return GaugeElement(ZERO, ONE, theta, window)


def is_restricted(g):
    """ True for elements of the restricted subgroup (Λ ≡ 1, θ ≡ 0)."""
    return g.lam == ONE and g.theta.is_zero


# ----------------------------------------------------------------------
# (k, λ) parameterization
# ----------------------------------------------------------------------
class AffineGaugeElement:
    """ ψ = R e^{iS} ↦ R exp i(k(R, x, t) + λ(x, t) S).

    `k` is a callable (R, x, t) -> real and `lam` a callable (x, t) -> real;
    numbers are accepted as constants. λ is checked wherever it is
    evaluated."""

    def __init__(self, k=0.0, lam=1.0):
        if not callable(k):
            k_value = float(k)
            k = lambda R, x, t: np.full(np.broadcast(R, x).shape, k_value)
        if not callable(lam):
            lam_value = float(lam)
            if lam_value == 0.0:
                raise InvalidElementError('degenerate affine element: '
                                          'lambda = 0')
            lam = lambda x, t: np.full(np.shape(x), lam_value)
        self.k = k
        self._lam = lam

    @classmethod
    def identity(cls):
        return cls(0.0, 1.0)

    def lam(self, x, t):
        out = np.asarray(self._lam(x, t), dtype=float)
        if np.any(out == 0.0):
            raise InvalidElementError('degenerate affine element: lambda '
                                      'vanishes at t=%g' % t)
        return out

    def at(self, R, x, t):
        """ (k(R, x, t), λ(x, t))."""
        return np.asarray(self.k(R, x, t), dtype=float), self.lam(x, t)


def compose_affine(a, b):
    """ (ka + λa kb, λa λb)."""
    return AffineGaugeElement(
        lambda R, x, t: a.k(R, x, t) + a.lam(x, t) * b.k(R, x, t),
        lambda x, t: a.lam(x, t) * b.lam(x, t))


def affine_inverse(a):
    """ (−k/λ, 1/λ)."""
    return AffineGaugeElement(
        lambda R, x, t: -a.k(R, x, t) / a.lam(x, t),
        lambda x, t: 1.0 / a.lam(x, t))


def affine_matrix(a, R, x, t):
    """ 2×2 matrix [[1, 0], [k, λ]] at a single point (R, x, t)."""
    k, lam = a.at(R, x, t)
    return np.array([[1.0, 0.0], [float(k), float(lam)]])


def affine_from_gauge(g):
    """ The (k, λ) form of a (γ, Λ, θ) element: k = γ ln R + θ, λ = Λ."""
    def k(R, x, t):
        with np.errstate(divide='ignore'):
            log_r = np.log(np.asarray(R, dtype=float))
        return g.gamma(t) * log_r + g.theta(x, t)

    return AffineGaugeElement(
        k, lambda x, t: np.full(np.shape(x), g.lam(t)))


def intertwine(a, theta):
    """ θ' = λθ such that N_(k,λ) U_θ = U_θ' N_(k,λ). Returns a callable
    (x, t) -> θ'(x, t); for a GaugeElement the result is a PhaseField."""
    if isinstance(a, GaugeElement):
        return theta.scaled(a.lam)
    return lambda x, t: a.lam(x, t) * theta(x, t)


# ----------------------------------------------------------------------
# coefficient vectors
# ----------------------------------------------------------------------
class CoefficientVector:
    """ The ten time-dependent coefficients of an F5 equation.

    `window` is the time interval on which the vector is used (zero tests,
    classification); `meta` holds non-fatal notes such as boundary
    derivative warnings."""

    def __init__(self, nu1, nu2=0.0, mu0=0.0, mu1=0.0, mu2=0.0, mu3=0.0,
                 mu4=0.0, mu5=0.0, alpha1=0.0, alpha2=0.0, window=None,
                 meta=None):
        self.nu1 = as_timefn(nu1)
        self.nu2 = as_timefn(nu2)
        self.mu0 = as_timefn(mu0)
        self.mu1 = as_timefn(mu1)
        self.mu2 = as_timefn(mu2)
        self.mu3 = as_timefn(mu3)
        self.mu4 = as_timefn(mu4)
        self.mu5 = as_timefn(mu5)
        self.alpha1 = as_timefn(alpha1)
        self.alpha2 = as_timefn(alpha2)
        self.window = _window(window)
        self.meta = {'warnings': []} if meta is None else meta

    @property
    def fields(self):
        return tuple(getattr(self, name) for name in FIELDS)

    def at(self, t):
        """ The ten coefficient values at time t, in FIELDS order."""
        return np.array([f(t) for f in self.fields])

    def replace(self, **changes):
        kwargs = {name: getattr(self, name) for name in FIELDS}
        kwargs.update(changes)
        window = kwargs.pop('window', self.window)
        return CoefficientVector(window=window, meta={'warnings': []},
                                 **kwargs)

    @property
    def kappa(self):
        """ κ = μ2 − ½ν1."""
        return self.mu2 - 0.5 * self.nu1

    @property
    def xi(self):
        """ ξ = μ5 + ¼ν1."""
        return self.mu5 + 0.25 * self.nu1

    def check_nu1(self, exc=InvalidElementError):
        if self.nu1.vanishes(self.window):
            raise exc('nu1 vanishes on [%g, %g]' % self.window)

    def is_time_independent(self):
        return all(f.is_time_independent(self.window) for f in self.fields)

    def __eq__(self, other):
        if not isinstance(other, CoefficientVector):
            return NotImplemented
        return self.fields == other.fields

    __hash__ = None

    def __repr__(self):
        return 'CoefficientVector(%s)' % ', '.join(
            '%s=%r' % (n, f) for n, f in zip(FIELDS, self.fields))

    def to_dict(self, flat=False):
        """ {field: TimeFn dict}; with `flat`, constants are written as
        plain numbers."""
        return {name: _fn_to_json(f, flat)
                for name, f in zip(FIELDS, self.fields)}

    @classmethod
    def from_dict(cls, d, window=None, path='coefficients'):
        check(d, COEFFICIENTS_SCHEMA, path)
        return cls(window=window, **{
            name: TimeFn._build(d.get(name, 0.0), '%s.%s' % (path, name))
            for name in FIELDS})


def _fn_to_json(f, flat):
    if flat and f.is_constant:
        return f.value
    return f.to_dict()


class InvariantVector:
    """ ι0 ... ι7 as TimeFns. `nu1` and `mu0` are carried along: they are
    invariants of the restricted group and needed for the R chain."""

    def __init__(self, iotas, window=None, nu1=None, mu0=None):
        iotas = tuple(as_timefn(i) for i in iotas)
        if len(iotas) != 8:
            raise ValueError('expected 8 invariants, got %d' % len(iotas))
        self.iotas = iotas
        self.window = _window(window)
        self.nu1 = None if nu1 is None else as_timefn(nu1)
        self.mu0 = None if mu0 is None else as_timefn(mu0)

    def __getattr__(self, name):
        if name.startswith('iota') and name[4:].isdigit():
            return self.iotas[int(name[4:])]
        raise AttributeError(name)

    def __getitem__(self, i):
        return self.iotas[i]

    def at(self, t):
        return np.array([i(t) for i in self.iotas])

    def max_abs(self, window=None):
        window = self.window if window is None else window
        return np.array([i.max_abs(window) for i in self.iotas])

    def __eq__(self, other):
        if not isinstance(other, InvariantVector):
            return NotImplemented
        return (self.iotas == other.iotas and self.nu1 == other.nu1
                and self.mu0 == other.mu0)

    __hash__ = None

    def to_dict(self, flat=False):
        d = {name: _fn_to_json(f, flat)
             for name, f in zip(INVARIANTS, self.iotas)}
        if self.nu1 is not None:
            d['nu1'] = _fn_to_json(self.nu1, flat)
        if self.mu0 is not None:
            d['mu0'] = _fn_to_json(self.mu0, flat)
        return d

    @classmethod
    def from_dict(cls, d, window=None, path='invariants'):
        check(d, INVARIANTS_SCHEMA, path)
        iotas = [TimeFn._build(d[name], '%s.%s' % (path, name))
                 for name in INVARIANTS]
        extra = {k: TimeFn._build(d[k], '%s.%s' % (path, k))
                 for k in ('nu1', 'mu0') if k in d}
        return cls(iotas, window, **extra)


# ----------------------------------------------------------------------
# action on the coefficients
# ----------------------------------------------------------------------
def action_matrix(gamma, lam):
    """ The 8×8 matrix of the pure nonlinear action on
    (ν1, ν2, μ0, μ1, μ2, μ3, μ4, μ5) for numbers γ, Λ."""
    g, L = float(gamma), float(lam)
    if L == 0.0:
        raise InvalidElementError('degenerate gauge element: lambda = 0')
    A = np.zeros((8, 8))
    A[0, 0] = 1 / L
    A[1, 0], A[1, 1] = -g / (2 * L), 1.0
    A[2, 2] = L
    A[3, 0], A[3, 3] = -g / L, 1.0
    A[4, 0], A[4, 1], A[4, 3], A[4, 4] = g * g / (2 * L), -g, -g / 2, L
    A[5, 5] = 1 / L
    A[6, 5], A[6, 6] = -g / L, 1.0
    A[7, 5], A[7, 6], A[7, 7] = g * g / (4 * L), -g / 2, L
    return A


def act_on_coefficients(g, c):
    """ Coefficients of the equation obeyed by N_(γ,Λ)[ψ] when ψ obeys the
    equation with coefficients `c`.

    The θ-part of `g` must vanish. The α's transform affinely with the time
    derivatives of γ and Λ:

        α1' = Λα1 − ½γα2 + ½(γΛ̇/Λ − γ̇),   α2' = α2 − Λ̇/Λ
    """
    if not g.theta.is_zero:
        raise InvalidElementError('the theta part of a gauge element does not '
                                  'act on F5 coefficients')
    window = overlap(g.window, c.window)
    if g.lam.vanishes(window):
        raise InvalidElementError('degenerate gauge element: lambda vanishes '
                                  'on [%g, %g]' % window)
    c = c.replace(window=window)
    c.check_nu1()

    G, L = g.gamma, g.lam
    iL = 1.0 / L
    dG, dL = G.derivative_fn, L.derivative_fn
    out = CoefficientVector(
        nu1=c.nu1 * iL,
        nu2=-0.5 * G * iL * c.nu1 + c.nu2,
        mu0=L * c.mu0,
        mu1=-G * iL * c.nu1 + c.mu1,
        mu2=(0.5 * G * G * iL * c.nu1 - G * c.nu2 - 0.5 * G * c.mu1
             + L * c.mu2),
        mu3=c.mu3 * iL,
        mu4=-G * iL * c.mu3 + c.mu4,
        mu5=0.25 * G * G * iL * c.mu3 - 0.5 * G * c.mu4 + L * c.mu5,
        alpha1=(L * c.alpha1 - 0.5 * G * c.alpha2
                + 0.5 * (G * dL * iL - dG)),
        alpha2=c.alpha2 - dL * iL,
        window=window)
    _boundary_warnings(g, out)
    return out


def _boundary_warnings(g, out):
    for name, f in (('gamma', g.gamma), ('lambda', g.lam)):
        if f.is_tabulated:
            lo, hi = f.domain
            msg = ('%s derivative uses one-sided differences at the table '
                   'ends t=%g and t=%g' % (name, lo, hi))
            out.meta['warnings'].append(msg)
            Timing.debug(msg)


def closure_coefficients(nu1, mu0, g):
    """ Coefficients of the linearizable equation obtained by transforming
    the linear equation (ν1, μ0) with `g`:

        ν1' = ν1/Λ        μ0' = Λμ0        μ1' = −γν1/Λ
        κ'  = (γ² + Λ² − 1)ν1/(2Λ)          ξ' = −½κ'
        ν2' = ½μ1'        μ3' = −ν1'       μ4' = −μ1'
        α1' = γΛ̇/(2Λ) − ½γ̇                 α2' = −Λ̇/Λ

    with μ2 = κ + ½ν1 and μ5 = ξ − ¼ν1.
    """
    nu1, mu0 = as_timefn(nu1), as_timefn(mu0)
    if nu1.vanishes(g.window):
        raise InvalidElementError('nu1 vanishes on [%g, %g]' % g.window)
    if not g.theta.is_zero:
        raise InvalidElementError('the theta part of a gauge element does not '
                                  'act on F5 coefficients')
    G, L = g.gamma, g.lam
    iL = 1.0 / L
    dG, dL = G.derivative_fn, L.derivative_fn
    nu1p = nu1 * iL
    mu1p = -G * iL * nu1
    kappa = 0.5 * (G * G + L * L - 1.0) * iL * nu1
    xi = -0.5 * kappa
    out = CoefficientVector(
        nu1=nu1p,
        nu2=0.5 * mu1p,
        mu0=L * mu0,
        mu1=mu1p,
        mu2=kappa + 0.5 * nu1p,
        mu3=-nu1p,
        mu4=-mu1p,
        mu5=xi - 0.25 * nu1p,
        alpha1=0.5 * G * dL * iL - 0.5 * dG,
        alpha2=-dL * iL,
        window=g.window)
    _boundary_warnings(g, out)
    return out


# ----------------------------------------------------------------------
# families
# ----------------------------------------------------------------------
def embed_linear(nu1, mu0, window=None):
    """ The linear equation i∂tψ = (ν1Δ + μ0V)ψ as a member of F5."""
    nu1 = as_timefn(nu1)
    return CoefficientVector(nu1=nu1, mu0=mu0, mu2=0.5 * nu1, mu3=-nu1,
                             mu5=-0.25 * nu1, window=window)


def family_f1(nu1, mu0, mu1=0.0, kappa=0.0, alpha1=0.0, alpha2=0.0,
              window=None):
    """ Member of F1 (six free coefficients): ν2 = ½μ1, μ3 = −ν1,
    μ4 = −μ1, ξ = −½κ."""
    nu1, mu1, kappa = as_timefn(nu1), as_timefn(mu1), as_timefn(kappa)
    return CoefficientVector(
        nu1=nu1, nu2=0.5 * mu1, mu0=mu0, mu1=mu1,
        mu2=kappa + 0.5 * nu1, mu3=-nu1, mu4=-mu1,
        mu5=-0.5 * kappa - 0.25 * nu1,
        alpha1=alpha1, alpha2=alpha2, window=window)


def family_f3(nu1, nu2, mu0, mu1=0.0, kappa=0.0, xi=0.0, alpha1=0.0,
              alpha2=0.0, window=None):
    """ Member of F3 (eight free coefficients): μ3 = −ν1, μ4 = −μ1."""
    nu1, mu1 = as_timefn(nu1), as_timefn(mu1)
    return CoefficientVector(
        nu1=nu1, nu2=nu2, mu0=mu0, mu1=mu1,
        mu2=as_timefn(kappa) + 0.5 * nu1, mu3=-nu1, mu4=-mu1,
        mu5=as_timefn(xi) - 0.25 * nu1,
        alpha1=alpha1, alpha2=alpha2, window=window)


def family_f5(nu1, nu2=0.0, mu0=0.0, mu1=0.0, mu2=0.0, mu3=0.0, mu4=0.0,
              mu5=0.0, alpha1=0.0, alpha2=0.0, window=None):
    return CoefficientVector(nu1, nu2, mu0, mu1, mu2, mu3, mu4, mu5,
                             alpha1, alpha2, window=window)


def r_family(j, nu1, mu0, window=None, **kwargs):
    """ Member of the restricted family R_j (j in 0, 1, 3, 5): F_j with
    constant ν1 and μ0, μ3 = −ν1 and α2 = 0."""
    nu1, mu0 = as_timefn(nu1), as_timefn(mu0)
    if not (nu1.is_constant and mu0.is_constant):
        raise DomainError('restricted families need constant nu1 and mu0')
    if 'alpha2' in kwargs or 'mu3' in kwargs:
        raise ValueError('alpha2 and mu3 are fixed in restricted families')
    if j == 0:
        return embed_linear(nu1, mu0, window)
    if j == 1:
        return family_f1(nu1, mu0, window=window, **kwargs)
    if j == 3:
        return family_f3(nu1, kwargs.pop('nu2', 0.0), mu0, window=window,
                         **kwargs)
    if j == 5:
        return family_f5(nu1, mu0=mu0, mu3=-nu1, window=window, **kwargs)
    raise ValueError('restricted families are R0, R1, R3 and R5, not R%s' % j)


def in_r_family(c, eps=EPS_CLS):
    """ ν1, μ0 time-independent, μ3 = −ν1 and α2 = 0 on the window."""
    scale = max(c.nu1.max_abs(c.window), 1e-300)
    return (c.nu1.is_time_independent(c.window)
            and c.mu0.is_time_independent(c.window)
            and (c.mu3 + c.nu1).max_abs(c.window) <= eps * scale
            and c.alpha2.max_abs(c.window) <= eps * scale)


# ----------------------------------------------------------------------
# invariants and classification
# ----------------------------------------------------------------------
def invariants(c):
    """ ι0 ... ι7 of a coefficient vector:

        ι0 = ν1μ0               ι1 = ν1μ2 − ν2μ1        ι2 = μ1 − 2ν2
        ι3 = 1 + μ3/ν1          ι4 = μ4 − μ1μ3/ν1
        ι5 = ν1(μ2 + 2μ5) − ν2(μ1 + 2μ4) + 2ν2²μ3/ν1
        ι6 = ν1α1 − ν2α2 + ν2ν̇1/ν1 − ν̇2
        ι7 = α2 − ν̇1/ν1
    """
    c.check_nu1(SingularInvariantError)
    n1, n2, m0, m1, m2, m3, m4, m5, a1, a2 = c.fields
    inv_n1 = 1.0 / n1
    dn1, dn2 = n1.derivative_fn, n2.derivative_fn
    iotas = (
        n1 * m0,
        n1 * m2 - n2 * m1,
        m1 - 2.0 * n2,
        1.0 + m3 * inv_n1,
        m4 - m1 * m3 * inv_n1,
        n1 * (m2 + 2.0 * m5) - n2 * (m1 + 2.0 * m4)
        + 2.0 * n2 * n2 * m3 * inv_n1,
        n1 * a1 - n2 * a2 + n2 * dn1 * inv_n1 - dn2,
        a2 - dn1 * inv_n1,
    )
    return InvariantVector(iotas, c.window, nu1=n1, mu0=m0)


def zero_pattern(iv, window=None, eps=EPS_CLS):
    """ Boolean array: which ι vanish on the window, relative to max|ι0|."""
    window = iv.window if window is None else window
    amax = iv.max_abs(window)
    scale = amax[0] if amax[0] > 0 else 1.0
    return amax <= eps * scale


def classify(iv, chain='F', window=None, eps=EPS_CLS):
    """ Smallest family of the F chain (or of the R chain) whose zero
    pattern matches the invariants."""
    window = iv.window if window is None else window
    zero = zero_pattern(iv, window, eps)
    if chain == 'F':
        if zero[2:8].all():
            return Family.F0
        if zero[2:6].all():
            return Family.F1
        if zero[3] and zero[4]:
            return Family.F3
        return Family.F5
    if chain != 'R':
        raise ValueError("chain must be 'F' or 'R', not %r" % (chain,))
    if (iv.nu1 is None or iv.mu0 is None
            or not iv.nu1.is_time_independent(window)
            or not iv.mu0.is_time_independent(window)
            or not (zero[3] and zero[7])):
        return Family.UNCLASSIFIED
    if zero[2:7].all():
        return Family.R0
    if zero[2:6].all():
        return Family.R1
    if zero[4]:
        return Family.R3
    return Family.R5


def time_translation_invariant(c):
    """ All invariants constant on the window."""
    iv = invariants(c)
    return all(i.is_time_independent(c.window) for i in iv.iotas)


def galilei_invariant(c, eps=EPS_CLS):
    """ Constant invariants with ι3 = ι4 = ι7 = 0."""
    iv = invariants(c)
    zero = zero_pattern(iv, eps=eps)
    return bool(time_translation_invariant(c) and zero[3] and zero[4]
                and zero[7])


def orbit_jacobian(c, t, gamma=0.0, lam=1.0, h=1e-6):
    """ 8×2 Jacobian of (γ, Λ) ↦ A(γ, Λ)·(ν, μ)(t) by central differences."""
    nu = c.at(t)[:8]
    dg = (action_matrix(gamma + h, lam) - action_matrix(gamma - h, lam)) @ nu
    dl = (action_matrix(gamma, lam + h) - action_matrix(gamma, lam - h)) @ nu
    return np.column_stack([dg, dl]) / (2 * h)


def orbit_dimension(c, t, gamma=0.0, lam=1.0):
    jac = orbit_jacobian(c, t, gamma, lam)
    return int(np.linalg.matrix_rank(jac, tol=1e-8 * max(np.abs(jac).max(),
                                                         1e-300)))


# ----------------------------------------------------------------------
# presets
# ----------------------------------------------------------------------
def preset(name, hbar=1.0, m=1.0, window=None, **params):
    """ Coefficients of the named equation, with ν1 = −ħ/2m.

    Linear: no parameters. BM: b (α1 = −b/ħ). Kostin: f (α2 = f/m).
    DG: D, Dp (D', defaults to D), c1 ... c5; ν2 = D/2 for every ħ, so the
    density obeys ∂tρ = −(ħ/m)∇·J + DΔρ.
    GuerraPusterla: Dp, c2 (DG with D = 0, c1 = c3 = c4 = 0, c5 = −½c2).
    Parameters may be numbers or TimeFns.
    """
    p = Preset.lookup(name)
    allowed = {Preset.LINEAR: (), Preset.BM: ('b',), Preset.KOSTIN: ('f',),
               Preset.DG: ('D', 'Dp', 'c1', 'c2', 'c3', 'c4', 'c5'),
               Preset.GUERRA_PUSTERLA: ('Dp', 'c2')}[p]
    for key in params:
        if key not in allowed:
            raise ValueError("preset %s has no parameter '%s'"
                             % (p.value, key))
    hbar, m = float(hbar), float(m)
    if hbar <= 0 or m <= 0:
        raise ValueError('hbar and m must be positive')
    nu1 = -hbar / (2 * m)
    linear = dict(nu1=nu1, mu0=1.0 / hbar, mu2=nu1 / 2, mu3=-nu1,
                  mu5=-nu1 / 4)

    if p is Preset.LINEAR:
        return CoefficientVector(window=window, **linear)
    if p is Preset.BM:
        b = as_timefn(params.get('b', 0.0))
        return CoefficientVector(alpha1=-b / hbar, window=window, **linear)
    if p is Preset.KOSTIN:
        f = as_timefn(params.get('f', 0.0))
        return CoefficientVector(alpha2=f / m, window=window, **linear)

    if p is Preset.GUERRA_PUSTERLA:
        params = {'D': 0.0, 'Dp': params.get('Dp', 1.0),
                  'c2': params.get('c2', 0.0)}
        params['c5'] = -0.5 * as_timefn(params['c2'])
    D = as_timefn(params.get('D', 0.0))
    Dp = as_timefn(params.get('Dp', D))
    c = [as_timefn(params.get('c%d' % i, 0.0)) for i in range(1, 6)]
    # i∂tψ form: the ħ of the Fokker-Planck term and of R is divided out
    return CoefficientVector(
        nu1=nu1,
        nu2=0.5 * D,
        mu0=1.0 / hbar,
        mu1=Dp * c[0],
        mu2=Dp * c[1] + nu1 / 2,
        mu3=Dp * c[2] - nu1,
        mu4=Dp * c[3],
        mu5=Dp * c[4] - nu1 / 4,
        window=window)


def _same(f, g, window, rtol=1e-12):
    if f == g:
        return True
    t = np.linspace(window[0], window[1], 33)
    a, b = np.asarray(f(t)), np.asarray(g(t))
    return bool(np.allclose(a, b, rtol=rtol,
                            atol=rtol * max(np.abs(a).max(), np.abs(b).max(),
                                            1.0)))


def identify_preset(c, hbar=1.0, m=1.0):
    """ The preset `c` is an instance of (most specific first), or None."""
    window = c.window
    lin = preset(Preset.LINEAR, hbar, m)
    same = {name: _same(getattr(c, name), getattr(lin, name), window)
            for name in FIELDS}
    nonlinear = ('nu2', 'mu1', 'mu2', 'mu3', 'mu4', 'mu5')
    base = same['nu1'] and same['mu0']
    if not base:
        return None
    if all(same[n] for n in nonlinear):
        if same['alpha1'] and same['alpha2']:
            return Preset.LINEAR
        if same['alpha2']:
            return Preset.BM
        if same['alpha1']:
            return Preset.KOSTIN
        return None
    if not (same['alpha1'] and same['alpha2']):
        return None
    # DG: every nonlinear coefficient is free once ν1 and μ0 match
    d = {n: getattr(c, n) - getattr(lin, n) for n in nonlinear}
    zero = {n: _same(f, ZERO, window) for n, f in d.items()}
    if (zero['nu2'] and zero['mu1'] and zero['mu3'] and zero['mu4']
            and not zero['mu2']
            and _same(d['mu5'], -0.5 * d['mu2'], window)):
        return Preset.GUERRA_PUSTERLA
    return Preset.DG


# ----------------------------------------------------------------------
# seeded property suite
# ----------------------------------------------------------------------
def random_timefn(rng, lo, hi, window=DEFAULT_WINDOW):
    """ A random constant, linear or exponential TimeFn whose values on
    `window` stay within [lo, hi] (exponentials up to a factor e)."""
    kind = rng.integers(3)
    if kind == 0:
        return TimeFn.constant(rng.uniform(lo, hi))
    if kind == 1:
        v0, v1 = rng.uniform(lo, hi, size=2)
        slope = (v1 - v0) / (window[1] - window[0])
        return TimeFn.linear(slope, v0 - slope * window[0])
    rate = rng.uniform(-1, 1) / max(window[1] - window[0], 1.0)
    amp = rng.uniform(lo, hi) * np.exp(-rate * window[0])
    return TimeFn.exponential(rate, amp)


def random_element(rng, window=DEFAULT_WINDOW, theta=True, positive=False,
                   gamma_max=5.0, lam_range=(0.1, 10.0)):
    """ Random (γ, Λ, θ): |γ| ≤ gamma_max, |Λ| in lam_range, θ a polynomial
    of degree at most 2 with constant coefficients."""
    sign = 1.0 if positive or rng.random() < 0.5 else -1.0
    lam = sign * random_timefn(rng, lam_range[0], lam_range[1], window)
    phase = PhaseField(rng.uniform(-3, 3, size=rng.integers(3))) if theta \
        else None
    gamma = random_timefn(rng, -gamma_max, gamma_max, window)
    return GaugeElement(gamma, lam, phase, window)


def random_coefficients(rng, window=DEFAULT_WINDOW):
    """ Random F5 member with ν1 bounded away from zero."""
    sign = 1.0 if rng.random() < 0.5 else -1.0
    kwargs = {name: random_timefn(rng, -2.0, 2.0, window)
              for name in FIELDS[1:]}
    return CoefficientVector(sign * random_timefn(rng, 0.1, 2.0, window),
                             window=window, **kwargs)


def _rel_err(a, b):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    scale = np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
    return float(np.max(np.abs(a - b) / scale))


def _element_values(g, ts, xs):
    return np.concatenate([np.atleast_1d(g.gamma(ts)),
                           np.atleast_1d(g.lam(ts)),
                           np.ravel([g.theta(xs, t) for t in ts])])


def property_suite(samples=1000, seed=0, window=DEFAULT_WINDOW,
                   tol_group=1e-12, tol_invariance=1e-10):
    """ Seeded random checks of the group axioms, of the homomorphism to
    3×3 matrices, of the action (g∘h acts as g after h) and of the
    invariance of ι0 ... ι7. Returns the largest relative errors."""
    rng = np.random.default_rng(seed)
    ts = np.linspace(window[0], window[1], 5)
    xs = np.array([-2.0, 0.0, 1.5])
    worst = dict(associativity=0.0, inverse=0.0, homomorphism=0.0,
                 action=0.0, invariance=0.0)
    with Timing('Algebra property suite (samples=%d, seed=%d)'
                % (samples, seed)) as tm:
        for _ in range(samples):
            a, b, c = (random_element(rng, window) for _ in range(3))
            left = compose(compose(a, b), c)
            right = compose(a, compose(b, c))
            worst['associativity'] = max(worst['associativity'], _rel_err(
                _element_values(left, ts, xs),
                _element_values(right, ts, xs)))
            e = compose(a, inverse(a))
            ident = GaugeElement.identity(window)
            worst['inverse'] = max(worst['inverse'], _rel_err(
                _element_values(e, ts, xs), _element_values(ident, ts, xs)))
            ab = compose(a, b)
            for t in ts:
                for x in xs:
                    worst['homomorphism'] = max(
                        worst['homomorphism'],
                        _rel_err(matrix_rep(ab, t, x),
                                 matrix_rep(a, t, x) @ matrix_rep(b, t, x)))

            g, h = (random_element(rng, window, theta=False, positive=True,
                                   gamma_max=2.0, lam_range=(0.5, 2.0))
                    for _ in range(2))
            coeffs = random_coefficients(rng, window)
            once = act_on_coefficients(compose(g, h), coeffs)
            twice = act_on_coefficients(g, act_on_coefficients(h, coeffs))
            worst['action'] = max(worst['action'], _rel_err(
                [once.at(t) for t in ts], [twice.at(t) for t in ts]))
            g = random_element(rng, window, theta=False, positive=True,
                               gamma_max=3.0, lam_range=(0.2, 5.0))
            moved = act_on_coefficients(g, coeffs)
            before, after = invariants(coeffs), invariants(moved)
            worst['invariance'] = max(worst['invariance'], _rel_err(
                [before.at(t) for t in ts], [after.at(t) for t in ts]))
        tm.prt('largest errors: ' + ', '.join(
            '%s=%.2e' % kv for kv in sorted(worst.items())))
    group = ('associativity', 'inverse', 'homomorphism')
    passed = (all(worst[k] <= tol_group for k in group)
              and worst['action'] <= tol_invariance
              and worst['invariance'] <= tol_invariance)
    report = {'samples': samples, 'seed': seed, 'passed': bool(passed)}
    report.update({'max_%s_err' % k: v for k, v in worst.items()})
    return report
