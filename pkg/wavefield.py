""" Wavefunctions on a periodic uniform 1-D grid.

Densities, currents and the five functionals

    R1 = ∇·J/ρ   R2 = Δρ/ρ   R3 = J²/ρ²   R4 = J·∇ρ/ρ²   R5 = (∇ρ)²/ρ²

with spectral derivatives, the gauge transformations acting on states
(ψ = R e^{iS} ↦ R exp i(γ ln R + Λ S + θ)), phase unwrapping, positional
projections and two-particle product states.
"""
import numbers

import numexpr as ne
import numpy as np
import pandas as pd

from errors import (EmptyRegionError, GridMismatchError, InvalidElementError,
                    NumericalDomainError, PhaseBranchError)
from lazy import frozen, lazy_array, lazy_property
from timing import Timing
from utils import read_json, sizeof_fmt, write_json

EPS_REG = 1e-12
EPS_PHASE = 1e-8


class GridSpec:
    """ Periodic grid x_i = −L/2 + i dx, i = 0 ... n−1, dx = L/n."""

    def __init__(self, n=256, length=20.0):
        n = int(n)
        if n < 16 or n & (n - 1):
            raise ValueError('grid size must be a power of two >= 16, not %d'
                             % n)
        if not length > 0:
            raise ValueError('box length must be positive, not %r' % length)
        self.n = n
        self.length = float(length)

    @property
    def dx(self):
        return self.length / self.n

    @lazy_array
    def x(self):
        return -0.5 * self.length + self.dx * np.arange(self.n)

    @lazy_array
    def k(self):
        """ Angular wavenumbers in FFT order."""
        return 2 * np.pi * np.fft.fftfreq(self.n, self.dx)

    @lazy_property
    def derivative(self):
        return SpectralDerivative(self)

    def check_same(self, other):
        if self != other:
            raise GridMismatchError('grids differ: %r vs %r' % (self, other))

    def __eq__(self, other):
        if not isinstance(other, GridSpec):
            return NotImplemented
        return self.n == other.n and self.length == other.length

    __hash__ = None

    def __repr__(self):
        return 'GridSpec(n=%d, length=%g)' % (self.n, self.length)

    def to_dict(self):
        return {'n': self.n, 'length': self.length}

    @classmethod
    def from_dict(cls, d):
        return cls(d['n'], d['length'])


class SpectralDerivative:
    """ Fourier derivatives on a periodic grid, along any axis of an array
    sampled on that grid. The Nyquist mode is dropped from odd
    derivatives."""

    def __init__(self, grid):
        self.grid = grid
        ik = 1j * grid.k
        ik[grid.n // 2] = 0.0
        self.ik = frozen(ik)
        self.k2 = frozen(-grid.k**2)

    def _apply(self, f, mult, axis):
        f = np.asarray(f)
        shape = [1] * f.ndim
        shape[axis] = self.grid.n
        out = np.fft.ifft(mult.reshape(shape) * np.fft.fft(f, axis=axis),
                          axis=axis)
        if np.isrealobj(f):
            return out.real
        return out

    def first(self, f, axis=-1):
        return self._apply(f, self.ik, axis)

    def second(self, f, axis=-1):
        return self._apply(f, self.k2, axis)

    laplacian = second


class WaveFunction:
    """ Complex samples of ψ on `grid` at time `time_tag`. Values are a
    read-only snapshot; operations return new WaveFunctions."""

    def __init__(self, grid, values, time_tag=0.0, meta=None):
        values = np.asarray(values)
        if values.shape != (grid.n,):
            raise GridMismatchError('expected %d samples, got shape %s'
                                    % (grid.n, values.shape))
        self.grid = grid
        self.values = frozen(values, dtype=complex)
        self.time_tag = float(time_tag)
        self.meta = {} if meta is None else meta

    def with_values(self, values, time_tag=None, meta=None):
        return WaveFunction(self.grid, values,
                            self.time_tag if time_tag is None else time_tag,
                            meta)

    @lazy_array
    def rho(self):
        v = self.values
        return (v.real**2 + v.imag**2)

    @lazy_array
    def amplitude(self):
        return np.abs(self.values)

    @property
    def norm(self):
        """ Σ|ψ_i|² dx."""
        return float(np.sum(self.rho) * self.grid.dx)

    def normalized(self):
        norm = self.norm
        if norm == 0.0:
            raise EmptyRegionError('cannot normalize a vanishing state')
        return self.with_values(self.values / np.sqrt(norm))

    @property
    def mean_x(self):
        return float(np.sum(self.grid.x * self.rho) / np.sum(self.rho))

    @property
    def variance_x(self):
        d = self.grid.x - self.mean_x
        return float(np.sum(d * d * self.rho) / np.sum(self.rho))

    @property
    def mean_p(self):
        """ ⟨−i∇⟩ = ∫J dx / ∫ρ dx."""
        _, current = density_current(self)
        return float(np.sum(current) / np.sum(self.rho))

    def edge_mass(self, fraction=1.0 / 16):
        """ Probability in the outer `fraction` of the box on each side."""
        m = max(int(self.grid.n * fraction), 1)
        rho = self.rho
        return float((rho[:m].sum() + rho[-m:].sum()) / max(rho.sum(),
                                                           1e-300))

    # ------------------------------------------------------------------
    # I/O
    # ------------------------------------------------------------------
    def to_frame(self):
        return pd.DataFrame({'x': self.grid.x, 're': self.values.real,
                             'im': self.values.imag},
                            columns=['x', 're', 'im'])

    def to_csv(self, fn):
        t = Timing('Saving wavefunction to %s' % fn)
        self.to_frame().to_csv(fn, index=False, float_format='%.17g')
        t.finished('File saved ( %s ).' % sizeof_fmt(fn))
        return fn

    @classmethod
    def from_csv(cls, fn, time_tag=0.0):
        """ Read x, re, im columns; the grid is inferred from x."""
        df = pd.read_csv(fn, dtype=float, float_precision='round_trip')
        missing = [c for c in ('x', 're', 'im') if c not in df.columns]
        if missing:
            raise ValueError('%s: missing column(s) %s' % (fn, missing))
        x = df['x'].to_numpy()
        dx = x[1] - x[0]
        grid = GridSpec(len(x), float('%.12g' % (dx * len(x))))
        if not np.allclose(x, grid.x, rtol=0, atol=1e-9 * grid.length):
            raise GridMismatchError('%s: x column is not a centered '
                                    'periodic grid' % fn)
        return cls(grid, df['re'].to_numpy() + 1j * df['im'].to_numpy(),
                   time_tag)

    def to_dict(self):
        return {'grid': self.grid.to_dict(), 'time_tag': self.time_tag,
                'values': np.column_stack([self.values.real,
                                           self.values.imag])}

    @classmethod
    def from_dict(cls, d):
        v = np.asarray(d['values'], dtype=float)
        return cls(GridSpec.from_dict(d['grid']), v[:, 0] + 1j * v[:, 1],
                   d.get('time_tag', 0.0))

    def to_json(self, fn):
        return write_json(fn, self.to_dict())

    @classmethod
    def from_json(cls, fn):
        return cls.from_dict(read_json(fn))


# ----------------------------------------------------------------------
# builders
# ----------------------------------------------------------------------
def gaussian(grid, x0=0.0, sigma=1.0, k0=0.0, time_tag=0.0, normalize=True):
    """ Gaussian packet whose density has standard deviation `sigma`,
    centered at `x0` with mean wavenumber `k0`."""
    x = grid.x
    values = np.exp(-(x - x0)**2 / (4 * sigma**2) + 1j * k0 * x)
    psi = WaveFunction(grid, values, time_tag)
    return psi.normalized() if normalize else psi


def plane_wave(grid, k, time_tag=0.0, normalize=True):
    """ e^{ikx}; `k` is rounded to the closest grid-commensurate value."""
    m = np.round(k * grid.length / (2 * np.pi))
    k = 2 * np.pi * m / grid.length
    psi = WaveFunction(grid, np.exp(1j * k * grid.x), time_tag)
    return psi.normalized() if normalize else psi


# ----------------------------------------------------------------------
# densities and functionals
# ----------------------------------------------------------------------
def density_current(psi):
    """ (ρ, J) with ρ = |ψ|² and J = Im(ψ̄ ∇ψ)."""
    d1 = psi.grid.derivative.first(psi.values)
    p = psi.values
    current = ne.evaluate('imag(conj(p) * d1)')
    return np.array(psi.rho), current


class FieldDiagnostics:
    """ ρ, J, their derivatives and R1 ... R5 of one state.

    `regularized` is set when ρ fell below eps and divisions used ρ + eps."""

    def __init__(self, rho, current, grad_rho, lap_rho, div_current,
                 R, eps, regularized):
        self.rho = rho
        self.current = current
        self.grad_rho = grad_rho
        self.lap_rho = lap_rho
        self.div_current = div_current
        self.R1, self.R2, self.R3, self.R4, self.R5 = R
        self.eps = eps
        self.regularized = regularized

    @property
    def R(self):
        return (self.R1, self.R2, self.R3, self.R4, self.R5)

    def laplacian_ratio(self):
        """ iR1 + ½R2 − R3 − ¼R5, which equals Δψ/ψ."""
        return 1j * self.R1 + 0.5 * self.R2 - self.R3 - 0.25 * self.R5


def functionals(psi, eps_rel=EPS_REG, d1=None, d2=None):
    """ R1 ... R5 of `psi`.

    Numerators are built from ψ̄ψ' and ψ̄ψ'' products so that they stay
    proportional to |ψ| in the tails:

        ∇ρ = 2Re ψ̄ψ'   Δρ = 2Re ψ̄ψ'' + 2|ψ'|²   J = Im ψ̄ψ'   ∇·J = Im ψ̄ψ''

    Divisions use ρ + eps with eps = eps_rel·max ρ, only when min ρ < eps.
    """
    deriv = psi.grid.derivative
    p = psi.values
    if d1 is None:
        d1 = deriv.first(p)
    if d2 is None:
        d2 = deriv.second(p)
    rho = np.array(psi.rho)
    eps = eps_rel * float(rho.max())
    regularized = bool(rho.min() < eps)
    den = rho + eps if regularized else rho
    if regularized:
        Timing.debug('functionals: min rho %.3g < eps %.3g, regularized'
                     % (rho.min(), eps))

    grad_rho = ne.evaluate('2 * real(conj(p) * d1)')
    lap_rho = ne.evaluate('2 * real(conj(p) * d2) + 2 * real(conj(d1) * d1)')
    current = ne.evaluate('imag(conj(p) * d1)')
    div_current = ne.evaluate('imag(conj(p) * d2)')

    with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
        R = (ne.evaluate('div_current / den'),
             ne.evaluate('lap_rho / den'),
             ne.evaluate('current**2 / den**2'),
             ne.evaluate('current * grad_rho / den**2'),
             ne.evaluate('grad_rho**2 / den**2'))
    for i, r in enumerate(R):
        if not np.all(np.isfinite(r)):
            raise NumericalDomainError('R%d is not finite (min rho %.3g, '
                                       'eps %.3g)' % (i + 1, rho.min(), eps))
    return FieldDiagnostics(rho, current, grad_rho, lap_rho, div_current,
                            R, eps, regularized)


# ----------------------------------------------------------------------
# phase
# ----------------------------------------------------------------------
def _wrap(phi):
    """ Map angles onto (−π, π]."""
    return np.angle(np.exp(1j * phi))


def _check_modulus(amplitude, eps_rel):
    amax = float(np.max(amplitude))
    if amax == 0.0 or float(np.min(amplitude)) < eps_rel * amax:
        raise PhaseBranchError(
            'no continuous branch of arg psi: min|psi| = %.3g < %.3g'
            % (np.min(amplitude), eps_rel * amax))


def unwrap_values(values, eps_rel=EPS_PHASE, axis=-1):
    """ Continuous phase along `axis` starting from the principal value at
    index 0 (successive differences brought into [−π, π])."""
    values = np.asarray(values)
    _check_modulus(np.abs(values), eps_rel)
    return np.unwrap(np.angle(values), axis=axis)


def unwrap_phase(psi, eps_rel=EPS_PHASE):
    return unwrap_values(psi.values, eps_rel)


def unwrap_phase_2d(values, eps_rel=EPS_PHASE):
    """ Unwrap the first column, then every row from its first-column
    value."""
    values = np.asarray(values)
    _check_modulus(np.abs(values), eps_rel)
    column = unwrap_values(values[:, 0], eps_rel)
    rows = unwrap_values(values, eps_rel, axis=1)
    return rows - rows[:, :1] + column[:, None]


def winding_number(psi, phase=None, eps_rel=EPS_PHASE):
    """ Number of 2π turns of the unwrapped phase around the periodic box."""
    if phase is None:
        phase = unwrap_phase(psi, eps_rel)
    closing = _wrap(phase[0] - phase[-1])
    return int(np.round((phase[-1] + closing - phase[0]) / (2 * np.pi)))


def _is_integer(lam):
    return float(lam) == np.round(lam)


def _gauge_values(values, gamma, lam, theta, eps_rel, unwrap):
    """ R exp i(γ ln R + Λ S + θ) for arrays; `unwrap` maps values to S."""
    if lam == 0.0:
        raise InvalidElementError('degenerate gauge element: lambda = 0')
    R = np.abs(values)
    with np.errstate(divide='ignore', invalid='ignore'):
        extra = gamma * np.log(R) if gamma != 0.0 else 0.0
        extra = extra + theta
        meta = {}
        if lam == 1.0:
            out = np.array(values)
        elif lam == -1.0:
            out = np.conj(values)
        elif _is_integer(lam):
            out = R * (values / R)**int(lam)
        else:
            S = unwrap(values, eps_rel)
            out = R * np.exp(1j * lam * S)
            meta['unwrapped'] = True
        if np.any(extra != 0.0):
            out = out * np.exp(1j * extra)
    out = np.where(R > 0, out, 0.0)
    return out, meta


def apply_gauge(g, psi, t, eps_rel=EPS_PHASE):
    """ N_(γ,Λ,θ)[ψ] at time t. Λ = ±1 (and other integers) need no phase
    branch; any other Λ requires min|ψ| ≥ eps_rel·max|ψ|."""
    gamma, lam = g.at(t)
    theta = 0.0 if g.theta.is_zero else g.theta(psi.grid.x, t)
    out, meta = _gauge_values(psi.values, gamma, lam, theta, eps_rel,
                              unwrap_values)
    if meta.get('unwrapped'):
        meta['winding'] = winding_number(psi, eps_rel=eps_rel)
    return psi.with_values(out, meta=meta)


def apply_affine(a, psi, t, eps_rel=EPS_PHASE):
    """ N_(k,λ)[ψ] = R exp i(k(R, x, t) + λ(x, t) S)."""
    x = psi.grid.x
    R = np.array(psi.amplitude)
    k, lam = a.at(R, x, t)
    meta = {}
    if np.all(lam == np.round(lam)):
        with np.errstate(divide='ignore', invalid='ignore'):
            rotated = R * (psi.values / R)**lam.astype(int)
    else:
        S = unwrap_phase(psi, eps_rel)
        rotated = R * np.exp(1j * lam * S)
        meta['winding'] = winding_number(psi, S)
    with np.errstate(invalid='ignore'):
        out = np.where(R > 0, rotated * np.exp(1j * k), 0.0)
    return psi.with_values(out, meta=meta)


def apply_phase(theta, psi, t):
    """ U_θ ψ = e^{iθ(x, t)} ψ."""
    return psi.with_values(psi.values * np.exp(1j * theta(psi.grid.x, t)))


# ----------------------------------------------------------------------
# projections and product states
# ----------------------------------------------------------------------
def region_mask(grid, intervals):
    """ Boolean mask of a union of half-open index intervals
    [(start, stop), ...]."""
    if (len(intervals) == 2
            and all(isinstance(i, numbers.Integral) for i in intervals)):
        intervals = [intervals]
    mask = np.zeros(grid.n, dtype=bool)
    for start, stop in intervals:
        mask[slice(start, stop)] = True
    return mask


def measure_project(psi, intervals):
    """ ψ restricted to the region and renormalized (the state after a
    positive position measurement in that region)."""
    mask = region_mask(psi.grid, intervals)
    p = float(np.sum(psi.rho[mask]) * psi.grid.dx)
    if p <= 0.0:
        raise EmptyRegionError('zero probability in the projected region')
    return psi.with_values(np.where(mask, psi.values, 0.0) / np.sqrt(p))


def product_state(psi1, psi2):
    """ n×n array ψ1(x1)ψ2(x2), first index x1."""
    psi1.grid.check_same(psi2.grid)
    return np.outer(psi1.values, psi2.values)


def pair_norm(values, grid):
    return float(np.sum(np.abs(values)**2) * grid.dx**2)


def apply_gauge_pair(g, values, grid, t, eps_rel=EPS_PHASE):
    """ N on a two-particle array, θ2(x1, x2) = θ(x1) + θ(x2)."""
    values = np.asarray(values)
    if values.shape != (grid.n, grid.n):
        raise GridMismatchError('expected a %dx%d array, got %s'
                                % (grid.n, grid.n, values.shape))
    gamma, lam = g.at(t)
    if g.theta.is_zero:
        theta = 0.0
    else:
        th = g.theta(grid.x, t)
        theta = th[:, None] + th[None, :]
    out, _ = _gauge_values(values, gamma, lam, theta, eps_rel,
                           lambda v, eps: unwrap_phase_2d(v, eps))
    return out
