"""Exceptions raised by the gauge algebra, the wave fields and the solver."""


class NlseGaugeError(Exception):
    """Base class of every error raised by this package."""


class DomainError(NlseGaugeError, ValueError):
    """A time function was evaluated outside its domain, or two tabulated
    functions / time windows do not match."""


class InvalidElementError(NlseGaugeError, ValueError):
    """Degenerate group element (Λ or λ vanishing) or degenerate
    coefficient vector (ν₁ vanishing)."""


class SingularInvariantError(NlseGaugeError, ArithmeticError):
    """ν₁ crosses zero on the window, the invariants are singular."""


class PhaseBranchError(NlseGaugeError, ArithmeticError):
    """The modulus is too small for a continuous branch of arg ψ."""


class NumericalDomainError(NlseGaugeError, ArithmeticError):
    """NaN or Inf produced by a numerical kernel."""


class EmptyRegionError(NlseGaugeError, ValueError):
    """A positional projection onto a region of zero probability."""


class GridMismatchError(NlseGaugeError, ValueError):
    """Two states do not live on the same grid."""


class UnknownPresetError(NlseGaugeError, KeyError):
    """Unknown preset name."""


class ConfigError(NlseGaugeError, ValueError):
    """Configuration schema violation. `path` is the dotted key path."""

    def __init__(self, path, msg):
        self.path = path
        self.msg = msg
        super().__init__('%s: %s' % (path or '<root>', msg))
