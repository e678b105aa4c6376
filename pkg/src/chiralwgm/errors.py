"""Exception types raised by the library."""


class ChiralWGMError(Exception):
    """Base class for all library errors."""


class NonFinite(ChiralWGMError, ValueError):
    """Argument outside the domain where a finite value is defined."""


class OrderTooLarge(ChiralWGMError, ValueError):
    """Bessel order beyond the supported range."""


class NoRootInBracket(ChiralWGMError, RuntimeError):
    """The resonance scan did not find the requested root."""


class ZeroField(ChiralWGMError, ValueError):
    """Polarization overlaps requested where the field vanishes."""


class InvalidAngularMomenta(ChiralWGMError, ValueError):
    """Angular momentum quantum numbers violate triangle or parity rules."""


class DimensionMismatch(ChiralWGMError, ValueError):
    """Operators or parameters do not share a consistent Hilbert space."""


class NonConvergence(ChiralWGMError, RuntimeError):
    """The steady-state solve did not reach the residual target."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class TruncationWarning(UserWarning):
    """Population in the highest retained Fock shell exceeds the threshold."""


class UnsupportedModel(ChiralWGMError, ValueError):
    """Analytic model name not recognised."""


class DomainError(ChiralWGMError, ValueError):
    """Parameter outside its mathematical domain."""


class GridTooLarge(ChiralWGMError, ValueError):
    """Sweep grid exceeds the allowed number of points or axes."""


class NonUnimodalWarning(UserWarning):
    """Objective was not unimodal on the search range; grid argmax returned."""


class ConfigError(ChiralWGMError, ValueError):
    """Run configuration failed validation."""
