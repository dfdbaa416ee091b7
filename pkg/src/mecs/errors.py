"""Exception types raised across the package."""


class MecsError(Exception):
    """Base class for all package errors."""


class DomainError(MecsError, ValueError):
    """A parameter lies outside its allowed range."""


class DegenerateBasisError(DomainError):
    """The two coherent branches coincide (overlap p = 1)."""


class NullStateError(MecsError, ValueError):
    """The requested superposition has zero norm."""


class ModeMismatchError(MecsError, ValueError):
    """Two superpositions live on different numbers of modes."""


class ValidationError(MecsError, ValueError):
    """A state or operator violates its physical invariants."""


class TruncationError(MecsError):
    """A truncated Fock space is too small for the requested check."""
