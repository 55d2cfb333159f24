"""Exception hierarchy shared by all modules."""


class JacobiLiftError(Exception):
    """Base class for all errors raised by the package."""


class DimensionError(JacobiLiftError, ValueError):
    """Operands have incompatible shapes."""


class DomainError(JacobiLiftError, ValueError):
    """An input violates a structural invariant (not symplectic, not in H_n, ...)."""


class SingularError(JacobiLiftError, ArithmeticError):
    """A matrix that must be invertible is (numerically) singular."""


class TruncationError(JacobiLiftError):
    """The requested truncation cannot meet the tail tolerance."""


class NotInSpanError(JacobiLiftError, ValueError):
    """A polynomial does not lie in the span of the given basis."""
