"""Exception and warning types raised by finitepbg."""


class DomainError(ValueError):
    """An argument lies outside the domain where the operation is defined."""


class SingularMatrixError(ArithmeticError):
    """A transfer matrix cannot be formed or inverted (t == 0)."""


class SingularBasisError(ArithmeticError):
    """Two basis solutions are (numerically) dependent at the cell edges."""


class ChebyshevRangeError(OverflowError):
    """Chebyshev recurrence overflowed double precision."""


class AccuracyError(ArithmeticError):
    """A numerical self-consistency check failed by more than its tolerance."""


class AccuracyWarning(UserWarning):
    """A numerical estimate drifted more than expected but was still returned."""


class ConfigError(ValueError):
    """A stack configuration failed schema or semantic validation."""
