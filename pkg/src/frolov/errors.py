"""Exception types raised by the frolov package."""


class FrolovError(Exception):
    """Base class for all package errors."""


class DomainError(FrolovError, ValueError):
    """An argument lies outside the domain of the operation."""


class RootCountMismatch(FrolovError, ArithmeticError):
    """Fewer real roots were bracketed than the polynomial degree."""


class SingularMatrix(FrolovError, ArithmeticError):
    """A factorization detected a numerically singular matrix."""


class BudgetExceeded(FrolovError, RuntimeError):
    """An enumeration would visit more candidates than allowed."""


class ZeroVector(FrolovError, ValueError):
    """The zero integer vector was passed where a nonzero one is required."""


class NonFiniteValue(FrolovError, ArithmeticError):
    """An integrand returned NaN or an infinite value."""


class UnsupportedFunction(FrolovError, TypeError):
    """The test function lacks a required closed form."""


class InsufficientData(FrolovError, ValueError):
    """Too few usable samples for a fit."""
