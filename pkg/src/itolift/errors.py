"""Exception types raised across the package."""


class ItoLiftError(Exception):
    """Base class for all package errors."""


class ConfigurationError(ItoLiftError, ValueError):
    """Invalid user-supplied parameters or configuration text."""


class ShapeError(ItoLiftError, ValueError):
    """Array or grid dimensions do not match."""


class NumericError(ItoLiftError, ArithmeticError):
    """A non-finite value appeared where a finite one is required."""


class ContractError(ItoLiftError):
    """An operand violates a documented precondition (e.g. not Hermitian)."""
