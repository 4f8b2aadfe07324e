"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: configuration problems exit with 2,
numerical/domain failures with 3.
"""


class TailcombError(Exception):
    """Base class for all package errors."""


class DomainError(TailcombError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigurationError(TailcombError, ValueError):
    """Inconsistent or unsupported configuration (specs, pairings, files)."""


class NumericalError(TailcombError, ArithmeticError):
    """A numerical procedure failed (non-SPD matrix, divergence, ...)."""


class InfeasibleMeasureError(NumericalError):
    """No standardized weighting exists for the given atoms.

    Carries the attempted residual and whether axis augmentation was tried.
    """

    def __init__(self, message: str, residual: float, augmented: bool):
        super().__init__(message)
        self.residual = residual
        self.augmented = augmented
