"""Exception types shared across the package.

The CLI maps these to process exit codes: ConfigError -> 2,
CapacityError -> 3; any failed check -> 1.
"""


class FockFactorError(Exception):
    """Base class for all package errors."""


class CapacityError(FockFactorError):
    """A requested object exceeds a configured size cap."""


class ConfigError(FockFactorError):
    """Invalid or unreadable configuration."""


class ShapeError(FockFactorError):
    """Mismatched vector or matrix shapes."""


class DomainError(FockFactorError):
    """Input outside the mathematical domain of an operation."""


class SingularityError(DomainError):
    """Evaluation requested at (or too close to) a singular configuration."""


class UnsupportedModelError(FockFactorError):
    """Operation defined only for a subset of model variants."""


class ContractViolationError(FockFactorError):
    """An input violates a documented precondition (e.g. non-Hermitian matrix)."""


class IterationError(FockFactorError):
    """An iterative solver failed to converge; message carries diagnostics."""
