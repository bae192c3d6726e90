"""Exception hierarchy. Exit codes are consumed by the CLI."""


class HiddenOUError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigurationError(HiddenOUError):
    """Invalid configuration: bad keys, shapes, boxes, or sampling scheme."""

    exit_code = 2


class AssumptionError(HiddenOUError):
    """A model assumption fails numerically (stability, controllability, spectral gap)."""

    exit_code = 3


class NumericError(HiddenOUError):
    """Numerical failure: non-finite input, indefinite covariance, quadrature failure."""

    exit_code = 3


class DomainError(NumericError):
    """Evaluation requested outside the admissible parameter domain."""


class SubspaceDegenerateError(NumericError):
    """The invariant-subspace basis does not define a Riccati solution (X1 singular)."""


class InstabilityError(NumericError):
    """An integration blew up; the step size or initial condition is bad."""


class ConvergenceError(HiddenOUError):
    """An optimizer or replication batch produced no converged result."""

    exit_code = 4
