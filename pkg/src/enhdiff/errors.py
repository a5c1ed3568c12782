"""Exception hierarchy shared across the package."""


class EnhdiffError(Exception):
    """Base class for all package errors."""


class DomainError(EnhdiffError):
    """A point lies outside the domain of a field or operator."""


class UnsupportedVariantError(EnhdiffError):
    """An operation received a variant it does not handle."""


class ConfigError(EnhdiffError):
    """Invalid run configuration (bad key, missing key, out-of-range value)."""


class EstimatorError(EnhdiffError):
    """A Monte Carlo estimator was asked for something it cannot produce."""


class GeometryError(EnhdiffError):
    """Interface markers interact badly with the grid geometry."""


class SpecError(EnhdiffError):
    """Mismatched experiment ingredients (flow family vs initial data, etc.)."""


class FitError(EnhdiffError):
    """Not enough usable points for a scaling fit."""

    def __init__(self, message, censored=()):
        super().__init__(message)
        self.censored = tuple(censored)


class StepError(EnhdiffError):
    """A solver step failed; carries a suggested time step when known."""

    def __init__(self, message, suggested_dt=None):
        super().__init__(message)
        self.suggested_dt = suggested_dt
