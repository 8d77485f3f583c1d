"""Exception types shared across the toolkit."""


class LevymaError(Exception):
    """Base class for all toolkit errors."""


class ParameterError(LevymaError, ValueError):
    """A parameter is outside its admissible domain."""


class WrongVariantError(LevymaError, TypeError):
    """An operation received a model/kernel variant it does not support."""


class StationarityError(LevymaError, ValueError):
    """AR polynomial has a root in the closed unit disk."""


class ModelInvalidError(LevymaError, ValueError):
    """The (noise, kernel) pair does not define a valid moving average."""


class DegenerateVarianceError(LevymaError, ArithmeticError):
    """Estimated long-run variance is not strictly positive."""


class AccuracyError(LevymaError, ArithmeticError):
    """Quadrature failed to meet the requested tolerance within budget.

    Carries the best estimate achieved and the corresponding error bound.
    """

    def __init__(self, message, estimate=None, error_bound=None):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


class ResourceError(LevymaError, RuntimeError):
    """Requested computation exceeds the configured work budget."""


class ConfigError(LevymaError, ValueError):
    """Experiment configuration is malformed or violates a domain constraint."""


class InputError(LevymaError, ValueError):
    """A precomputed input table is missing required entries."""
