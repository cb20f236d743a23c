"""Exception hierarchy shared across the package."""


class DradaptError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(DradaptError):
    """Input file could not be parsed into a rectangular numeric table."""


class ValidationError(DradaptError):
    """An argument violates a documented precondition."""


class DegenerateInputError(DradaptError):
    """Input is degenerate for the requested computation (e.g. zero distance variance)."""


class ProjectionError(DradaptError):
    """A DR technique failed numerically while producing a projection."""

    def __init__(self, message, technique=None, iteration=None):
        super().__init__(message)
        self.technique = technique
        self.iteration = iteration


class ExternalTechniqueError(DradaptError):
    """An external technique subprocess failed or produced malformed output."""

    def __init__(self, message, exit_code=None, stderr=None):
        super().__init__(message)
        self.exit_code = exit_code
        self.stderr = stderr


class UnknownTechniqueError(DradaptError, LookupError):
    """Requested technique id is not registered."""


class ObjectiveError(DradaptError):
    """Every trial of an optimization run failed."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class PretrainError(DradaptError):
    """Too few corpus datasets survived pretraining."""


class WorkflowError(DradaptError):
    """Every technique selected by a workflow run failed."""
