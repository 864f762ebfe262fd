"""Exception hierarchy.

Validation problems (bad input, bad config, malformed files) derive from
:class:`ValidationError`; failures of the numerics themselves derive from
:class:`NumericalFailure`. The CLI maps the two families onto exit codes 1
and 2.
"""


class VanyaError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(VanyaError, ValueError):
    pass


class NumericalFailure(VanyaError, ArithmeticError):
    pass


class InvalidInputError(ValidationError):
    pass


class ConfigError(ValidationError):
    pass


class ShapeError(ValidationError):
    pass


class TooShortError(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class ParseError(ValidationError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class WrongPhaseError(ValidationError):
    pass


class FormatVersionError(ValidationError):
    pass


class RegularizationError(ValidationError):
    pass


class IntegrationError(NumericalFailure):
    def __init__(self, message, step):
        super().__init__(f"step {step}: {message}")
        self.step = step


class NumericalError(NumericalFailure):
    def __init__(self, message, index=None):
        if index is not None:
            message = f"{message} (batch index {index})"
        super().__init__(message)
        self.index = index


class SingularityError(NumericalFailure):
    """|y| fell below the floor inside the residual's division by y."""

    def __init__(self, message, index=None):
        if index is not None:
            message = f"{message} (sample {index})"
        super().__init__(message)
        self.index = index
