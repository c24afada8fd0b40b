"""Exception hierarchy shared by the library and the CLI."""


class DPMixError(Exception):
    """Base class for every error raised by dpmix."""


class InputError(DPMixError):
    """Bad user input: configuration, files, dimensions."""


class NumericalError(DPMixError):
    """A computation produced an invalid numerical state."""


class DomainError(NumericalError, ValueError):
    """Argument outside the domain of a function."""


class NotPositiveDefinite(NumericalError):
    """A matrix expected to be positive definite failed factorization."""


class NumericalOverflow(NumericalError):
    """Normalization produced non-finite values."""


class ModelMismatch(DPMixError):
    """Parameters do not carry the block required by the requested model."""


class InvalidDimension(InputError):
    pass


class ConfigError(InputError):
    """A hyperparameter violates an invariant of its model."""


class IWDegreesTooSmall(ConfigError):
    pass


class NonPositiveRate(ConfigError):
    pass


class NonPositiveShape(ConfigError):
    pass


class TruncationTooSmall(ConfigError):
    pass


class UnknownConfigKey(ConfigError):
    pass


class ParseError(InputError):
    """A data file could not be parsed; carries the cell location."""

    def __init__(self, message, row=None, col=None):
        super().__init__(message)
        self.row = row
        self.col = col


class RaggedRows(ParseError):
    pass


class NonNumericCell(ParseError):
    pass


class LengthMismatch(InputError, ValueError):
    pass


class NoEstimate(NumericalError):
    pass


class FitError(NumericalError):
    """Numerical failure inside a fit, tagged with where it happened."""

    def __init__(self, message, restart=None, iteration=None):
        super().__init__(message)
        self.restart = restart
        self.iteration = iteration
