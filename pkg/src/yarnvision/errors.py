"""Exception hierarchy shared by all pipelines."""


class YarnVisionError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(YarnVisionError, ValueError):
    """An argument is outside the range an operation accepts."""


class AnalysisError(YarnVisionError):
    """The input is well formed but the measurement cannot be made.

    Examples: no yarn in the frame, no periodic structure, empty opening zone.
    """


class PGMError(YarnVisionError, ValueError):
    """Base class for PGM parse errors."""


class PGMHeaderError(PGMError):
    pass


class PGMMaxvalError(PGMError):
    pass


class PGMTruncatedError(PGMError):
    pass
