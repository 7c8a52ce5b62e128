"""Exception hierarchy shared by the library and the command line."""

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_GUARD = 3


class TkRankError(Exception):
    """Base class for every error raised by tkrank."""

    exit_code = EXIT_INPUT


class ParameterError(TkRankError, ValueError):
    """A parameter is outside the range an operation accepts."""


class GuardExceeded(TkRankError):
    """A desk-scale size guard refused the request."""

    exit_code = EXIT_GUARD


class InputError(TkRankError):
    """An input file is malformed or describes an invalid object."""
