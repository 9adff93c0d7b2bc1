"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class TdesError(Exception):
    exit_code = 1


class KeyFormatError(TdesError, ValueError):
    exit_code = 3


class ParityError(TdesError, ValueError):
    exit_code = 4


class WeakKeyError(TdesError, ValueError):
    exit_code = 5


class InputLengthError(TdesError, ValueError):
    exit_code = 6


class PaddingError(TdesError, ValueError):
    exit_code = 7


class ConfigError(TdesError, ValueError):
    exit_code = 2


class StreamIOError(TdesError, OSError):
    """A read or write failed; ``offset`` is the stream byte position."""

    exit_code = 8

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset
