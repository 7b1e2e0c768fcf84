from __future__ import annotations


class FrftError(Exception):
    """Base class for every error raised by the toolkit."""


class InvalidDimensionError(FrftError, ValueError):
    pass


class DimensionMismatchError(FrftError, ValueError):
    pass


class InvalidDataError(FrftError, ValueError):
    pass


class InvalidAngleError(FrftError, ValueError):
    pass


class KeyMismatchError(FrftError, ValueError):
    pass


class UndefinedCorrelationError(FrftError, ValueError):
    pass


class ConfigError(FrftError, ValueError):
    pass


class ParseError(FrftError, ValueError):
    """Malformed input bytes. `offset` is the byte position where parsing stopped."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset

