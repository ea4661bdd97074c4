"""Exception taxonomy shared across the package."""

from __future__ import annotations


class SandhiError(Exception):
    """Base class for all errors raised by this package."""


class EmptyWordError(SandhiError):
    pass


class UnknownCodePointError(SandhiError):
    def __init__(self, char: str, position: int):
        super().__init__(f"unknown code point {char!r} (U+{ord(char):04X}) at position {position}")
        self.char = char
        self.position = position


class UnknownTokenError(SandhiError):
    def __init__(self, token: str, position: int):
        super().__init__(f"unknown token {token!r} at position {position}")
        self.token = token
        self.position = position


class WindowError(SandhiError):
    """Sandhi-window annotation failed; `reason` matches the filter verdict enum."""

    def __init__(self, reason: str, detail: str):
        super().__init__(f"{reason}: {detail}")
        self.reason = reason


class EmptyDatasetError(SandhiError):
    pass


class DimensionMismatchError(SandhiError):
    pass


class EmptySequenceError(SandhiError):
    pass


class VocabMissError(SandhiError):
    def __init__(self, char: str):
        super().__init__(f"character {char!r} is not in the model vocabulary")
        self.char = char


class LengthMismatchError(SandhiError):
    pass


class MalformedDecodeError(SandhiError):
    pass


class NoSeparatorError(MalformedDecodeError):
    pass


class WordTooShortError(SandhiError):
    pass


class InsufficientCoverageError(SandhiError):
    pass


class CheckpointError(SandhiError):
    pass


class BadMagicError(CheckpointError):
    pass


class VersionMismatchError(CheckpointError):
    pass


class ChecksumMismatchError(CheckpointError):
    pass
