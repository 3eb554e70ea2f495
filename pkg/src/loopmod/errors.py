"""Exception types raised across loopmod."""

from __future__ import annotations


class LoopModError(ValueError):
    """Base class for every input or contract error raised by the library."""


class NotSquare(LoopModError):
    pass


class NotLatin(LoopModError):
    def __init__(self, kind: str, index: int, value: int):
        self.kind = kind
        self.index = index
        self.value = value
        super().__init__(f"{kind} {index} repeats value {value}")


class NoIdentity(LoopModError):
    pass


class EntryOutOfRange(LoopModError):
    def __init__(self, row: int, col: int, value):
        self.row, self.col, self.value = row, col, value
        super().__init__(f"entry ({row}, {col}) = {value!r} is not an element index")


class IndexOutOfRange(LoopModError, IndexError):
    pass


class Unsupported(LoopModError):
    pass


class UnknownBuiltin(LoopModError):
    pass


class DSLSyntaxError(LoopModError):
    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} at offset {offset}")


class EmptySide(LoopModError):
    pass


class NonlinearPoint(LoopModError):
    def __init__(self, point: str, occurrences: int):
        self.point = point
        self.occurrences = occurrences
        super().__init__(f"point variable {point!r} occurs {occurrences} times; expected exactly once")


class UnboundVariable(LoopModError):
    pass


class NonpositiveWeight(LoopModError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"weight at index {index} is not strictly positive")


class LengthMismatch(LoopModError):
    pass


class SizeMismatch(LoopModError):
    pass


class IdentityFails(LoopModError):
    def __init__(self, verdict):
        self.verdict = verdict
        super().__init__(f"identity does not hold: counterexample {verdict.counterexample}")


class EmptyGeneratorSet(LoopModError):
    pass


class CapExceeded(LoopModError):
    def __init__(self, cap: int):
        self.cap = cap
        super().__init__(f"group order exceeds cap {cap}")


class UnsupportedOrder(LoopModError):
    pass


class InvalidPrefix(LoopModError):
    pass
