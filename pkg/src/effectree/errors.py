"""Exception hierarchy."""

from __future__ import annotations

from typing import Any


class EffectreeError(Exception):
    pass


class TypeCheckError(EffectreeError):
    """Typing failure, carrying the rule that failed and the offending subterm."""

    def __init__(self, message: str, rule: str | None = None, term: Any = None) -> None:
        self.rule = rule
        self.term = term
        where = f" [{rule}]" if rule else ""
        if term is not None:
            try:
                where += f" in {term}"
            except Exception:  # printing must never mask the real error
                pass
        super().__init__(message + where)


class UnknownConstant(TypeCheckError):
    pass


class UnboundVariable(TypeCheckError):
    pass


class UnknownOperation(TypeCheckError):
    pass


class ArityMismatch(TypeCheckError):
    pass


class UnhandledOperation(TypeCheckError):
    pass


class EffectEscape(TypeCheckError):
    pass


class ParseError(EffectreeError):
    def __init__(self, message: str, offset: int | None = None, line: int | None = None,
                 col: int | None = None) -> None:
        self.offset = offset
        self.line = line
        self.col = col
        if line is not None:
            message = f"{message} at line {line}, column {col} (offset {offset})"
        super().__init__(message)


class DuplicateDeclaration(ParseError):
    pass


class AlphabetMismatch(EffectreeError):
    pass
