"""Errors raised while parsing or evaluating availability expressions."""

from __future__ import annotations


class ExpressionError(Exception):
    """Syntax error in an expression. offset is 0-based into the source."""

    def __init__(self, message: str, offset: int) -> None:
        self.offset = offset
        super().__init__(f"{message} (offset {offset})")
        self.message = message


class EvalError(Exception):
    """Base class for runtime evaluation failures."""


class UnboundSymbol(EvalError):
    def __init__(self, path: str) -> None:
        self.path = path
        super().__init__(f"unbound symbol: {path}")


class TypeMismatch(EvalError):
    """An operator was applied to operand types it does not accept.

    rhs_type is None when the right operand was never evaluated, e.g.
    when the left operand of && already failed the boolean check.
    """

    def __init__(self, op: str, lhs_type: str, rhs_type: str | None) -> None:
        self.op = op
        self.lhs_type = lhs_type
        self.rhs_type = rhs_type
        if rhs_type is None:
            detail = f"operator {op!r} cannot accept {lhs_type}"
        else:
            detail = f"operator {op!r} cannot accept {lhs_type} and {rhs_type}"
        super().__init__(detail)
