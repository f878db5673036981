"""Canonical printer for expression ASTs.

print_expression emits the minimal parenthesisation that reparses to a
structurally identical tree: parse(print_expression(a)) == a. Right
operands of && and || are parenthesised when they have the same
precedence, so right-leaning trees survive the round trip.
"""

from __future__ import annotations

from decimal import Decimal

from pricegate.expr.ast import (
    And,
    BooleanLiteral,
    Comparison,
    Expr,
    Not,
    NumberLiteral,
    Or,
    StringLiteral,
    SymbolPath,
)

_PREC_OR = 1
_PREC_AND = 2
_PREC_CMP = 3
_PREC_NOT = 4
_PREC_ATOM = 5

_ESCAPES = {'"': '\\"', "\\": "\\\\", "\n": "\\n", "\t": "\\t", "\r": "\\r"}


def _precedence(node: Expr) -> int:
    if isinstance(node, Or):
        return _PREC_OR
    if isinstance(node, And):
        return _PREC_AND
    if isinstance(node, Comparison):
        return _PREC_CMP
    if isinstance(node, Not):
        return _PREC_NOT
    return _PREC_ATOM


def _format_number(value: float) -> str:
    if value.is_integer() and abs(value) < 1e16:
        return str(int(value))
    text = repr(value)
    if "e" in text or "E" in text:
        # the grammar has no exponent form; expand to plain decimal,
        # exactly (Decimal of the shortest repr keeps the round trip)
        text = format(Decimal(text), "f")
    return text


def _format_string(value: str) -> str:
    out = ['"']
    for ch in value:
        out.append(_ESCAPES.get(ch, ch))
    out.append('"')
    return "".join(out)


def _child(node: Expr, parent_prec: int, right_of_same: bool) -> str:
    text = _render(node)
    prec = _precedence(node)
    if prec < parent_prec or (right_of_same and prec == parent_prec):
        return f"({text})"
    return text


def _render(node: Expr) -> str:
    if isinstance(node, BooleanLiteral):
        return "true" if node.value else "false"
    if isinstance(node, NumberLiteral):
        return _format_number(node.value)
    if isinstance(node, StringLiteral):
        return _format_string(node.value)
    if isinstance(node, SymbolPath):
        return node.dotted
    if isinstance(node, Not):
        return "!" + _child(node.operand, _PREC_NOT, False)
    if isinstance(node, And):
        left = _child(node.lhs, _PREC_AND, False)
        right = _child(node.rhs, _PREC_AND, True)
        return f"{left} && {right}"
    if isinstance(node, Or):
        left = _child(node.lhs, _PREC_OR, False)
        right = _child(node.rhs, _PREC_OR, True)
        return f"{left} || {right}"
    if isinstance(node, Comparison):
        # Operands are literals or paths, never parenthesised.
        return f"{_render(node.lhs)} {node.op} {_render(node.rhs)}"
    raise TypeError(f"not an expression node: {node!r}")


def print_expression(node: Expr) -> str:
    """Render the AST as expression source text."""
    return _render(node)
