"""AST node types for availability expressions.

All nodes are frozen dataclasses, so expression trees are hashable and
compare structurally. Numbers are stored as floats; the printer renders
integral values without a fractional part, so parse/print round trips
preserve structure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

# First path segment an expression attached to a pricing document may
# use. The parser itself accepts any identifier so free variables work
# in standalone expressions; pricing validation enforces this set.
NAMESPACES = ("context", "plan", "subscription", "feature")

MAX_PATH_SEGMENTS = 4

COMPARISON_OPS = ("<", "<=", ">", ">=", "==", "!=")

# Operators valid for each operand kind. Numbers support the full set;
# text and booleans only equality.
EQUALITY_OPS = ("==", "!=")


@dataclass(frozen=True)
class BooleanLiteral:
    value: bool


@dataclass(frozen=True)
class NumberLiteral:
    value: float


@dataclass(frozen=True)
class StringLiteral:
    value: str


@dataclass(frozen=True)
class SymbolPath:
    segments: tuple[str, ...]

    @property
    def dotted(self) -> str:
        return ".".join(self.segments)


@dataclass(frozen=True)
class Not:
    operand: "Expr"


@dataclass(frozen=True)
class And:
    lhs: "Expr"
    rhs: "Expr"


@dataclass(frozen=True)
class Or:
    lhs: "Expr"
    rhs: "Expr"


@dataclass(frozen=True)
class Comparison:
    op: str
    lhs: "Expr"
    rhs: "Expr"


Expr = Union[
    BooleanLiteral, NumberLiteral, StringLiteral, SymbolPath, Not, And, Or, Comparison
]


def collect_identifiers(node: Expr) -> set[str]:
    """Return the dotted form of every symbol path in the expression."""
    found: set[str] = set()
    _collect(node, found)
    return found


def _collect(node: Expr, found: set[str]) -> None:
    if isinstance(node, SymbolPath):
        found.add(node.dotted)
    elif isinstance(node, Not):
        _collect(node.operand, found)
    elif isinstance(node, (And, Or, Comparison)):
        _collect(node.lhs, found)
        _collect(node.rhs, found)
