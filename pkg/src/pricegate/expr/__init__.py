"""Availability expression language: parser, printer, evaluator.

Expressions are small boolean formulas attached to features, e.g.
``context.userPets < plan.petsPerOwner``. Symbols resolve against four
namespaces: context (caller-supplied state and usage counters), plan
(effective feature and limit values), subscription (plan name, id,
add-on count) and feature (the feature under evaluation).
"""

from pricegate.expr.ast import (
    And,
    BooleanLiteral,
    Comparison,
    Expr,
    NAMESPACES,
    Not,
    NumberLiteral,
    Or,
    StringLiteral,
    SymbolPath,
    collect_identifiers,
)
from pricegate.expr.errors import EvalError, ExpressionError, TypeMismatch, UnboundSymbol
from pricegate.expr.evaluate import evaluate_expression, evaluation_backend
from pricegate.expr.parser import parse_expression
from pricegate.expr.printer import print_expression

__all__ = [
    "And",
    "BooleanLiteral",
    "Comparison",
    "EvalError",
    "Expr",
    "ExpressionError",
    "NAMESPACES",
    "Not",
    "NumberLiteral",
    "Or",
    "StringLiteral",
    "SymbolPath",
    "TypeMismatch",
    "UnboundSymbol",
    "collect_identifiers",
    "evaluate_expression",
    "evaluation_backend",
    "parse_expression",
    "print_expression",
]
