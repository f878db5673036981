"""Compilation of expression ASTs to a small stack-machine program.

Two interpreters execute these programs: pricegate.expr.vm (pure
Python) and pricegate.expr._fastvm (the same loop compiled with
Cython). Both must keep identical semantics; the instruction set is the
single source of truth.

Instructions are parallel sequences: ops[i] is the opcode, args[i] its
argument (None when unused). && and || compile to conditional jumps so
the right operand is never executed when the left one decides the
result; that is what makes `false && context.missing` evaluate to false
instead of raising UnboundSymbol.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass

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

OP_PUSH = 0  # push args[i]
OP_LOAD = 1  # push bindings[args[i]]; UnboundSymbol when missing
OP_NOT = 2  # replace boolean top with its negation
OP_CMP = 3  # pop rhs, pop lhs, push comparison result; args[i] is a CMP_* code
OP_JUMP_IF_FALSE = 4  # top must be boolean; jump to args[i] when false, keep top
OP_JUMP_IF_TRUE = 5  # top must be boolean; jump to args[i] when true, keep top
OP_POP = 6  # discard top
OP_ENSURE_BOOL = 7  # top must be boolean; args[i] names the operator (BOOL_*)

CMP_LT = 0
CMP_LE = 1
CMP_GT = 2
CMP_GE = 3
CMP_EQ = 4
CMP_NE = 5

_CMP_CODES = {"<": CMP_LT, "<=": CMP_LE, ">": CMP_GT, ">=": CMP_GE, "==": CMP_EQ, "!=": CMP_NE}

CMP_NAMES = ("<", "<=", ">", ">=", "==", "!=")

BOOL_AND = 0
BOOL_OR = 1


@dataclass(frozen=True)
class Program:
    ops: array  # array('i') of opcodes
    args: tuple


def compile_expression(node: Expr) -> Program:
    ops: list[int] = []
    args: list = []

    def emit(op: int, arg=None) -> int:
        ops.append(op)
        args.append(arg)
        return len(ops) - 1

    def walk(n: Expr) -> None:
        if isinstance(n, BooleanLiteral):
            emit(OP_PUSH, n.value)
        elif isinstance(n, NumberLiteral):
            emit(OP_PUSH, n.value)
        elif isinstance(n, StringLiteral):
            emit(OP_PUSH, n.value)
        elif isinstance(n, SymbolPath):
            emit(OP_LOAD, n.dotted)
        elif isinstance(n, Not):
            walk(n.operand)
            emit(OP_NOT)
        elif isinstance(n, And):
            walk(n.lhs)
            jump = emit(OP_JUMP_IF_FALSE)
            emit(OP_POP)
            walk(n.rhs)
            emit(OP_ENSURE_BOOL, BOOL_AND)
            args[jump] = len(ops)
        elif isinstance(n, Or):
            walk(n.lhs)
            jump = emit(OP_JUMP_IF_TRUE)
            emit(OP_POP)
            walk(n.rhs)
            emit(OP_ENSURE_BOOL, BOOL_OR)
            args[jump] = len(ops)
        elif isinstance(n, Comparison):
            walk(n.lhs)
            walk(n.rhs)
            emit(OP_CMP, _CMP_CODES[n.op])
        else:
            raise TypeError(f"not an expression node: {n!r}")

    walk(node)
    return Program(array("i", ops), tuple(args))


def value_type_name(value) -> str:
    """Classify a runtime value for error messages and type checks."""
    if value is True or value is False:
        return "BOOLEAN"
    if isinstance(value, (int, float)):
        return "NUMBER"
    if isinstance(value, str):
        return "TEXT"
    return type(value).__name__.upper()
