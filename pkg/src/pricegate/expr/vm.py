"""Pure Python interpreter for compiled expression programs.

Reference implementation of the instruction semantics; the Cython
module pricegate.expr._fastvm mirrors this loop exactly and the test
suite runs both against the same cases.
"""

from __future__ import annotations

from pricegate.expr.errors import TypeMismatch, UnboundSymbol
from pricegate.expr.program import (
    BOOL_AND,
    CMP_EQ,
    CMP_GE,
    CMP_GT,
    CMP_LE,
    CMP_LT,
    CMP_NAMES,
    CMP_NE,
    OP_CMP,
    OP_ENSURE_BOOL,
    OP_JUMP_IF_FALSE,
    OP_JUMP_IF_TRUE,
    OP_LOAD,
    OP_NOT,
    OP_POP,
    OP_PUSH,
    value_type_name,
)


def _is_bool(value) -> bool:
    return value is True or value is False


def _compare(code: int, lhs, rhs):
    lhs_bool = _is_bool(lhs)
    rhs_bool = _is_bool(rhs)
    op = CMP_NAMES[code]
    if lhs_bool or rhs_bool:
        # Booleans compare only with booleans and only for equality.
        if not (lhs_bool and rhs_bool):
            raise TypeMismatch(op, value_type_name(lhs), value_type_name(rhs))
        if code == CMP_EQ:
            return lhs is rhs
        if code == CMP_NE:
            return lhs is not rhs
        raise TypeMismatch(op, "BOOLEAN", "BOOLEAN")
    lhs_num = isinstance(lhs, (int, float))
    rhs_num = isinstance(rhs, (int, float))
    if lhs_num and rhs_num:
        if code == CMP_LT:
            return lhs < rhs
        if code == CMP_LE:
            return lhs <= rhs
        if code == CMP_GT:
            return lhs > rhs
        if code == CMP_GE:
            return lhs >= rhs
        if code == CMP_EQ:
            return lhs == rhs
        return lhs != rhs
    if isinstance(lhs, str) and isinstance(rhs, str):
        if code == CMP_EQ:
            return lhs == rhs
        if code == CMP_NE:
            return lhs != rhs
        raise TypeMismatch(op, "TEXT", "TEXT")
    raise TypeMismatch(op, value_type_name(lhs), value_type_name(rhs))


def run_program(ops, args, bindings):
    """Execute a compiled program against a symbol binding map."""
    stack: list = []
    ip = 0
    n = len(ops)
    while ip < n:
        op = ops[ip]
        if op == OP_PUSH:
            stack.append(args[ip])
        elif op == OP_LOAD:
            path = args[ip]
            try:
                stack.append(bindings[path])
            except KeyError:
                raise UnboundSymbol(path) from None
        elif op == OP_NOT:
            v = stack[-1]
            if v is True:
                stack[-1] = False
            elif v is False:
                stack[-1] = True
            else:
                raise TypeMismatch("!", value_type_name(v), None)
        elif op == OP_CMP:
            rhs = stack.pop()
            stack[-1] = _compare(args[ip], stack[-1], rhs)
        elif op == OP_JUMP_IF_FALSE:
            v = stack[-1]
            if v is False:
                ip = args[ip]
                continue
            if v is not True:
                raise TypeMismatch("&&", value_type_name(v), None)
        elif op == OP_JUMP_IF_TRUE:
            v = stack[-1]
            if v is True:
                ip = args[ip]
                continue
            if v is not False:
                raise TypeMismatch("||", value_type_name(v), None)
        elif op == OP_POP:
            stack.pop()
        elif op == OP_ENSURE_BOOL:
            v = stack[-1]
            if not (v is True or v is False):
                name = "&&" if args[ip] == BOOL_AND else "||"
                raise TypeMismatch(name, "BOOLEAN", value_type_name(v))
        ip += 1
    return stack[-1]
