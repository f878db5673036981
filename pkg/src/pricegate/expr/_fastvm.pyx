# cython: language_level=3
"""Cython build of the expression program interpreter.

Keep this loop semantically identical to pricegate.expr.vm.run_program;
the instruction set is defined in pricegate.expr.program and the test
suite exercises both interpreters against the same cases.
"""

from pricegate.expr.errors import TypeMismatch, UnboundSymbol
from pricegate.expr.program import value_type_name

cdef int OP_PUSH = 0
cdef int OP_LOAD = 1
cdef int OP_NOT = 2
cdef int OP_CMP = 3
cdef int OP_JUMP_IF_FALSE = 4
cdef int OP_JUMP_IF_TRUE = 5
cdef int OP_POP = 6
cdef int OP_ENSURE_BOOL = 7

cdef int CMP_LT = 0
cdef int CMP_LE = 1
cdef int CMP_GT = 2
cdef int CMP_GE = 3
cdef int CMP_EQ = 4
cdef int CMP_NE = 5

cdef tuple CMP_NAMES = ("<", "<=", ">", ">=", "==", "!=")

cdef int BOOL_AND = 0


cdef inline bint _is_bool(object value):
    return value is True or value is False


cdef object _compare(int code, object lhs, object rhs):
    cdef bint lhs_bool = _is_bool(lhs)
    cdef bint rhs_bool = _is_bool(rhs)
    op = CMP_NAMES[code]
    if lhs_bool or rhs_bool:
        if not (lhs_bool and rhs_bool):
            raise TypeMismatch(op, value_type_name(lhs), value_type_name(rhs))
        if code == CMP_EQ:
            return lhs is rhs
        if code == CMP_NE:
            return lhs is not rhs
        raise TypeMismatch(op, "BOOLEAN", "BOOLEAN")
    cdef bint lhs_num = isinstance(lhs, (int, float))
    cdef bint rhs_num = isinstance(rhs, (int, float))
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


def run_program(ops, tuple args, dict bindings):
    """Execute a compiled program against a symbol binding map."""
    cdef int[::1] code = ops
    cdef Py_ssize_t ip = 0
    cdef Py_ssize_t n = code.shape[0]
    cdef int op
    cdef list stack = []
    cdef object v, rhs, path
    while ip < n:
        op = code[ip]
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
            stack[-1] = _compare(<int> args[ip], stack[-1], rhs)
        elif op == OP_JUMP_IF_FALSE:
            v = stack[-1]
            if v is False:
                ip = <Py_ssize_t> args[ip]
                continue
            if v is not True:
                raise TypeMismatch("&&", value_type_name(v), None)
        elif op == OP_JUMP_IF_TRUE:
            v = stack[-1]
            if v is True:
                ip = <Py_ssize_t> args[ip]
                continue
            if v is not False:
                raise TypeMismatch("||", value_type_name(v), None)
        elif op == OP_POP:
            stack.pop()
        elif op == OP_ENSURE_BOOL:
            v = stack[-1]
            if not (v is True or v is False):
                name = "&&" if <int> args[ip] == BOOL_AND else "||"
                raise TypeMismatch(name, "BOOLEAN", value_type_name(v))
        ip += 1
    return stack[-1]
