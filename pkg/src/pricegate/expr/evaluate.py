"""Expression evaluation entry point with backend selection.

The compiled interpreter (pricegate.expr._fastvm) is used when the
extension was built; otherwise the pure Python interpreter takes over.
Set PRICEGATE_PURE_EVAL=1 to force the pure backend regardless.
"""

from __future__ import annotations

import os
from functools import lru_cache

from pricegate.expr.ast import Expr
from pricegate.expr.program import Program, compile_expression
from pricegate.expr import vm as _pure_vm

if os.environ.get("PRICEGATE_PURE_EVAL") == "1":
    _run = _pure_vm.run_program
    _BACKEND = "pure"
else:
    try:
        from pricegate.expr import _fastvm as _fast_vm

        _run = _fast_vm.run_program
        _BACKEND = "compiled"
    except ImportError:
        _run = _pure_vm.run_program
        _BACKEND = "pure"


def evaluation_backend() -> str:
    """Name of the active interpreter: "compiled" or "pure"."""
    return _BACKEND


@lru_cache(maxsize=2048)
def compiled(node: Expr) -> Program:
    """Compile an AST, memoised on structural equality."""
    return compile_expression(node)


def evaluate_expression(node: Expr, bindings: dict):
    """Evaluate an expression AST against a symbol binding map.

    Raises UnboundSymbol for paths missing from bindings (unless short
    circuiting skipped them) and TypeMismatch for ill-typed operations.
    """
    program = compiled(node)
    return _run(program.ops, program.args, bindings)
