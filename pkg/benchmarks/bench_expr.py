"""Throughput comparison of the two expression VM backends.

Runs the same compiled programs through the pure-Python interpreter
and, when built, the C extension, and prints evaluations per second
for each. Keep workloads here small and branchy: real gate
expressions are a handful of opcodes, so dispatch overhead dominates
and that is exactly what the extension exists to cut.

    python3 benchmarks/bench_expr.py [iterations]
"""

from __future__ import annotations

import sys
import time

from pricegate.expr import vm as pure_vm
from pricegate.expr.parser import parse_expression
from pricegate.expr.program import compile_expression

WORKLOADS = {
    "limit gate": (
        "context.userPets < plan.petsPerOwner",
        {"context.userPets": 3, "plan.petsPerOwner": 7},
    ),
    "tier check": (
        'subscription.plan == "PLATINUM" || subscription.plan == "GOLD"',
        {"subscription.plan": "GOLD"},
    ),
    "branchy": (
        "!(a && b) || c && (x < 10 || y >= 2.5) && !d",
        {"a": True, "b": False, "c": True, "x": 12, "y": 3, "d": False},
    ),
}


def backends() -> dict:
    found = {"pure": pure_vm.run_program}
    try:
        from pricegate.expr import _fastvm
    except ImportError:
        pass
    else:
        found["compiled"] = _fastvm.run_program
    return found


def main() -> None:
    iterations = int(sys.argv[1]) if len(sys.argv) > 1 else 200_000
    available = backends()
    print(f"{iterations:,} evaluations per cell\n")
    header = f"{'workload':<12}" + "".join(f"{name:>16}" for name in available)
    if len(available) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for label, (source, bindings) in WORKLOADS.items():
        program = compile_expression(parse_expression(source))
        rates = []
        row = f"{label:<12}"
        for name, run in available.items():
            ops, args = program.ops, program.args
            start = time.perf_counter()
            for _ in range(iterations):
                run(ops, args, bindings)
            elapsed = time.perf_counter() - start
            rates.append(iterations / elapsed)
            row += f"{rates[-1]:>13,.0f}/s"
        if len(rates) == 2:
            row += f"{rates[1] / rates[0]:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
