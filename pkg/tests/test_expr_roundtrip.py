"""parse(print(ast)) == ast, for hand-picked precedence cases and for
generated ASTs. The generator covers every node type, negative and
fractional numbers, escaped strings, and paths up to 4 segments.
"""

import pytest
from hypothesis import given, settings, strategies as st

from pricegate.expr import (
    And,
    BooleanLiteral,
    Comparison,
    Not,
    NumberLiteral,
    Or,
    StringLiteral,
    SymbolPath,
    parse_expression,
    print_expression,
)

a, b, c = SymbolPath(("a",)), SymbolPath(("b",)), SymbolPath(("c",))


class TestMinimalParens:
    def test_boolean_literal(self):
        assert print_expression(BooleanLiteral(True)) == "true"

    def test_and_of_or_needs_parens(self):
        assert print_expression(And(a, Or(b, c))) == "a && (b || c)"

    def test_or_of_and_needs_none(self):
        assert print_expression(Or(a, And(b, c))) == "a || b && c"

    def test_left_nested_and_needs_none(self):
        assert print_expression(And(And(a, b), c)) == "a && b && c"

    def test_right_nested_and_keeps_shape(self):
        # without parens this would reparse left-associated
        text = print_expression(And(a, And(b, c)))
        assert text == "a && (b && c)"
        assert parse_expression(text) == And(a, And(b, c))

    def test_not_of_and(self):
        assert print_expression(Not(And(a, b))) == "!(a && b)"

    def test_not_of_atom(self):
        assert print_expression(Not(a)) == "!a"

    def test_comparison_inside_and(self):
        expr = And(Comparison("<", a, NumberLiteral(1.0)), b)
        assert print_expression(expr) == "a < 1 && b"

    def test_integral_float_prints_bare(self):
        assert print_expression(NumberLiteral(4.0)) == "4"

    def test_fractional_float(self):
        assert print_expression(NumberLiteral(9.95)) == "9.95"

    def test_string_escaping(self):
        lit = StringLiteral('say "hi"\n')
        assert parse_expression(print_expression(lit)) == lit


segment = st.from_regex(r"[a-z][a-zA-Z0-9_]{0,7}", fullmatch=True).filter(
    lambda s: s not in ("true", "false")
)
paths = st.builds(
    SymbolPath, st.lists(segment, min_size=1, max_size=4).map(tuple)
)
numbers = st.one_of(
    st.integers(min_value=-10_000, max_value=10_000).map(
        lambda n: NumberLiteral(float(n))
    ),
    st.floats(
        min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False
    ).map(NumberLiteral),
)
strings = st.builds(
    StringLiteral, st.text(st.characters(codec="ascii"), max_size=12)
)
operands = st.one_of(paths, numbers, strings, st.builds(BooleanLiteral, st.booleans()))
comparisons = st.builds(
    Comparison,
    st.sampled_from(["<", "<=", ">", ">=", "==", "!="]),
    operands,
    operands,
)


def trees(depth: int):
    if depth == 0:
        return st.one_of(operands, comparisons)
    sub = trees(depth - 1)
    return st.one_of(
        operands,
        comparisons,
        st.builds(Not, sub),
        st.builds(And, sub, sub),
        st.builds(Or, sub, sub),
    )


class TestGeneratedRoundTrips:
    @settings(max_examples=1000, deadline=None)
    @given(trees(5))
    def test_parse_print_identity(self, ast):
        assert parse_expression(print_expression(ast)) == ast

    @settings(max_examples=200, deadline=None)
    @given(trees(3))
    def test_print_is_stable(self, ast):
        text = print_expression(ast)
        assert print_expression(parse_expression(text)) == text
