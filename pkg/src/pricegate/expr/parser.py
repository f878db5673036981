"""Recursive-descent parser for availability expressions.

Grammar (binding from loosest to tightest: || then && then comparison
then !):

    expr   := or
    or     := and ("||" and)*
    and    := cmp ("&&" cmp)*
    cmp    := unary (cmpop unary)?        cmpop: < <= > >= == !=
    unary  := "!" unary | primary
    primary:= "true" | "false" | number | string | path | "(" expr ")"
    path   := ident ("." ident)*          1 to 4 segments
    number := digits ("." digits)?
    string := '"' chars with \\ escapes '"'

Comparison operands must be literals or symbol paths; comparisons do
not nest. Namespace restrictions on the first path segment are not
applied here (standalone expressions may use free variables); they are
enforced when a pricing document is validated.
"""

from __future__ import annotations

from pricegate.expr.ast import (
    And,
    BooleanLiteral,
    COMPARISON_OPS,
    Comparison,
    Expr,
    MAX_PATH_SEGMENTS,
    Not,
    NumberLiteral,
    Or,
    StringLiteral,
    SymbolPath,
)
from pricegate.expr.errors import ExpressionError

_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "t": "\t", "r": "\r"}

# token kinds
_IDENT = "ident"
_NUMBER = "number"
_STRING = "string"
_OP = "op"
_EOF = "eof"

_TWO_CHAR_OPS = ("&&", "||", "<=", ">=", "==", "!=")
_ONE_CHAR_OPS = ("!", "<", ">", "(", ")", ".")


class _Token:
    __slots__ = ("kind", "text", "value", "offset")

    def __init__(self, kind: str, text: str, value, offset: int) -> None:
        self.kind = kind
        self.text = text
        self.value = value
        self.offset = offset


def _tokenize(source: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    n = len(source)
    while i < n:
        ch = source[i]
        if ch in " \t\r\n":
            i += 1
            continue
        if source[i : i + 2] in _TWO_CHAR_OPS:
            tokens.append(_Token(_OP, source[i : i + 2], None, i))
            i += 2
            continue
        if ch in _ONE_CHAR_OPS:
            tokens.append(_Token(_OP, ch, None, i))
            i += 1
            continue
        if ch.isdigit() or (ch == "-" and i + 1 < n and source[i + 1].isdigit()):
            # no arithmetic in the grammar, so "-" can only open a number
            j = i + 1
            while j < n and source[j].isdigit():
                j += 1
            if j < n and source[j] == "." and j + 1 < n and source[j + 1].isdigit():
                j += 1
                while j < n and source[j].isdigit():
                    j += 1
            tokens.append(_Token(_NUMBER, source[i:j], float(source[i:j]), i))
            i = j
            continue
        if ch == '"':
            j = i + 1
            parts: list[str] = []
            while True:
                if j >= n:
                    raise ExpressionError("unterminated string literal", i)
                c = source[j]
                if c == '"':
                    j += 1
                    break
                if c == "\\":
                    if j + 1 >= n:
                        raise ExpressionError("unterminated string literal", i)
                    esc = source[j + 1]
                    if esc not in _ESCAPES:
                        raise ExpressionError(f"unknown escape \\{esc}", j)
                    parts.append(_ESCAPES[esc])
                    j += 2
                    continue
                parts.append(c)
                j += 1
            tokens.append(_Token(_STRING, source[i:j], "".join(parts), i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            tokens.append(_Token(_IDENT, source[i:j], source[i:j], i))
            i = j
            continue
        raise ExpressionError(f"unexpected character {ch!r}", i)
    tokens.append(_Token(_EOF, "", None, n))
    return tokens


class _Parser:
    def __init__(self, source: str) -> None:
        self._tokens = _tokenize(source)
        self._pos = 0

    def _peek(self) -> _Token:
        return self._tokens[self._pos]

    def _next(self) -> _Token:
        tok = self._tokens[self._pos]
        self._pos += 1
        return tok

    def _expect_op(self, text: str) -> None:
        tok = self._next()
        if tok.kind != _OP or tok.text != text:
            raise ExpressionError(f"expected {text!r}", tok.offset)

    def parse(self) -> Expr:
        node = self._or()
        tok = self._peek()
        if tok.kind != _EOF:
            raise ExpressionError(f"unexpected trailing input {tok.text!r}", tok.offset)
        return node

    def _or(self) -> Expr:
        node = self._and()
        while self._peek().kind == _OP and self._peek().text == "||":
            self._next()
            node = Or(node, self._and())
        return node

    def _and(self) -> Expr:
        node = self._cmp()
        while self._peek().kind == _OP and self._peek().text == "&&":
            self._next()
            node = And(node, self._cmp())
        return node

    def _cmp(self) -> Expr:
        start = self._peek().offset
        node = self._unary()
        tok = self._peek()
        if tok.kind == _OP and tok.text in COMPARISON_OPS:
            self._check_operand(node, start)
            self._next()
            rhs_start = self._peek().offset
            rhs = self._unary()
            self._check_operand(rhs, rhs_start)
            after = self._peek()
            if after.kind == _OP and after.text in COMPARISON_OPS:
                raise ExpressionError("comparisons cannot be chained", after.offset)
            return Comparison(tok.text, node, rhs)
        return node

    @staticmethod
    def _check_operand(node: Expr, offset: int) -> None:
        if not isinstance(
            node, (BooleanLiteral, NumberLiteral, StringLiteral, SymbolPath)
        ):
            raise ExpressionError(
                "comparison operand must be a literal or symbol path", offset
            )

    def _unary(self) -> Expr:
        tok = self._peek()
        if tok.kind == _OP and tok.text == "!":
            self._next()
            return Not(self._unary())
        return self._primary()

    def _primary(self) -> Expr:
        tok = self._next()
        if tok.kind == _OP and tok.text == "(":
            node = self._or()
            self._expect_op(")")
            return node
        if tok.kind == _NUMBER:
            return NumberLiteral(tok.value)
        if tok.kind == _STRING:
            return StringLiteral(tok.value)
        if tok.kind == _IDENT:
            if tok.text == "true":
                return BooleanLiteral(True)
            if tok.text == "false":
                return BooleanLiteral(False)
            segments = [tok.text]
            while self._peek().kind == _OP and self._peek().text == ".":
                self._next()
                seg = self._next()
                if seg.kind != _IDENT:
                    raise ExpressionError("expected identifier after '.'", seg.offset)
                if seg.text in ("true", "false"):
                    raise ExpressionError(
                        "keyword cannot be a path segment", seg.offset
                    )
                segments.append(seg.text)
            if len(segments) > MAX_PATH_SEGMENTS:
                raise ExpressionError(
                    f"symbol path has more than {MAX_PATH_SEGMENTS} segments",
                    tok.offset,
                )
            return SymbolPath(tuple(segments))
        if tok.kind == _EOF:
            raise ExpressionError("unexpected end of expression", tok.offset)
        raise ExpressionError(f"unexpected token {tok.text!r}", tok.offset)


def parse_expression(source: str) -> Expr:
    """Parse source into an expression AST.

    Raises ExpressionError with a 0-based character offset on invalid
    input.
    """
    return _Parser(source).parse()
