"""Exception types shared across the package.

Expression-evaluation errors live in pricegate.expr.errors so the
evaluator backends can be imported without pulling in the domain model.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class PricegateError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(PricegateError):
    """A pricing document could not be turned into a Pricing value.

    kind is one of "SYNTAX" (unparsable YAML/JSON), "SCHEMA" (wrong
    shape or wrong scalar type) or "DUPLICATE_NAME" (two declarations
    of the same kind share a name). line/column are 1-based and only
    set for syntax errors; path points at the offending node for the
    other kinds.
    """

    def __init__(
        self,
        kind: str,
        message: str,
        *,
        line: int | None = None,
        column: int | None = None,
        path: str | None = None,
    ) -> None:
        self.kind = kind
        self.message = message
        self.line = line
        self.column = column
        self.path = path
        where = ""
        if line is not None:
            where = f" (line {line}, column {column})"
        elif path:
            where = f" (at {path})"
        super().__init__(f"{kind}: {message}{where}")


@dataclass(frozen=True)
class Violation:
    """One problem found by validate_pricing.

    kind: DanglingReference, TypeMismatch, ExpressionSyntax,
    UnknownSymbol, NegativeLimit, NegativePrice, NoPlans,
    DuplicateName or DuplicateSymbol.
    path: dotted location inside the document, e.g.
    "plans.GOLD.featureValues.grooming".
    """

    kind: str
    path: str
    message: str


class UnknownPlan(PricegateError):
    def __init__(self, name: str) -> None:
        self.name = name
        super().__init__(f"unknown plan: {name!r}")


class UnknownAddOn(PricegateError):
    def __init__(self, name: str) -> None:
        self.name = name
        super().__init__(f"unknown add-on: {name!r}")


class AddOnNotAvailableForPlan(PricegateError):
    def __init__(self, add_on: str, plan: str) -> None:
        self.add_on = add_on
        self.plan = plan
        super().__init__(f"add-on {add_on!r} is not available for plan {plan!r}")


class UnknownFeature(PricegateError):
    def __init__(self, name: str) -> None:
        self.name = name
        super().__init__(f"unknown feature: {name!r}")


class UnknownLimit(PricegateError):
    def __init__(self, name: str) -> None:
        self.name = name
        super().__init__(f"unknown usage limit: {name!r}")


class EntityKeyRequired(PricegateError):
    def __init__(self, limit_name: str) -> None:
        self.limit_name = limit_name
        super().__init__(
            f"usage limit {limit_name!r} is entity-scoped; an entityKey is required"
        )


class SwapError(PricegateError):
    """A pricing hot-swap was rejected; the active snapshot is unchanged.

    kind is "ValidationFailed" (violations carries the details) or
    "StaleVersion".
    """

    def __init__(
        self, kind: str, message: str, violations: tuple[Violation, ...] = ()
    ) -> None:
        self.kind = kind
        self.violations = violations
        super().__init__(f"{kind}: {message}")


class StoreUnavailable(PricegateError):
    """The usage/subscription store could not serve the request."""


class WeakKey(PricegateError):
    def __init__(self, length: int) -> None:
        self.length = length
        super().__init__(
            f"signing key must be at least 32 bytes, got {length}"
        )
