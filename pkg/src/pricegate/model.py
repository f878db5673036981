"""Domain model for pricing documents and subscriptions.

Declared names (features, plans, add-ons, usage limits) are free-form
human text such as "pets per owner". Inside expressions they appear in
lowerCamelCase, derived by symbol_name; the plan namespace exposes both
feature values and limit values, and when a feature and a limit share a
symbol the limit wins (a feature gating "pets per owner" needs the
numeric cap under plan.petsPerOwner, not its own boolean).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Union

from pricegate.expr.ast import Expr

FeatureValue = Union[bool, int, float, str]

# Symbols bindable under the subscription.* and feature.* namespaces.
SUBSCRIPTION_BINDINGS = ("plan", "id", "addOnCount")
FEATURE_BINDINGS = ("name", "value", "defaultValue")

_WORD_SPLIT = re.compile(r"[^0-9A-Za-z]+")


def symbol_name(name: str) -> str:
    """Map a declared name to its lowerCamelCase expression symbol.

    "pets per owner" -> "petsPerOwner". Existing casing inside words is
    preserved, so "maxVisits" stays "maxVisits". A leading digit gets
    an underscore prefix to keep the result a valid identifier.
    """
    words = [w for w in _WORD_SPLIT.split(name) if w]
    if not words:
        return "_"
    parts = [words[0][:1].lower() + words[0][1:]]
    for word in words[1:]:
        parts.append(word[:1].upper() + word[1:])
    result = "".join(parts)
    if result[0].isdigit():
        result = "_" + result
    return result


class ValueType(str, Enum):
    BOOLEAN = "BOOLEAN"
    NUMERIC = "NUMERIC"
    TEXT = "TEXT"


class LimitScope(str, Enum):
    SUBSCRIPTION = "SUBSCRIPTION"
    ENTITY = "ENTITY"


class LimitPeriod(str, Enum):
    LIFETIME = "LIFETIME"
    BILLING_PERIOD = "BILLING_PERIOD"


def value_conforms(value: FeatureValue, value_type: ValueType) -> bool:
    if value_type is ValueType.BOOLEAN:
        return isinstance(value, bool)
    if value_type is ValueType.NUMERIC:
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    return isinstance(value, str)


@dataclass(frozen=True)
class Feature:
    """A sellable capability. expression_ast is derived from expression
    at parse time and is None when the text does not parse; validation
    reports that as an ExpressionSyntax violation."""

    name: str
    description: str = ""
    value_type: ValueType = ValueType.BOOLEAN
    default_value: FeatureValue = False
    expression: str | None = None
    attached_limits: tuple[str, ...] = ()
    expression_ast: Expr | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class UsageLimit:
    """A metered cap. context_key names the context.* identifier that
    carries the current counter value into expressions; it defaults to
    the limit symbol with a "Used" suffix."""

    name: str
    unit: str
    default_value: float
    scope: LimitScope = LimitScope.SUBSCRIPTION
    period: LimitPeriod = LimitPeriod.LIFETIME
    context_key: str | None = None

    @property
    def effective_context_key(self) -> str:
        return self.context_key or symbol_name(self.name) + "Used"


@dataclass(frozen=True)
class Plan:
    name: str
    monthly_price: float = 0.0
    feature_values: dict = field(default_factory=dict)
    limit_values: dict = field(default_factory=dict)


@dataclass(frozen=True)
class AddOn:
    """An optional purchase on top of a plan. feature_values grants or
    overrides feature values; limit_deltas add to plan limit values;
    depends_on_plans, when non-empty, restricts which plans may attach
    the add-on."""

    name: str
    monthly_price: float = 0.0
    feature_values: dict = field(default_factory=dict)
    limit_deltas: dict = field(default_factory=dict)
    depends_on_plans: tuple[str, ...] = ()


@dataclass(frozen=True)
class Pricing:
    name: str
    version: int
    currency: str
    features: tuple[Feature, ...] = ()
    plans: tuple[Plan, ...] = ()
    add_ons: tuple[AddOn, ...] = ()
    usage_limits: tuple[UsageLimit, ...] = ()
    _features: dict = field(init=False, repr=False, compare=False)
    _plans: dict = field(init=False, repr=False, compare=False)
    _add_ons: dict = field(init=False, repr=False, compare=False)
    _limits: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_features", {f.name: f for f in self.features})
        object.__setattr__(self, "_plans", {p.name: p for p in self.plans})
        object.__setattr__(self, "_add_ons", {a.name: a for a in self.add_ons})
        object.__setattr__(self, "_limits", {l.name: l for l in self.usage_limits})

    def find_feature(self, name: str) -> Feature | None:
        return self._features.get(name)

    def find_plan(self, name: str) -> Plan | None:
        return self._plans.get(name)

    def find_add_on(self, name: str) -> AddOn | None:
        return self._add_ons.get(name)

    def find_limit(self, name: str) -> UsageLimit | None:
        return self._limits.get(name)

    def plan_symbols(self) -> dict[str, str]:
        """Map of expression symbol -> declared name for the plan.*
        namespace. Feature symbols first, then limits, so limits shadow
        features on collision."""
        table = {symbol_name(f.name): f.name for f in self.features}
        table.update({symbol_name(l.name): l.name for l in self.usage_limits})
        return table


def utcnow() -> datetime:
    return datetime.now(timezone.utc)


@dataclass(frozen=True)
class Subscription:
    """One subscriber's plan choice plus any number of add-ons."""

    subscriber_id: str
    plan_name: str
    add_on_names: frozenset[str] = frozenset()
    started_at: datetime = field(default_factory=utcnow)
    period_start: datetime = field(default_factory=utcnow)


@dataclass(frozen=True)
class Entitlement:
    """An effective value plus where it came from: "PLAN", "DEFAULT" or
    "ADDON:<name>" (the lexicographically last add-on that contributed)."""

    value: FeatureValue
    provenance: str


@dataclass(frozen=True)
class EntitlementSet:
    """Effective values for every declared feature and usage limit
    under one plan + add-on combination."""

    features: dict
    limits: dict
