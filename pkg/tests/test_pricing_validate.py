"""Every violation kind, each triggered by a minimal mutation of a
valid document. Violations are data: validate never raises.
"""

import pytest

from pricegate import parse_pricing, validate_pricing

BASE = """
name: shop
version: 1
currency: USD
usageLimits:
  - name: widgets
    unit: widgets
    defaultValue: 3
    scope: SUBSCRIPTION
    period: LIFETIME
features:
  - name: widget maker
    valueType: BOOLEAN
    defaultValue: true
    expression: context.widgetsUsed < plan.widgets
    attachedLimits: [widgets]
  - name: tier label
    valueType: TEXT
    defaultValue: basic
plans:
  - name: FREE
    monthlyPrice: 0
    featureValues:
      widget maker: true
    limitValues:
      widgets: 3
  - name: PRO
    monthlyPrice: 10
    featureValues:
      widget maker: true
      tier label: pro
    limitValues:
      widgets: 10
addOns:
  - name: extra widgets
    monthlyPrice: 2
    limitDeltas:
      widgets: 5
"""


def violations_of(document: str):
    return validate_pricing(parse_pricing(document))


def kinds_of(document: str):
    return {v.kind for v in violations_of(document)}


class TestValidDocument:
    def test_no_violations(self):
        assert violations_of(BASE) == []

    def test_fixture_is_valid(self, pricing):
        assert validate_pricing(pricing) == []


class TestDanglingReferences:
    def test_plan_feature(self):
        bad = BASE.replace("      widget maker: true\n", "      ghost: true\n", 1)
        assert "DanglingReference" in kinds_of(bad)

    def test_plan_limit(self):
        bad = BASE.replace("      widgets: 3", "      gremlins: 3")
        assert "DanglingReference" in kinds_of(bad)

    def test_attached_limit(self):
        bad = BASE.replace("attachedLimits: [widgets]", "attachedLimits: [nothing]")
        assert "DanglingReference" in kinds_of(bad)

    def test_add_on_feature(self):
        bad = BASE.replace(
            "    limitDeltas:", "    featureValues:\n      ghost: true\n    limitDeltas:"
        )
        assert "DanglingReference" in kinds_of(bad)

    def test_add_on_limit_delta(self):
        bad = BASE.replace("      widgets: 5", "      gremlins: 5")
        assert "DanglingReference" in kinds_of(bad)

    def test_depends_on_unknown_plan(self):
        bad = BASE + "    dependsOnPlans: [ENTERPRISE]\n"
        assert "DanglingReference" in kinds_of(bad)

    def test_violation_path_points_at_entry(self):
        bad = BASE.replace("      widgets: 3", "      gremlins: 3")
        paths = [v.path for v in violations_of(bad) if v.kind == "DanglingReference"]
        assert paths == ["plans.FREE.limitValues.gremlins"]


class TestTypeMismatches:
    def test_plan_value_wrong_type(self):
        bad = BASE.replace("      widget maker: true\n", "      widget maker: 5\n", 1)
        assert "TypeMismatch" in kinds_of(bad)

    def test_default_value_wrong_type(self):
        bad = BASE.replace("defaultValue: basic", "defaultValue: false")
        assert "TypeMismatch" in kinds_of(bad)


class TestExpressions:
    def test_syntax_error_reported(self):
        bad = BASE.replace(
            "expression: context.widgetsUsed < plan.widgets", 'expression: "a &&"'
        )
        violations = violations_of(bad)
        syntax = [v for v in violations if v.kind == "ExpressionSyntax"]
        assert len(syntax) == 1
        assert "offset" in syntax[0].message

    def test_bare_namespace_rejected(self):
        bad = BASE.replace(
            "expression: context.widgetsUsed < plan.widgets",
            "expression: widgetsUsed < plan.widgets",
        )
        assert "UnknownSymbol" in kinds_of(bad)

    def test_unknown_plan_symbol(self):
        bad = BASE.replace(
            "expression: context.widgetsUsed < plan.widgets",
            "expression: context.widgetsUsed < plan.nonesuch",
        )
        assert "UnknownSymbol" in kinds_of(bad)

    def test_unknown_subscription_field(self):
        bad = BASE.replace(
            "expression: context.widgetsUsed < plan.widgets",
            "expression: subscription.tier == \"x\"",
        )
        assert "UnknownSymbol" in kinds_of(bad)

    def test_context_namespace_is_open(self):
        doc = BASE.replace(
            "expression: context.widgetsUsed < plan.widgets",
            "expression: context.anythingAtAll == 1",
        )
        assert violations_of(doc) == []

    def test_plan_symbol_for_feature(self):
        # feature symbols are also addressable through plan.*
        doc = BASE.replace(
            "expression: context.widgetsUsed < plan.widgets",
            "expression: plan.widgetMaker == true",
        )
        assert violations_of(doc) == []


class TestNumericRules:
    def test_negative_limit_default(self):
        bad = BASE.replace("defaultValue: 3", "defaultValue: -3")
        assert "NegativeLimit" in kinds_of(bad)

    def test_negative_plan_limit(self):
        bad = BASE.replace("      widgets: 3", "      widgets: -1")
        assert "NegativeLimit" in kinds_of(bad)

    def test_negative_plan_price(self):
        bad = BASE.replace("monthlyPrice: 10", "monthlyPrice: -10")
        assert "NegativePrice" in kinds_of(bad)

    def test_negative_add_on_price(self):
        bad = BASE.replace("monthlyPrice: 2", "monthlyPrice: -2")
        assert "NegativePrice" in kinds_of(bad)

    def test_negative_delta_is_fine(self):
        doc = BASE.replace("      widgets: 5", "      widgets: -2")
        assert violations_of(doc) == []


class TestStructural:
    def test_no_plans(self):
        bad = BASE.replace(
            """plans:
  - name: FREE
    monthlyPrice: 0
    featureValues:
      widget maker: true
    limitValues:
      widgets: 3
  - name: PRO
    monthlyPrice: 10
    featureValues:
      widget maker: true
      tier label: pro
    limitValues:
      widgets: 10
""",
            "plans: []\n",
        )
        assert kinds_of(bad) == {"NoPlans"}

    def test_feature_limit_name_collision(self):
        # same name for a feature and a limit is allowed (the fixture
        # does it) but a symbol collision between two distinct names
        # that camel-case identically is not
        bad = BASE.replace(
            "  - name: tier label\n    valueType: TEXT\n    defaultValue: basic\n",
            "  - name: tier label\n    valueType: TEXT\n    defaultValue: basic\n"
            "  - name: tier-label\n    valueType: BOOLEAN\n",
        )
        assert "DuplicateSymbol" in kinds_of(bad)

    def test_multiple_violations_all_reported(self):
        bad = BASE.replace("monthlyPrice: 10", "monthlyPrice: -10").replace(
            "      widgets: 3", "      gremlins: 3"
        )
        kinds = kinds_of(bad)
        assert {"NegativePrice", "DanglingReference"} <= kinds
