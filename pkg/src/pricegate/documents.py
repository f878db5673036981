"""Pricing document parsing, validation and serialization.

Documents are YAML mappings (JSON is a YAML subset and parses too) with
the top-level keys name, version, currency, features, plans, addOns and
usageLimits. parse_pricing is strict about shape: unknown keys, wrong
scalar types and duplicate names are rejected outright. Semantic
problems that leave the document representable (dangling references,
ill-typed values, broken expressions) are reported by validate_pricing
so tooling can show them all at once.
"""

from __future__ import annotations

import re

import yaml

from pricegate.errors import ParseError, Violation
from pricegate.expr.ast import (
    Expr,
    NAMESPACES,
    collect_identifiers,
)
from pricegate.expr.errors import ExpressionError
from pricegate.expr.parser import parse_expression
from pricegate.model import (
    AddOn,
    FEATURE_BINDINGS,
    Feature,
    LimitPeriod,
    LimitScope,
    Plan,
    Pricing,
    SUBSCRIPTION_BINDINGS,
    UsageLimit,
    ValueType,
    symbol_name,
    value_conforms,
)

_CURRENCY = re.compile(r"^[A-Z]{3}$")

_TOP_KEYS = {"name", "version", "currency", "features", "plans", "addOns", "usageLimits"}
_FEATURE_KEYS = {"name", "description", "valueType", "defaultValue", "expression", "attachedLimits"}
_PLAN_KEYS = {"name", "monthlyPrice", "featureValues", "limitValues"}
_ADDON_KEYS = {"name", "monthlyPrice", "featureValues", "limitDeltas", "dependsOnPlans"}
_LIMIT_KEYS = {"name", "unit", "defaultValue", "scope", "period", "contextKey"}


def _schema_error(message: str, path: str) -> ParseError:
    return ParseError("SCHEMA", message, path=path)


def _require_mapping(node, path: str) -> dict:
    if not isinstance(node, dict):
        raise _schema_error("expected a mapping", path)
    return node


def _require_list(node, path: str) -> list:
    if node is None:
        return []
    if not isinstance(node, list):
        raise _schema_error("expected a list", path)
    return node


def _require_str(node, path: str) -> str:
    if not isinstance(node, str):
        raise _schema_error("expected a string", path)
    return node


def _require_number(node, path: str) -> float:
    if isinstance(node, bool) or not isinstance(node, (int, float)):
        raise _schema_error("expected a number", path)
    return node


def _require_scalar(node, path: str):
    if node is None or isinstance(node, (bool, int, float, str)):
        return node
    raise _schema_error("expected a scalar value", path)


def _check_keys(entry: dict, allowed: set[str], path: str) -> None:
    for key in entry:
        if not isinstance(key, str) or key not in allowed:
            raise _schema_error(f"unknown key {key!r}", path)


def _named_entries(node, kind: str, path: str) -> list[tuple[str, dict]]:
    entries = []
    seen: set[str] = set()
    for i, item in enumerate(_require_list(node, path)):
        entry = _require_mapping(item, f"{path}[{i}]")
        name = _require_str(entry.get("name"), f"{path}[{i}].name")
        if not name:
            raise _schema_error("name must not be empty", f"{path}[{i}].name")
        if name in seen:
            raise ParseError(
                "DUPLICATE_NAME", f"duplicate {kind} name {name!r}", path=f"{path}[{i}]"
            )
        seen.add(name)
        entries.append((name, entry))
    return entries


def _scalar_map(node, path: str) -> dict:
    if node is None:
        return {}
    mapping = _require_mapping(node, path)
    out = {}
    for key, value in mapping.items():
        if not isinstance(key, str):
            raise _schema_error("keys must be strings", path)
        out[key] = _require_scalar(value, f"{path}.{key}")
    return out


def _number_map(node, path: str) -> dict:
    out = _scalar_map(node, path)
    for key, value in out.items():
        _require_number(value, f"{path}.{key}")
    return out


def load_pricing_file(path: str) -> Pricing:
    """parse_pricing over a file path. OSError passes through."""
    with open(path, encoding="utf-8") as fh:
        return parse_pricing(fh.read())


def parse_pricing(text: str) -> Pricing:
    """Parse a YAML or JSON pricing document.

    Raises ParseError for unparsable input, schema problems and
    duplicate names. Expressions are pre-parsed; text that fails to
    parse is kept verbatim with expression_ast=None so validation can
    report it rather than losing the document.
    """
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        line = column = None
        mark = getattr(exc, "problem_mark", None)
        if mark is not None:
            line = mark.line + 1
            column = mark.column + 1
        raise ParseError("SYNTAX", str(exc).replace("\n", " "), line=line, column=column) from None
    root = _require_mapping(data, "$")
    _check_keys(root, _TOP_KEYS, "$")
    for required in ("name", "version", "currency", "features", "plans"):
        if required not in root:
            raise _schema_error(f"missing required key {required!r}", "$")
    name = _require_str(root["name"], "name")
    version = root["version"]
    if isinstance(version, bool) or not isinstance(version, int):
        raise _schema_error("version must be an integer", "version")
    if version < 1:
        raise _schema_error("version must be >= 1", "version")
    currency = _require_str(root["currency"], "currency")
    if not _CURRENCY.match(currency):
        raise _schema_error("currency must be a 3-letter uppercase code", "currency")

    limits = []
    for lname, entry in _named_entries(root.get("usageLimits"), "usage limit", "usageLimits"):
        path = f"usageLimits.{lname}"
        _check_keys(entry, _LIMIT_KEYS, path)
        scope_text = entry.get("scope", "SUBSCRIPTION")
        period_text = entry.get("period", "LIFETIME")
        try:
            scope = LimitScope(_require_str(scope_text, f"{path}.scope"))
        except ValueError:
            raise _schema_error("scope must be SUBSCRIPTION or ENTITY", f"{path}.scope") from None
        try:
            period = LimitPeriod(_require_str(period_text, f"{path}.period"))
        except ValueError:
            raise _schema_error(
                "period must be LIFETIME or BILLING_PERIOD", f"{path}.period"
            ) from None
        context_key = entry.get("contextKey")
        if context_key is not None:
            context_key = _require_str(context_key, f"{path}.contextKey")
        limits.append(
            UsageLimit(
                name=lname,
                unit=_require_str(entry.get("unit", ""), f"{path}.unit"),
                default_value=_require_number(entry.get("defaultValue"), f"{path}.defaultValue"),
                scope=scope,
                period=period,
                context_key=context_key,
            )
        )

    features = []
    for fname, entry in _named_entries(root.get("features"), "feature", "features"):
        path = f"features.{fname}"
        _check_keys(entry, _FEATURE_KEYS, path)
        try:
            value_type = ValueType(_require_str(entry.get("valueType", "BOOLEAN"), f"{path}.valueType"))
        except ValueError:
            raise _schema_error(
                "valueType must be BOOLEAN, NUMERIC or TEXT", f"{path}.valueType"
            ) from None
        default = _require_scalar(entry.get("defaultValue"), f"{path}.defaultValue")
        if default is None:
            default = {ValueType.BOOLEAN: False, ValueType.NUMERIC: 0, ValueType.TEXT: ""}[value_type]
        expression = entry.get("expression")
        expression_ast: Expr | None = None
        if expression is not None:
            expression = _require_str(expression, f"{path}.expression")
            try:
                expression_ast = parse_expression(expression)
            except ExpressionError:
                expression_ast = None
        attached = _require_list(entry.get("attachedLimits"), f"{path}.attachedLimits")
        attached_names = tuple(
            _require_str(item, f"{path}.attachedLimits[{i}]") for i, item in enumerate(attached)
        )
        features.append(
            Feature(
                name=fname,
                description=_require_str(entry.get("description", ""), f"{path}.description"),
                value_type=value_type,
                default_value=default,
                expression=expression,
                attached_limits=attached_names,
                expression_ast=expression_ast,
            )
        )

    plans = []
    for pname, entry in _named_entries(root.get("plans"), "plan", "plans"):
        path = f"plans.{pname}"
        _check_keys(entry, _PLAN_KEYS, path)
        plans.append(
            Plan(
                name=pname,
                monthly_price=_require_number(entry.get("monthlyPrice", 0), f"{path}.monthlyPrice"),
                feature_values=_scalar_map(entry.get("featureValues"), f"{path}.featureValues"),
                limit_values=_number_map(entry.get("limitValues"), f"{path}.limitValues"),
            )
        )

    add_ons = []
    for aname, entry in _named_entries(root.get("addOns"), "add-on", "addOns"):
        path = f"addOns.{aname}"
        _check_keys(entry, _ADDON_KEYS, path)
        depends = _require_list(entry.get("dependsOnPlans"), f"{path}.dependsOnPlans")
        add_ons.append(
            AddOn(
                name=aname,
                monthly_price=_require_number(entry.get("monthlyPrice", 0), f"{path}.monthlyPrice"),
                feature_values=_scalar_map(entry.get("featureValues"), f"{path}.featureValues"),
                limit_deltas=_number_map(entry.get("limitDeltas"), f"{path}.limitDeltas"),
                depends_on_plans=tuple(
                    _require_str(item, f"{path}.dependsOnPlans[{i}]")
                    for i, item in enumerate(depends)
                ),
            )
        )

    return Pricing(
        name=name,
        version=version,
        currency=currency,
        features=tuple(features),
        plans=tuple(plans),
        add_ons=tuple(add_ons),
        usage_limits=tuple(limits),
    )


def _expression_violations(pricing: Pricing, feature: Feature) -> list[Violation]:
    path = f"features.{feature.name}.expression"
    if feature.expression_ast is None:
        assert feature.expression is not None
        try:
            parse_expression(feature.expression)
            message = "expression failed to parse"
        except ExpressionError as exc:
            message = str(exc)
        return [Violation("ExpressionSyntax", path, message)]
    out = []
    plan_symbols = pricing.plan_symbols()
    for dotted in sorted(collect_identifiers(feature.expression_ast)):
        segments = dotted.split(".")
        ns = segments[0]
        if ns not in NAMESPACES:
            out.append(
                Violation(
                    "UnknownSymbol",
                    path,
                    f"{dotted}: first segment must be one of {', '.join(NAMESPACES)}",
                )
            )
        elif ns == "plan":
            if len(segments) != 2 or segments[1] not in plan_symbols:
                out.append(
                    Violation(
                        "UnknownSymbol", path, f"{dotted}: no feature or limit has this symbol"
                    )
                )
        elif ns == "subscription":
            if len(segments) != 2 or segments[1] not in SUBSCRIPTION_BINDINGS:
                out.append(
                    Violation(
                        "UnknownSymbol",
                        path,
                        f"{dotted}: subscription exposes {', '.join(SUBSCRIPTION_BINDINGS)}",
                    )
                )
        elif ns == "feature":
            if len(segments) != 2 or segments[1] not in FEATURE_BINDINGS:
                out.append(
                    Violation(
                        "UnknownSymbol",
                        path,
                        f"{dotted}: feature exposes {', '.join(FEATURE_BINDINGS)}",
                    )
                )
        # context.* is caller-supplied and free-form.
    return out


def validate_pricing(pricing: Pricing) -> list[Violation]:
    """Return every violation in the document; empty means valid.

    Checks dangling references, value type conformance, unparsable
    expressions, undeclared expression symbols, negative limits and
    prices, duplicate names and symbol collisions, and that at least
    one plan exists.
    """
    out: list[Violation] = []

    if not pricing.plans:
        out.append(Violation("NoPlans", "plans", "a pricing must declare at least one plan"))

    for kind, items in (
        ("feature", [f.name for f in pricing.features]),
        ("plan", [p.name for p in pricing.plans]),
        ("add-on", [a.name for a in pricing.add_ons]),
        ("usage limit", [l.name for l in pricing.usage_limits]),
    ):
        seen: set[str] = set()
        for name in items:
            if name in seen:
                out.append(
                    Violation("DuplicateName", f"{kind}:{name}", f"duplicate {kind} name {name!r}")
                )
            seen.add(name)

    # Distinct declared names of the same kind must not collide on
    # their expression symbol; silent shadowing would be unreadable.
    for kind, items in (
        ("features", pricing.features),
        ("usageLimits", pricing.usage_limits),
    ):
        symbols: dict[str, str] = {}
        for item in items:
            sym = symbol_name(item.name)
            if sym in symbols and symbols[sym] != item.name:
                out.append(
                    Violation(
                        "DuplicateSymbol",
                        f"{kind}.{item.name}",
                        f"symbol {sym!r} already taken by {symbols[sym]!r}",
                    )
                )
            symbols.setdefault(sym, item.name)

    for limit in pricing.usage_limits:
        if limit.default_value < 0:
            out.append(
                Violation(
                    "NegativeLimit",
                    f"usageLimits.{limit.name}.defaultValue",
                    f"limit values must be >= 0, got {limit.default_value}",
                )
            )

    for feature in pricing.features:
        path = f"features.{feature.name}"
        if not value_conforms(feature.default_value, feature.value_type):
            out.append(
                Violation(
                    "TypeMismatch",
                    f"{path}.defaultValue",
                    f"default value {feature.default_value!r} does not conform to {feature.value_type.value}",
                )
            )
        for i, lname in enumerate(feature.attached_limits):
            if pricing.find_limit(lname) is None:
                out.append(
                    Violation(
                        "DanglingReference",
                        f"{path}.attachedLimits[{i}]",
                        f"usage limit {lname!r} is not declared",
                    )
                )
        if feature.expression is not None:
            out.extend(_expression_violations(pricing, feature))

    def check_feature_values(values: dict, path: str) -> None:
        for fname, value in values.items():
            feature = pricing.find_feature(fname)
            if feature is None:
                out.append(
                    Violation(
                        "DanglingReference", f"{path}.{fname}", f"feature {fname!r} is not declared"
                    )
                )
            elif not value_conforms(value, feature.value_type):
                out.append(
                    Violation(
                        "TypeMismatch",
                        f"{path}.{fname}",
                        f"value {value!r} does not conform to {feature.value_type.value}",
                    )
                )

    def check_limit_values(values: dict, path: str, allow_negative: bool) -> None:
        for lname, value in values.items():
            if pricing.find_limit(lname) is None:
                out.append(
                    Violation(
                        "DanglingReference",
                        f"{path}.{lname}",
                        f"usage limit {lname!r} is not declared",
                    )
                )
            elif not allow_negative and value < 0:
                out.append(
                    Violation(
                        "NegativeLimit", f"{path}.{lname}", f"limit values must be >= 0, got {value}"
                    )
                )

    for plan in pricing.plans:
        path = f"plans.{plan.name}"
        if plan.monthly_price < 0:
            out.append(
                Violation(
                    "NegativePrice",
                    f"{path}.monthlyPrice",
                    f"monthly price must be >= 0, got {plan.monthly_price}",
                )
            )
        check_feature_values(plan.feature_values, f"{path}.featureValues")
        check_limit_values(plan.limit_values, f"{path}.limitValues", allow_negative=False)

    for add_on in pricing.add_ons:
        path = f"addOns.{add_on.name}"
        if add_on.monthly_price < 0:
            out.append(
                Violation(
                    "NegativePrice",
                    f"{path}.monthlyPrice",
                    f"monthly price must be >= 0, got {add_on.monthly_price}",
                )
            )
        check_feature_values(add_on.feature_values, f"{path}.featureValues")
        # Deltas may be negative; the resolver floors effective values at 0.
        check_limit_values(add_on.limit_deltas, f"{path}.limitDeltas", allow_negative=True)
        for i, pname in enumerate(add_on.depends_on_plans):
            if pricing.find_plan(pname) is None:
                out.append(
                    Violation(
                        "DanglingReference",
                        f"{path}.dependsOnPlans[{i}]",
                        f"plan {pname!r} is not declared",
                    )
                )

    return out


def to_document(pricing: Pricing) -> dict:
    """Render a Pricing back into the plain document structure.

    Optional keys holding their defaults are omitted, so a parse ->
    serialize -> parse round trip yields a structurally equal Pricing.
    """
    doc: dict = {
        "name": pricing.name,
        "version": pricing.version,
        "currency": pricing.currency,
    }
    if pricing.usage_limits:
        doc["usageLimits"] = []
        for limit in pricing.usage_limits:
            entry: dict = {
                "name": limit.name,
                "unit": limit.unit,
                "defaultValue": limit.default_value,
                "scope": limit.scope.value,
                "period": limit.period.value,
            }
            if limit.context_key is not None:
                entry["contextKey"] = limit.context_key
            doc["usageLimits"].append(entry)
    doc["features"] = []
    for feature in pricing.features:
        entry = {"name": feature.name}
        if feature.description:
            entry["description"] = feature.description
        entry["valueType"] = feature.value_type.value
        entry["defaultValue"] = feature.default_value
        if feature.expression is not None:
            entry["expression"] = feature.expression
        if feature.attached_limits:
            entry["attachedLimits"] = list(feature.attached_limits)
        doc["features"].append(entry)
    doc["plans"] = []
    for plan in pricing.plans:
        entry = {"name": plan.name, "monthlyPrice": plan.monthly_price}
        if plan.feature_values:
            entry["featureValues"] = dict(plan.feature_values)
        if plan.limit_values:
            entry["limitValues"] = dict(plan.limit_values)
        doc["plans"].append(entry)
    if pricing.add_ons:
        doc["addOns"] = []
        for add_on in pricing.add_ons:
            entry = {"name": add_on.name, "monthlyPrice": add_on.monthly_price}
            if add_on.feature_values:
                entry["featureValues"] = dict(add_on.feature_values)
            if add_on.limit_deltas:
                entry["limitDeltas"] = dict(add_on.limit_deltas)
            if add_on.depends_on_plans:
                entry["dependsOnPlans"] = list(add_on.depends_on_plans)
            doc["addOns"].append(entry)
    return doc


def serialize_pricing(pricing: Pricing) -> str:
    """Serialize to YAML. parse_pricing(serialize_pricing(p)) == p."""
    return yaml.safe_dump(to_document(pricing), sort_keys=False, allow_unicode=True)
