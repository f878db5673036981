"""Semantic diff between two pricing documents.

Declarations are matched by name, never by position, so reordering
produces no changes. Plan-level feature and limit entries are compared
by their effective value (explicit entry or declaration default), which
keeps the change set minimal: moving a value from an explicit entry to
an equal default is not a change.

Impact classes:

- SAFE: nobody loses anything (additions, raised limits, price edits).
- DEGRADES_EXISTING: an existing subscriber can end up with less
  (lowered limits, disabled features, narrowed add-on availability,
  newly attached limits or expression gates).
- NEEDS_MIGRATION: stored subscriptions or integrations may reference
  something that no longer means the same thing (removals, value type
  changes, scope/period/context key changes, rewritten expressions).
"""

from __future__ import annotations

from dataclasses import dataclass

from pricegate.model import Feature, Pricing, ValueType

KIND_FEATURE_ADDED = "FeatureAdded"
KIND_FEATURE_REMOVED = "FeatureRemoved"
KIND_FEATURE_MODIFIED = "FeatureModified"
KIND_PLAN_ADDED = "PlanAdded"
KIND_PLAN_REMOVED = "PlanRemoved"
KIND_PLAN_PRICE_CHANGED = "PlanPriceChanged"
KIND_ADDON_ADDED = "AddOnAdded"
KIND_ADDON_REMOVED = "AddOnRemoved"
KIND_ADDON_MODIFIED = "AddOnModified"
KIND_LIMIT_ADDED = "LimitAdded"
KIND_LIMIT_REMOVED = "LimitRemoved"
KIND_LIMIT_MODIFIED = "LimitModified"
KIND_LIMIT_VALUE_CHANGED = "LimitValueChanged"
KIND_EXPRESSION_CHANGED = "ExpressionChanged"

IMPACT_SAFE = "SAFE"
IMPACT_DEGRADES = "DEGRADES_EXISTING"
IMPACT_MIGRATION = "NEEDS_MIGRATION"


@dataclass(frozen=True)
class Change:
    kind: str
    path: str
    old_value: object
    new_value: object
    impact: str


class ChangeSet:
    """An ordered list of changes with impact summaries."""

    def __init__(self, changes: list[Change]) -> None:
        self.changes = tuple(changes)

    def __len__(self) -> int:
        return len(self.changes)

    def __iter__(self):
        return iter(self.changes)

    def __bool__(self) -> bool:
        return bool(self.changes)

    def degrades_existing(self) -> bool:
        return any(c.impact == IMPACT_DEGRADES for c in self.changes)

    def needs_migration(self) -> bool:
        return any(c.impact == IMPACT_MIGRATION for c in self.changes)

    def of_kind(self, kind: str) -> list[Change]:
        return [c for c in self.changes if c.kind == kind]


def _numeric_impact(old, new) -> str:
    return IMPACT_DEGRADES if new < old else IMPACT_SAFE


def _feature_value_impact(feature: Feature, old, new) -> str:
    if feature.value_type is ValueType.BOOLEAN:
        return IMPACT_DEGRADES if (old is True and new is not True) else IMPACT_SAFE
    if feature.value_type is ValueType.NUMERIC:
        return _numeric_impact(old, new)
    return IMPACT_SAFE


def _diff_feature_declarations(old: Pricing, new: Pricing, out: list[Change]) -> None:
    old_names = {f.name for f in old.features}
    new_names = {f.name for f in new.features}
    for name in sorted(new_names - old_names):
        out.append(Change(KIND_FEATURE_ADDED, f"features.{name}", None, name, IMPACT_SAFE))
    for name in sorted(old_names - new_names):
        out.append(Change(KIND_FEATURE_REMOVED, f"features.{name}", name, None, IMPACT_MIGRATION))
    for name in sorted(old_names & new_names):
        before = old.find_feature(name)
        after = new.find_feature(name)
        path = f"features.{name}"
        if before.value_type is not after.value_type:
            out.append(
                Change(
                    KIND_FEATURE_MODIFIED,
                    f"{path}.valueType",
                    before.value_type.value,
                    after.value_type.value,
                    IMPACT_MIGRATION,
                )
            )
            # Remaining fields are incomparable across a type change.
            continue
        if before.description != after.description:
            out.append(
                Change(
                    KIND_FEATURE_MODIFIED,
                    f"{path}.description",
                    before.description,
                    after.description,
                    IMPACT_SAFE,
                )
            )
        if before.default_value != after.default_value:
            # Per-plan effective diffs carry the subscriber impact.
            out.append(
                Change(
                    KIND_FEATURE_MODIFIED,
                    f"{path}.defaultValue",
                    before.default_value,
                    after.default_value,
                    IMPACT_SAFE,
                )
            )
        if set(before.attached_limits) != set(after.attached_limits):
            gained = set(after.attached_limits) - set(before.attached_limits)
            out.append(
                Change(
                    KIND_FEATURE_MODIFIED,
                    f"{path}.attachedLimits",
                    sorted(before.attached_limits),
                    sorted(after.attached_limits),
                    IMPACT_DEGRADES if gained else IMPACT_SAFE,
                )
            )
        if not _expressions_equal(before, after):
            if before.expression is None:
                impact = IMPACT_DEGRADES  # a new gate can only restrict
            elif after.expression is None:
                impact = IMPACT_SAFE
            else:
                impact = IMPACT_MIGRATION
            out.append(
                Change(
                    KIND_EXPRESSION_CHANGED,
                    f"{path}.expression",
                    before.expression,
                    after.expression,
                    impact,
                )
            )


def _expressions_equal(before: Feature, after: Feature) -> bool:
    if (before.expression is None) != (after.expression is None):
        return False
    if before.expression is None:
        return True
    # Compare parsed structure so whitespace edits are not changes.
    # Unparsable expressions fall back to text comparison.
    if before.expression_ast is not None and after.expression_ast is not None:
        return before.expression_ast == after.expression_ast
    return before.expression == after.expression


def _diff_plans(old: Pricing, new: Pricing, out: list[Change]) -> None:
    old_names = {p.name for p in old.plans}
    new_names = {p.name for p in new.plans}
    for name in sorted(new_names - old_names):
        out.append(Change(KIND_PLAN_ADDED, f"plans.{name}", None, name, IMPACT_SAFE))
    for name in sorted(old_names - new_names):
        out.append(Change(KIND_PLAN_REMOVED, f"plans.{name}", name, None, IMPACT_MIGRATION))
    shared_features = sorted(
        {f.name for f in old.features} & {f.name for f in new.features}
    )
    shared_limits = sorted(
        {l.name for l in old.usage_limits} & {l.name for l in new.usage_limits}
    )
    for name in sorted(old_names & new_names):
        before = old.find_plan(name)
        after = new.find_plan(name)
        path = f"plans.{name}"
        if before.monthly_price != after.monthly_price:
            out.append(
                Change(
                    KIND_PLAN_PRICE_CHANGED,
                    f"{path}.monthlyPrice",
                    before.monthly_price,
                    after.monthly_price,
                    IMPACT_SAFE,
                )
            )
        for fname in shared_features:
            old_feature = old.find_feature(fname)
            new_feature = new.find_feature(fname)
            if old_feature.value_type is not new_feature.value_type:
                continue  # reported as a declaration change
            old_value = before.feature_values.get(fname, old_feature.default_value)
            new_value = after.feature_values.get(fname, new_feature.default_value)
            if old_value != new_value:
                out.append(
                    Change(
                        KIND_FEATURE_MODIFIED,
                        f"{path}.featureValues.{fname}",
                        old_value,
                        new_value,
                        _feature_value_impact(new_feature, old_value, new_value),
                    )
                )
        for lname in shared_limits:
            old_value = before.limit_values.get(lname, old.find_limit(lname).default_value)
            new_value = after.limit_values.get(lname, new.find_limit(lname).default_value)
            if old_value != new_value:
                out.append(
                    Change(
                        KIND_LIMIT_VALUE_CHANGED,
                        f"{path}.limitValues.{lname}",
                        old_value,
                        new_value,
                        _numeric_impact(old_value, new_value),
                    )
                )


def _diff_add_ons(old: Pricing, new: Pricing, out: list[Change]) -> None:
    old_names = {a.name for a in old.add_ons}
    new_names = {a.name for a in new.add_ons}
    for name in sorted(new_names - old_names):
        out.append(Change(KIND_ADDON_ADDED, f"addOns.{name}", None, name, IMPACT_SAFE))
    for name in sorted(old_names - new_names):
        out.append(Change(KIND_ADDON_REMOVED, f"addOns.{name}", name, None, IMPACT_MIGRATION))
    shared_limits = sorted(
        {l.name for l in old.usage_limits} & {l.name for l in new.usage_limits}
    )
    for name in sorted(old_names & new_names):
        before = old.find_add_on(name)
        after = new.find_add_on(name)
        path = f"addOns.{name}"
        if before.monthly_price != after.monthly_price:
            out.append(
                Change(
                    KIND_ADDON_MODIFIED,
                    f"{path}.monthlyPrice",
                    before.monthly_price,
                    after.monthly_price,
                    IMPACT_SAFE,
                )
            )
        if before.feature_values != after.feature_values:
            lost = {
                fname
                for fname, value in before.feature_values.items()
                if value is True and after.feature_values.get(fname) is not True
            }
            out.append(
                Change(
                    KIND_ADDON_MODIFIED,
                    f"{path}.featureValues",
                    dict(before.feature_values),
                    dict(after.feature_values),
                    IMPACT_DEGRADES if lost else IMPACT_SAFE,
                )
            )
        for lname in shared_limits:
            old_delta = before.limit_deltas.get(lname, 0)
            new_delta = after.limit_deltas.get(lname, 0)
            if old_delta != new_delta:
                out.append(
                    Change(
                        KIND_LIMIT_VALUE_CHANGED,
                        f"{path}.limitDeltas.{lname}",
                        old_delta,
                        new_delta,
                        _numeric_impact(old_delta, new_delta),
                    )
                )
        if set(before.depends_on_plans) != set(after.depends_on_plans):
            narrowed = bool(after.depends_on_plans) and (
                not before.depends_on_plans
                or bool(set(before.depends_on_plans) - set(after.depends_on_plans))
            )
            out.append(
                Change(
                    KIND_ADDON_MODIFIED,
                    f"{path}.dependsOnPlans",
                    sorted(before.depends_on_plans),
                    sorted(after.depends_on_plans),
                    IMPACT_DEGRADES if narrowed else IMPACT_SAFE,
                )
            )


def _diff_limits(old: Pricing, new: Pricing, out: list[Change]) -> None:
    old_names = {l.name for l in old.usage_limits}
    new_names = {l.name for l in new.usage_limits}
    for name in sorted(new_names - old_names):
        out.append(Change(KIND_LIMIT_ADDED, f"usageLimits.{name}", None, name, IMPACT_SAFE))
    for name in sorted(old_names - new_names):
        out.append(Change(KIND_LIMIT_REMOVED, f"usageLimits.{name}", name, None, IMPACT_MIGRATION))
    for name in sorted(old_names & new_names):
        before = old.find_limit(name)
        after = new.find_limit(name)
        path = f"usageLimits.{name}"
        if before.default_value != after.default_value:
            out.append(
                Change(
                    KIND_LIMIT_VALUE_CHANGED,
                    f"{path}.defaultValue",
                    before.default_value,
                    after.default_value,
                    _numeric_impact(before.default_value, after.default_value),
                )
            )
        if before.unit != after.unit:
            out.append(
                Change(KIND_LIMIT_MODIFIED, f"{path}.unit", before.unit, after.unit, IMPACT_SAFE)
            )
        for field_name, old_v, new_v in (
            ("scope", before.scope.value, after.scope.value),
            ("period", before.period.value, after.period.value),
            ("contextKey", before.effective_context_key, after.effective_context_key),
        ):
            if old_v != new_v:
                out.append(
                    Change(
                        KIND_LIMIT_MODIFIED, f"{path}.{field_name}", old_v, new_v, IMPACT_MIGRATION
                    )
                )


def diff_pricing(old: Pricing, new: Pricing) -> ChangeSet:
    """Compute the minimal change set from old to new.

    diff_pricing(p, p) is empty; the version, name and currency header
    fields are metadata and never produce changes.
    """
    out: list[Change] = []
    _diff_feature_declarations(old, new, out)
    _diff_plans(old, new, out)
    _diff_add_ons(old, new, out)
    _diff_limits(old, new, out)
    return ChangeSet(out)
