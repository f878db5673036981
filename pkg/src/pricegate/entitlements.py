"""Resolution of effective feature and limit values for a subscription.

Combination rules:

- BOOLEAN features: OR of the plan value (or default) and every
  attached add-on's grant. Once true, no add-on can turn it off.
- NUMERIC and TEXT features: add-on values override the plan value;
  when several add-ons set one, the lexicographically last name wins.
- Usage limits: plan value (or default) plus the sum of add-on deltas,
  floored at 0.

Add-ons are processed in sorted name order, so the result is invariant
under permutation of the requested add-on names.
"""

from __future__ import annotations

from typing import Iterable

from pricegate.errors import AddOnNotAvailableForPlan, UnknownAddOn, UnknownPlan
from pricegate.model import (
    Entitlement,
    EntitlementSet,
    Pricing,
    ValueType,
)

PROVENANCE_PLAN = "PLAN"
PROVENANCE_DEFAULT = "DEFAULT"


def _addon_provenance(name: str) -> str:
    return f"ADDON:{name}"


def resolve_entitlements(
    pricing: Pricing, plan_name: str, add_on_names: Iterable[str] = ()
) -> EntitlementSet:
    """Compute effective values for every declared feature and limit.

    Raises UnknownPlan, UnknownAddOn or AddOnNotAvailableForPlan when
    the combination is not sellable under this pricing.
    """
    plan = pricing.find_plan(plan_name)
    if plan is None:
        raise UnknownPlan(plan_name)
    add_ons = []
    for name in sorted(set(add_on_names)):
        add_on = pricing.find_add_on(name)
        if add_on is None:
            raise UnknownAddOn(name)
        if add_on.depends_on_plans and plan_name not in add_on.depends_on_plans:
            raise AddOnNotAvailableForPlan(name, plan_name)
        add_ons.append(add_on)

    features: dict = {}
    for feature in pricing.features:
        if feature.name in plan.feature_values:
            value = plan.feature_values[feature.name]
            provenance = PROVENANCE_PLAN
        else:
            value = feature.default_value
            provenance = PROVENANCE_DEFAULT
        for add_on in add_ons:
            if feature.name not in add_on.feature_values:
                continue
            granted = add_on.feature_values[feature.name]
            if feature.value_type is ValueType.BOOLEAN:
                if granted is True and value is not True:
                    value = True
                    provenance = _addon_provenance(add_on.name)
                elif granted is True and value is True:
                    # Already on; keep the earliest grantor only if the
                    # base was false. Plan-granted stays PLAN.
                    if provenance.startswith("ADDON:"):
                        provenance = _addon_provenance(add_on.name)
            else:
                value = granted
                provenance = _addon_provenance(add_on.name)
        features[feature.name] = Entitlement(value, provenance)

    limits: dict = {}
    for limit in pricing.usage_limits:
        if limit.name in plan.limit_values:
            value = plan.limit_values[limit.name]
            provenance = PROVENANCE_PLAN
        else:
            value = limit.default_value
            provenance = PROVENANCE_DEFAULT
        for add_on in add_ons:
            if limit.name in add_on.limit_deltas:
                value = value + add_on.limit_deltas[limit.name]
                provenance = _addon_provenance(add_on.name)
        if value < 0:
            value = 0
        limits[limit.name] = Entitlement(value, provenance)

    return EntitlementSet(features=features, limits=limits)
