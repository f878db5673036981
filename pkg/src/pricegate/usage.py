"""Usage metering against the active pricing's limits.

UsageTracker joins three things: a state store (the counters), the
router's current snapshot (which limits exist, their effective values
per subscription) and the expression context (counters flattened to
context.* scalars).

Entity-scoped limits ("max visits" per pet) are enforced per entity key
in try_consume. For subscription-level evaluation their counters are
flattened conservatively: the context carries the maximum across the
subscriber's entities, so a toggle gating on the limit switches off as
soon as any one entity is exhausted rather than pretending headroom.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime
from typing import Callable

from pricegate.entitlements import resolve_entitlements
from pricegate.errors import EntityKeyRequired, UnknownLimit
from pricegate.expr.ast import collect_identifiers
from pricegate.model import LimitPeriod, LimitScope, Pricing, Subscription, utcnow
from pricegate.router import PricingSnapshot


@dataclass(frozen=True)
class ConsumeResult:
    granted: bool
    used: float
    max: float
    limit_name: str
    entity_key: str | None = None


def required_context_paths(pricing: Pricing) -> set[str]:
    """Every context.* path referenced by any feature expression."""
    needed: set[str] = set()
    for feature in pricing.features:
        if feature.expression_ast is None:
            continue
        for dotted in collect_identifiers(feature.expression_ast):
            if dotted.split(".", 1)[0] == "context":
                needed.add(dotted)
    return needed


class UsageTracker:
    """Counter operations plus the context provider for a router.

    snapshot_provider is typically router.current_snapshot so that
    consumption checks always use the live pricing, including after a
    hot swap.
    """

    def __init__(
        self, store, snapshot_provider: Callable[[], PricingSnapshot]
    ) -> None:
        self._store = store
        self._snapshots = snapshot_provider

    def get_context(self, subscription: Subscription) -> dict:
        """Build the context.* value map for one subscription.

        Performs exactly one store round trip and returns every usage
        counter the active pricing declares, flattened to scalars under
        each limit's context key. Counters with no recorded usage read
        as 0.
        """
        pricing = self._snapshots().pricing
        counters = self._store.counters_for(subscription.subscriber_id)
        context: dict = {}
        for limit in pricing.usage_limits:
            key = f"context.{limit.effective_context_key}"
            if limit.scope is LimitScope.SUBSCRIPTION:
                rec = counters.get((limit.name, None))
                context[key] = rec.used if rec is not None else 0
            else:
                entity_usage = [
                    rec.used
                    for (lname, entity), rec in counters.items()
                    if lname == limit.name and entity is not None
                ]
                context[key] = max(entity_usage) if entity_usage else 0
        return context

    def try_consume(
        self,
        subscription: Subscription,
        limit_name: str,
        amount: float = 1,
        entity_key: str | None = None,
    ) -> ConsumeResult:
        """Atomically reserve amount against the effective limit value.

        The store performs a compare-and-add under its lock, so the
        counter can never exceed the limit through this method: of two
        racers at max-1 exactly one is granted.
        """
        if amount <= 0:
            raise ValueError(f"amount must be positive, got {amount}")
        pricing = self._snapshots().pricing
        limit = pricing.find_limit(limit_name)
        if limit is None:
            raise UnknownLimit(limit_name)
        if limit.scope is LimitScope.ENTITY:
            if entity_key is None:
                raise EntityKeyRequired(limit_name)
        else:
            entity_key = None
        entitlements = resolve_entitlements(
            pricing, subscription.plan_name, subscription.add_on_names
        )
        max_value = entitlements.limits[limit_name].value
        granted, used = self._store.compare_and_add(
            subscription.subscriber_id, limit_name, entity_key, amount, max_value
        )
        return ConsumeResult(
            granted=granted,
            used=used,
            max=max_value,
            limit_name=limit_name,
            entity_key=entity_key,
        )

    def release_usage(
        self,
        subscription: Subscription,
        limit_name: str,
        amount: float = 1,
        entity_key: str | None = None,
    ) -> float:
        """Return usage (e.g. a deleted pet); counters floor at 0."""
        if amount <= 0:
            raise ValueError(f"amount must be positive, got {amount}")
        pricing = self._snapshots().pricing
        limit = pricing.find_limit(limit_name)
        if limit is None:
            raise UnknownLimit(limit_name)
        if limit.scope is LimitScope.ENTITY:
            if entity_key is None:
                raise EntityKeyRequired(limit_name)
        else:
            entity_key = None
        return self._store.release(
            subscription.subscriber_id, limit_name, entity_key, amount
        )

    def reset_period(
        self, subscription: Subscription, now: datetime | None = None
    ) -> int:
        """Zero all BILLING_PERIOD counters of the subscriber; lifetime
        counters are untouched. Returns the number of counters reset;
        a second call within the period resets the same (already zero)
        counters and reports the same count."""
        pricing = self._snapshots().pricing
        period_limits = [
            limit.name
            for limit in pricing.usage_limits
            if limit.period is LimitPeriod.BILLING_PERIOD
        ]
        return self._store.reset_period(
            subscription.subscriber_id, period_limits, now or utcnow()
        )
