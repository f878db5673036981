"""Pricing-driven toggle router with atomic hot-swap.

A router holds exactly one immutable PricingSnapshot at a time. Every
evaluation captures the snapshot reference once up front, so concurrent
readers see either the old or the new pricing during a swap, never a
mix. swap_pricing validates the candidate and requires a strictly
higher version before publishing; a rejected swap leaves the active
snapshot untouched.

Evaluation is fail-closed: an expression that cannot be evaluated
(unbound symbol, type mismatch, non-boolean result) disables the
feature with reason EVAL_ERROR, and one broken feature never prevents
the others from being evaluated.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from datetime import datetime
from typing import Callable, Mapping

from pricegate.documents import validate_pricing
from pricegate.entitlements import resolve_entitlements
from pricegate.errors import SwapError, UnknownFeature, UnknownPlan
from pricegate.expr.errors import EvalError
from pricegate.expr.evaluate import evaluate_expression
from pricegate.model import (
    FeatureValue,
    Pricing,
    Subscription,
    ValueType,
    symbol_name,
    utcnow,
)

REASON_EXPRESSION_TRUE = "EXPRESSION_TRUE"
REASON_EXPRESSION_FALSE = "EXPRESSION_FALSE"
REASON_PLAN_DISABLED = "PLAN_DISABLED"
REASON_LIMIT_EXHAUSTED = "LIMIT_EXHAUSTED"
REASON_EVAL_ERROR = "EVAL_ERROR"

# A context provider maps a subscription to its context.* value map in
# a single call; see pricegate.usage.UsageTracker.get_context.
ContextProvider = Callable[[Subscription], Mapping[str, FeatureValue]]


@dataclass(frozen=True)
class PricingSnapshot:
    pricing: Pricing
    version: int
    activated_at: datetime


@dataclass(frozen=True)
class LimitStatus:
    limit_name: str
    used: float
    max: float
    remaining: float


@dataclass(frozen=True)
class FeatureStatus:
    feature_name: str
    enabled: bool
    value: FeatureValue
    reason: str
    detail: str | None = None
    limit: LimitStatus | None = None


@dataclass(frozen=True)
class EvaluationResult:
    subscriber_id: str
    pricing_version: int
    evaluated_at: datetime
    statuses: dict
    diagnostics: tuple[str, ...] = ()


class ToggleRouter:
    """Evaluates every declared feature for a subscription in one pass."""

    def __init__(
        self, pricing: Pricing, context_provider: ContextProvider | None = None
    ) -> None:
        violations = validate_pricing(pricing)
        if violations:
            raise SwapError(
                "ValidationFailed",
                f"initial pricing has {len(violations)} violation(s)",
                tuple(violations),
            )
        self._context_provider = context_provider
        self._swap_lock = threading.Lock()
        self._snapshot = PricingSnapshot(pricing, pricing.version, utcnow())

    def current_snapshot(self) -> PricingSnapshot:
        return self._snapshot

    def set_context_provider(self, provider: ContextProvider | None) -> None:
        """Attach the provider after construction; a UsageTracker needs
        the router's snapshot accessor first, so the wiring is two-step."""
        self._context_provider = provider

    def swap_pricing(self, new_pricing: Pricing) -> int:
        """Atomically replace the active pricing; returns the new version.

        Raises SwapError("ValidationFailed") when the candidate is
        invalid and SwapError("StaleVersion") when its version is not
        strictly greater than the active one.
        """
        with self._swap_lock:
            violations = validate_pricing(new_pricing)
            if violations:
                raise SwapError(
                    "ValidationFailed",
                    f"candidate pricing has {len(violations)} violation(s)",
                    tuple(violations),
                )
            current = self._snapshot
            if new_pricing.version <= current.version:
                raise SwapError(
                    "StaleVersion",
                    f"candidate version {new_pricing.version} is not greater than "
                    f"active version {current.version}",
                )
            # Single reference assignment: readers that already grabbed
            # the old snapshot keep evaluating against it unharmed.
            self._snapshot = PricingSnapshot(new_pricing, new_pricing.version, utcnow())
            return new_pricing.version

    def evaluate_all(
        self,
        subscription: Subscription,
        context: Mapping[str, FeatureValue] | None = None,
        overrides: Mapping[str, FeatureValue] | None = None,
    ) -> EvaluationResult:
        """Evaluate every declared feature against one context fetch.

        When context is not supplied the configured provider is invoked
        exactly once. overrides are merged over the fetched context.
        """
        snapshot = self._snapshot
        pricing = snapshot.pricing
        if pricing.find_plan(subscription.plan_name) is None:
            raise UnknownPlan(subscription.plan_name)
        entitlements = resolve_entitlements(
            pricing, subscription.plan_name, subscription.add_on_names
        )
        if context is not None:
            ctx = dict(context)
        elif self._context_provider is not None:
            ctx = dict(self._context_provider(subscription))
        else:
            ctx = {}
        if overrides:
            ctx.update(overrides)

        bindings: dict = {}
        for feature in pricing.features:
            bindings[f"plan.{symbol_name(feature.name)}"] = entitlements.features[
                feature.name
            ].value
        for limit in pricing.usage_limits:
            # Limits shadow features on symbol collision.
            bindings[f"plan.{symbol_name(limit.name)}"] = entitlements.limits[
                limit.name
            ].value
        bindings["subscription.plan"] = subscription.plan_name
        bindings["subscription.id"] = subscription.subscriber_id
        bindings["subscription.addOnCount"] = len(subscription.add_on_names)
        bindings.update(ctx)

        statuses: dict = {}
        diagnostics: list[str] = []
        for feature in pricing.features:
            statuses[feature.name] = self._evaluate_feature(
                pricing, feature, entitlements, bindings, diagnostics
            )
        return EvaluationResult(
            subscriber_id=subscription.subscriber_id,
            pricing_version=snapshot.version,
            evaluated_at=utcnow(),
            statuses=statuses,
            diagnostics=tuple(diagnostics),
        )

    def evaluate_feature(
        self,
        subscription: Subscription,
        feature_name: str,
        context: Mapping[str, FeatureValue] | None = None,
        overrides: Mapping[str, FeatureValue] | None = None,
    ) -> FeatureStatus:
        """Status of a single feature; equal to the evaluate_all entry."""
        if self._snapshot.pricing.find_feature(feature_name) is None:
            raise UnknownFeature(feature_name)
        result = self.evaluate_all(subscription, context=context, overrides=overrides)
        return result.statuses[feature_name]

    def _evaluate_feature(
        self,
        pricing: Pricing,
        feature,
        entitlements,
        bindings: dict,
        diagnostics: list[str],
    ) -> FeatureStatus:
        value = entitlements.features[feature.name].value
        worst: LimitStatus | None = None
        exhausted = False
        for limit_name in feature.attached_limits:
            limit = pricing.find_limit(limit_name)
            max_value = entitlements.limits[limit_name].value
            used = bindings.get(f"context.{limit.effective_context_key}", 0)
            if isinstance(used, bool) or not isinstance(used, (int, float)):
                used = 0
            remaining = max(0, max_value - used)
            status = LimitStatus(limit_name, used, max_value, remaining)
            if remaining == 0:
                exhausted = True
            if worst is None or status.remaining < worst.remaining:
                worst = status
        if exhausted:
            return FeatureStatus(
                feature_name=feature.name,
                enabled=False,
                value=value,
                reason=REASON_LIMIT_EXHAUSTED,
                limit=worst,
            )
        if feature.value_type is ValueType.BOOLEAN and value is not True:
            return FeatureStatus(
                feature_name=feature.name,
                enabled=False,
                value=value,
                reason=REASON_PLAN_DISABLED,
                limit=worst,
            )
        if feature.expression_ast is not None:
            bindings["feature.name"] = feature.name
            bindings["feature.value"] = value
            bindings["feature.defaultValue"] = feature.default_value
            try:
                outcome = evaluate_expression(feature.expression_ast, bindings)
            except EvalError as exc:
                diagnostics.append(f"{feature.name}: {exc}")
                return FeatureStatus(
                    feature_name=feature.name,
                    enabled=False,
                    value=value,
                    reason=REASON_EVAL_ERROR,
                    detail=str(exc),
                    limit=worst,
                )
            if outcome is not True and outcome is not False:
                detail = "expression did not produce a boolean"
                diagnostics.append(f"{feature.name}: {detail}")
                return FeatureStatus(
                    feature_name=feature.name,
                    enabled=False,
                    value=value,
                    reason=REASON_EVAL_ERROR,
                    detail=detail,
                    limit=worst,
                )
            return FeatureStatus(
                feature_name=feature.name,
                enabled=outcome,
                value=value,
                reason=REASON_EXPRESSION_TRUE if outcome else REASON_EXPRESSION_FALSE,
                limit=worst,
            )
        # No expression: the feature is available by virtue of its
        # resolved value (non-boolean features carry their value).
        return FeatureStatus(
            feature_name=feature.name,
            enabled=True,
            value=value,
            reason=REASON_EXPRESSION_TRUE,
            limit=worst,
        )
