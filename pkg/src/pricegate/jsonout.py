"""JSON projections shared by the CLI and the HTTP service.

Both surfaces must render identical structures for the same inputs, so
every response body shape lives here and nowhere else. Timestamps are
suppressed unless explicitly requested to keep CLI output stable
across runs.
"""

from __future__ import annotations

from datetime import timezone

from pricegate.diffing import Change, ChangeSet
from pricegate.errors import Violation
from pricegate.model import Subscription
from pricegate.router import EvaluationResult, FeatureStatus
from pricegate.usage import ConsumeResult


def violation_to_dict(violation: Violation) -> dict:
    return {
        "kind": violation.kind,
        "path": violation.path,
        "message": violation.message,
    }


def change_to_dict(change: Change) -> dict:
    return {
        "kind": change.kind,
        "path": change.path,
        "old": change.old_value,
        "new": change.new_value,
        "impact": change.impact,
    }


def changeset_to_list(changes: ChangeSet) -> list[dict]:
    return [change_to_dict(c) for c in changes]


def feature_status_to_dict(status: FeatureStatus) -> dict:
    out: dict = {
        "enabled": status.enabled,
        "value": status.value,
        "reason": status.reason,
    }
    if status.detail is not None:
        out["detail"] = status.detail
    if status.limit is not None:
        out["limit"] = {
            "limitName": status.limit.limit_name,
            "used": status.limit.used,
            "max": status.limit.max,
            "remaining": status.limit.remaining,
        }
    return out


def evaluation_result_to_dict(
    result: EvaluationResult, include_timestamps: bool = False
) -> dict:
    out: dict = {
        "subscriberId": result.subscriber_id,
        "pricingVersion": result.pricing_version,
        "statuses": {
            name: feature_status_to_dict(status)
            for name, status in sorted(result.statuses.items())
        },
        "diagnostics": list(result.diagnostics),
    }
    if include_timestamps:
        out["evaluatedAt"] = result.evaluated_at.astimezone(timezone.utc).isoformat()
    return out


def consume_result_to_dict(result: ConsumeResult) -> dict:
    out: dict = {
        "granted": result.granted,
        "used": result.used,
        "max": result.max,
        "limitName": result.limit_name,
    }
    if result.entity_key is not None:
        out["entityKey"] = result.entity_key
    return out


def subscription_to_dict(
    subscription: Subscription, include_timestamps: bool = False
) -> dict:
    out: dict = {
        "subscriberId": subscription.subscriber_id,
        "plan": subscription.plan_name,
        "addOns": sorted(subscription.add_on_names),
    }
    if include_timestamps:
        out["startedAt"] = subscription.started_at.astimezone(timezone.utc).isoformat()
        out["periodStart"] = subscription.period_start.astimezone(
            timezone.utc
        ).isoformat()
    return out
