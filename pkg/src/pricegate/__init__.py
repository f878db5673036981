"""pricegate: pricing-driven feature entitlements.

The pricing document is the single source of truth: plans, add-ons,
usage limits and feature availability expressions all live there.
A ToggleRouter turns one document plus one subscription plus one
context fetch into a status for every declared feature; UsageTracker
meters consumption against the effective limits; issue_token signs the
result so a frontend can gate its UI without calling back per toggle.
"""

from pricegate.diffing import Change, ChangeSet, diff_pricing
from pricegate.documents import (
    load_pricing_file,
    parse_pricing,
    serialize_pricing,
    to_document,
    validate_pricing,
)
from pricegate.entitlements import resolve_entitlements
from pricegate.errors import (
    AddOnNotAvailableForPlan,
    EntityKeyRequired,
    ParseError,
    PricegateError,
    StoreUnavailable,
    SwapError,
    UnknownAddOn,
    UnknownFeature,
    UnknownLimit,
    UnknownPlan,
    Violation,
    WeakKey,
)
from pricegate.model import (
    AddOn,
    Entitlement,
    EntitlementSet,
    Feature,
    LimitPeriod,
    LimitScope,
    Plan,
    Pricing,
    Subscription,
    UsageLimit,
    ValueType,
    symbol_name,
)
from pricegate.router import (
    EvaluationResult,
    FeatureStatus,
    LimitStatus,
    PricingSnapshot,
    ToggleRouter,
)
from pricegate.store import FileStore, MemoryStore
from pricegate.token import TokenVerdict, issue_token, verify_token
from pricegate.usage import ConsumeResult, UsageTracker, required_context_paths

__version__ = "0.1.0"

__all__ = [
    "AddOn",
    "AddOnNotAvailableForPlan",
    "Change",
    "ChangeSet",
    "ConsumeResult",
    "Entitlement",
    "EntitlementSet",
    "EntityKeyRequired",
    "EvaluationResult",
    "Feature",
    "FeatureStatus",
    "FileStore",
    "LimitPeriod",
    "LimitScope",
    "LimitStatus",
    "MemoryStore",
    "ParseError",
    "Plan",
    "Pricing",
    "PricingSnapshot",
    "PricegateError",
    "StoreUnavailable",
    "Subscription",
    "SwapError",
    "ToggleRouter",
    "TokenVerdict",
    "UnknownAddOn",
    "UnknownFeature",
    "UnknownLimit",
    "UnknownPlan",
    "UsageLimit",
    "UsageTracker",
    "ValueType",
    "Violation",
    "WeakKey",
    "__version__",
    "diff_pricing",
    "issue_token",
    "load_pricing_file",
    "parse_pricing",
    "required_context_paths",
    "resolve_entitlements",
    "serialize_pricing",
    "symbol_name",
    "to_document",
    "validate_pricing",
    "verify_token",
]
