"""HTTP facade over the router, tracker and store.

All domain faults map to structured error bodies:

    {"code": "<MACHINE_CODE>", "message": "...", "violations": [...]?}

so that a malformed request or an unsellable combination never
surfaces as an unhandled 500. The admin surface (PUT /pricing) is
guarded by a static bearer token; everything else is tenant traffic.

POST /subscriptions/{id}/evaluate is the one-round-trip path the
frontend uses: one context fetch, one pass over all features, one
signed token in the response.
"""

from __future__ import annotations

import hmac
import uuid
from typing import Any

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from pricegate.config import ServiceConfig
from pricegate.diffing import diff_pricing
from pricegate.documents import parse_pricing, to_document, validate_pricing
from pricegate.errors import (
    AddOnNotAvailableForPlan,
    EntityKeyRequired,
    ParseError,
    StoreUnavailable,
    SwapError,
    UnknownAddOn,
    UnknownFeature,
    UnknownLimit,
    UnknownPlan,
)
from pricegate.jsonout import (
    changeset_to_list,
    consume_result_to_dict,
    evaluation_result_to_dict,
    feature_status_to_dict,
    subscription_to_dict,
    violation_to_dict,
)
from pricegate.model import Pricing, Subscription
from pricegate.router import ToggleRouter
from pricegate.store import FileStore, MemoryStore
from pricegate.token import issue_token
from pricegate.usage import UsageTracker


class ApiError(Exception):
    def __init__(
        self,
        status: int,
        code: str,
        message: str,
        violations: list | None = None,
        extra: dict | None = None,
    ) -> None:
        self.status = status
        self.code = code
        self.message = message
        self.violations = violations
        self.extra = extra or {}
        super().__init__(message)

    def body(self) -> dict:
        out: dict = {"code": self.code, "message": self.message}
        if self.violations is not None:
            out["violations"] = self.violations
        out.update(self.extra)
        return out


class CreateSubscriptionBody(BaseModel):
    plan: str
    subscriberId: str | None = None
    addOns: list[str] = Field(default_factory=list)


class UpdateSubscriptionBody(BaseModel):
    plan: str | None = None
    addOns: list[str] | None = None


class EvaluateBody(BaseModel):
    context: dict[str, bool | int | float | str] | None = None


class ConsumeBody(BaseModel):
    limit: str
    amount: float = 1
    entityKey: str | None = None


def _parse_document(text: str) -> Pricing:
    try:
        pricing = parse_pricing(text)
    except ParseError as exc:
        raise ApiError(
            400,
            "VALIDATION_FAILED",
            "pricing document rejected",
            violations=[
                {
                    "kind": exc.kind,
                    "path": exc.path or "$",
                    "message": exc.message,
                    "line": exc.line,
                    "column": exc.column,
                }
            ],
        ) from None
    violations = validate_pricing(pricing)
    if violations:
        raise ApiError(
            400,
            "VALIDATION_FAILED",
            f"pricing document has {len(violations)} violation(s)",
            violations=[violation_to_dict(v) for v in violations],
        )
    return pricing


def create_app(
    pricing: Pricing | None = None,
    *,
    config: ServiceConfig | None = None,
    store=None,
    token_key: bytes | None = None,
    admin_token: str | None = None,
    token_ttl_seconds: int = 300,
    demo_mode: bool = False,
    ui_dist: str | None = None,
) -> FastAPI:
    """Build the application.

    Tests and embedders pass the pieces directly; `pricing serve` loads
    a ServiceConfig and lets it supply everything.
    """
    if config is not None:
        with open(config.pricing_file, encoding="utf-8") as fh:
            pricing = parse_pricing(fh.read())
        if config.store_kind == "file":
            store = FileStore(config.store_path, fsync=config.fsync)
        else:
            store = MemoryStore()
        token_key = config.resolve_token_key()
        admin_token = config.admin_token
        token_ttl_seconds = config.token_ttl_seconds
        demo_mode = config.demo_mode
        ui_dist = config.ui_dist
    if pricing is None:
        raise ValueError("either pricing or config is required")
    if store is None:
        store = MemoryStore()
    if token_key is None:
        raise ValueError("a token signing key is required")

    violations = validate_pricing(pricing)
    if violations:
        raise SwapError(
            "ValidationFailed",
            f"startup pricing has {len(violations)} violation(s)",
            tuple(violations),
        )

    router = ToggleRouter(pricing)
    tracker = UsageTracker(store, router.current_snapshot)
    router.set_context_provider(tracker.get_context)

    app = FastAPI(title="pricegate", docs_url=None, redoc_url=None, openapi_url=None)
    app.state.router = router
    app.state.tracker = tracker
    app.state.store = store
    app.state.token_key = token_key
    app.state.admin_token = admin_token
    app.state.token_ttl_seconds = token_ttl_seconds
    app.state.demo_mode = demo_mode
    # Every version that was ever active, for diff-against-archive.
    app.state.archive = {pricing.version: pricing}

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError) -> JSONResponse:
        return JSONResponse(status_code=exc.status, content=exc.body())

    @app.exception_handler(RequestValidationError)
    async def _body_error(_request: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(
            status_code=400,
            content={"code": "MALFORMED_BODY", "message": str(exc.errors()[:3])},
        )

    @app.exception_handler(StoreUnavailable)
    async def _store_error(_request: Request, exc: StoreUnavailable) -> JSONResponse:
        return JSONResponse(
            status_code=503, content={"code": "STORE_UNAVAILABLE", "message": str(exc)}
        )

    def require_admin(request: Request) -> None:
        expected = app.state.admin_token
        if not expected:
            raise ApiError(401, "NOT_AUTHORIZED", "admin surface is not configured")
        supplied = request.headers.get("authorization", "")
        if not supplied.startswith("Bearer ") or not hmac.compare_digest(
            supplied[len("Bearer ") :], expected
        ):
            raise ApiError(401, "NOT_AUTHORIZED", "missing or wrong admin token")

    def load_subscription(subscriber_id: str) -> Subscription:
        subscription = store.get_subscription(subscriber_id)
        if subscription is None:
            raise ApiError(
                404, "UNKNOWN_SUBSCRIPTION", f"no subscription {subscriber_id!r}"
            )
        return subscription

    def check_combination(plan: str, add_ons: list[str]) -> None:
        from pricegate.entitlements import resolve_entitlements

        try:
            resolve_entitlements(router.current_snapshot().pricing, plan, add_ons)
        except UnknownPlan as exc:
            raise ApiError(400, "UNKNOWN_PLAN", str(exc)) from None
        except UnknownAddOn as exc:
            raise ApiError(400, "UNKNOWN_ADDON", str(exc)) from None
        except AddOnNotAvailableForPlan as exc:
            raise ApiError(400, "ADDON_NOT_AVAILABLE", str(exc)) from None

    def evaluate_and_sign(subscription: Subscription, overrides=None) -> dict:
        try:
            result = router.evaluate_all(subscription, overrides=overrides)
        except UnknownPlan as exc:
            raise ApiError(409, "UNKNOWN_PLAN", str(exc)) from None
        except (UnknownAddOn, AddOnNotAvailableForPlan) as exc:
            raise ApiError(409, "VALIDATION_FAILED", str(exc)) from None
        token = issue_token(
            result, subscription, app.state.token_ttl_seconds, app.state.token_key
        )
        return {
            "result": evaluation_result_to_dict(result, include_timestamps=True),
            "token": token,
        }

    @app.get("/healthz")
    def healthz() -> dict:
        return {
            "status": "ok",
            "pricingVersion": router.current_snapshot().version,
        }

    @app.get("/pricing")
    def get_pricing() -> dict:
        snapshot = router.current_snapshot()
        return {"version": snapshot.version, "pricing": to_document(snapshot.pricing)}

    @app.put("/pricing")
    async def put_pricing(request: Request) -> dict:
        require_admin(request)
        text = (await request.body()).decode("utf-8", errors="replace")
        candidate = _parse_document(text)
        previous = router.current_snapshot().pricing
        try:
            version = router.swap_pricing(candidate)
        except SwapError as exc:
            if exc.kind == "StaleVersion":
                raise ApiError(409, "STALE_VERSION", str(exc)) from None
            raise ApiError(
                400,
                "VALIDATION_FAILED",
                str(exc),
                violations=[violation_to_dict(v) for v in exc.violations],
            ) from None
        app.state.archive[version] = candidate
        return {
            "version": version,
            "changes": changeset_to_list(diff_pricing(previous, candidate)),
        }

    @app.get("/pricing/diff")
    def get_pricing_diff(against: int) -> dict:
        snapshot = router.current_snapshot()
        base = app.state.archive.get(against)
        if base is None:
            raise ApiError(404, "UNKNOWN_VERSION", f"no archived version {against}")
        return {
            "from": against,
            "to": snapshot.version,
            "changes": changeset_to_list(diff_pricing(base, snapshot.pricing)),
        }

    @app.post("/pricing/diff")
    async def preview_pricing_diff(request: Request) -> dict:
        require_admin(request)
        text = (await request.body()).decode("utf-8", errors="replace")
        candidate = _parse_document(text)
        snapshot = router.current_snapshot()
        return {
            "from": snapshot.version,
            "to": candidate.version,
            "changes": changeset_to_list(diff_pricing(snapshot.pricing, candidate)),
        }

    @app.post("/subscriptions", status_code=201)
    def create_subscription(body: CreateSubscriptionBody) -> dict:
        check_combination(body.plan, body.addOns)
        subscriber_id = body.subscriberId or uuid.uuid4().hex
        if store.get_subscription(subscriber_id) is not None:
            raise ApiError(
                409, "VALIDATION_FAILED", f"subscription {subscriber_id!r} already exists"
            )
        subscription = Subscription(
            subscriber_id=subscriber_id,
            plan_name=body.plan,
            add_on_names=frozenset(body.addOns),
        )
        store.put_subscription(subscription)
        return subscription_to_dict(subscription, include_timestamps=True)

    @app.get("/subscriptions/{subscriber_id}")
    def get_subscription(subscriber_id: str) -> dict:
        return subscription_to_dict(
            load_subscription(subscriber_id), include_timestamps=True
        )

    @app.put("/subscriptions/{subscriber_id}")
    def update_subscription(subscriber_id: str, body: UpdateSubscriptionBody) -> dict:
        current = load_subscription(subscriber_id)
        plan = body.plan if body.plan is not None else current.plan_name
        add_ons = (
            frozenset(body.addOns)
            if body.addOns is not None
            else current.add_on_names
        )
        check_combination(plan, sorted(add_ons))
        updated = Subscription(
            subscriber_id=subscriber_id,
            plan_name=plan,
            add_on_names=add_ons,
            started_at=current.started_at,
            period_start=current.period_start,
        )
        store.put_subscription(updated)
        return subscription_to_dict(updated, include_timestamps=True)

    @app.delete("/subscriptions/{subscriber_id}", status_code=204)
    def delete_subscription(subscriber_id: str) -> None:
        if not store.delete_subscription(subscriber_id):
            raise ApiError(
                404, "UNKNOWN_SUBSCRIPTION", f"no subscription {subscriber_id!r}"
            )

    @app.post("/subscriptions/{subscriber_id}/evaluate")
    def evaluate(subscriber_id: str, body: EvaluateBody | None = None) -> dict:
        subscription = load_subscription(subscriber_id)
        overrides = None
        if body is not None and body.context:
            overrides = {
                key if key.startswith("context.") else f"context.{key}": value
                for key, value in body.context.items()
            }
        return evaluate_and_sign(subscription, overrides=overrides)

    @app.post("/subscriptions/{subscriber_id}/usage")
    def consume(subscriber_id: str, body: ConsumeBody) -> Any:
        subscription = load_subscription(subscriber_id)
        if body.amount <= 0:
            raise ApiError(400, "VALIDATION_FAILED", "amount must be positive")
        try:
            outcome = tracker.try_consume(
                subscription, body.limit, body.amount, body.entityKey
            )
        except UnknownLimit as exc:
            raise ApiError(400, "UNKNOWN_LIMIT", str(exc)) from None
        except EntityKeyRequired as exc:
            raise ApiError(400, "ENTITY_KEY_REQUIRED", str(exc)) from None
        except UnknownPlan as exc:
            raise ApiError(409, "UNKNOWN_PLAN", str(exc)) from None
        except (UnknownAddOn, AddOnNotAvailableForPlan) as exc:
            raise ApiError(409, "VALIDATION_FAILED", str(exc)) from None
        signed = evaluate_and_sign(subscription)
        payload = {"result": consume_result_to_dict(outcome), "token": signed["token"]}
        if outcome.granted:
            return payload
        return JSONResponse(
            status_code=409,
            content={
                "code": "LIMIT_EXHAUSTED",
                "message": f"limit {body.limit!r} is exhausted",
                **payload,
            },
        )

    @app.get("/subscriptions/{subscriber_id}/features/{feature_name}")
    def guard(subscriber_id: str, feature_name: str) -> dict:
        subscription = load_subscription(subscriber_id)
        try:
            status = router.evaluate_feature(subscription, feature_name)
        except UnknownFeature as exc:
            raise ApiError(404, "UNKNOWN_FEATURE", str(exc)) from None
        except UnknownPlan as exc:
            raise ApiError(409, "UNKNOWN_PLAN", str(exc)) from None
        out = {"enabled": status.enabled, "reason": status.reason}
        if status.detail is not None:
            out["detail"] = status.detail
        return out

    @app.get("/demo/key")
    def demo_key() -> dict:
        if not app.state.demo_mode:
            raise ApiError(404, "NOT_FOUND", "demo mode is disabled")
        import base64

        return {"key": base64.b64encode(app.state.token_key).decode("ascii")}

    if ui_dist:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dist, html=True), name="ui")

    return app


def status_response(status) -> dict:
    """Projection used by tests to compare guard output."""
    return feature_status_to_dict(status)
