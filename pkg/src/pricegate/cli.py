"""Command line interface.

Exit codes follow one rule everywhere: 0 for success, 1 for a domain
failure (invalid document, degrading diff, failed verification), 2 for
usage errors (bad flags, unreadable files, unknown plan names).

--json output is stable: keys sorted, timestamps suppressed unless
--with-timestamps is given, so the same inputs always produce the same
bytes. The JSON shapes are the shared ones from pricegate.jsonout; the
HTTP service emits the identical structures.
"""

from __future__ import annotations

import json
import os
import sys

import click

from pricegate.config import ConfigError, ServiceConfig
from pricegate.diffing import diff_pricing
from pricegate.documents import parse_pricing, validate_pricing
from pricegate.errors import (
    AddOnNotAvailableForPlan,
    ParseError,
    UnknownAddOn,
    UnknownPlan,
    WeakKey,
)
from pricegate.jsonout import (
    change_to_dict,
    evaluation_result_to_dict,
    violation_to_dict,
)
from pricegate.model import Pricing, Subscription
from pricegate.router import ToggleRouter
from pricegate.store import MemoryStore
from pricegate.token import (
    EXPIRED,
    INVALID_SIGNATURE,
    MALFORMED,
    VALID,
    issue_token,
    verify_token,
)
from pricegate.usage import UsageTracker

DEFAULT_KEY_ENV = "PRICEGATE_TOKEN_KEY"


def _print_json(data) -> None:
    click.echo(json.dumps(data, sort_keys=True, indent=2))


def _load_pricing(path: str) -> Pricing:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise click.UsageError(f"cannot read {path}: {exc}")
    try:
        return parse_pricing(text)
    except ParseError as exc:
        click.echo(f"{path}: {exc}", err=True)
        sys.exit(1)


def _load_valid_pricing(path: str) -> Pricing:
    pricing = _load_pricing(path)
    violations = validate_pricing(pricing)
    if violations:
        for violation in violations:
            click.echo(f"{path}: {violation.kind} at {violation.path}: {violation.message}", err=True)
        sys.exit(1)
    return pricing


def _read_context(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise click.UsageError(f"cannot read context file: {exc}")
    except json.JSONDecodeError as exc:
        raise click.UsageError(f"context file is not valid JSON: {exc}")
    if not isinstance(data, dict):
        raise click.UsageError("context file must hold a JSON object")
    out = {}
    for key, value in data.items():
        if not isinstance(value, (bool, int, float, str)):
            raise click.UsageError(f"context value for {key!r} must be a scalar")
        out[key if key.startswith("context.") else f"context.{key}"] = value
    return out


def _split_addons(text: str | None) -> list[str]:
    if not text:
        return []
    return [part.strip() for part in text.split(",") if part.strip()]


def _key_from_env(var: str) -> bytes:
    value = os.environ.get(var)
    if value is None:
        raise click.UsageError(f"environment variable {var} is not set")
    return value.encode("utf-8")


def _evaluate(pricing: Pricing, plan: str, addons: list[str], context: dict, sub_id: str):
    router = ToggleRouter(pricing)
    tracker = UsageTracker(MemoryStore(), router.current_snapshot)
    router.set_context_provider(tracker.get_context)
    subscription = Subscription(
        subscriber_id=sub_id, plan_name=plan, add_on_names=frozenset(addons)
    )
    try:
        return router.evaluate_all(subscription, overrides=context), subscription
    except UnknownPlan:
        raise click.UsageError(f"unknown plan: {plan!r}")
    except UnknownAddOn as exc:
        raise click.UsageError(str(exc))
    except AddOnNotAvailableForPlan as exc:
        raise click.UsageError(str(exc))


@click.group()
def main() -> None:
    """Work with pricing documents, feature evaluation and tokens."""


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--json", "as_json", is_flag=True, help="Emit violations as JSON.")
def validate(file: str, as_json: bool) -> None:
    """Check FILE for schema and semantic problems."""
    try:
        with open(file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise click.UsageError(f"cannot read {file}: {exc}")
    try:
        pricing = parse_pricing(text)
    except ParseError as exc:
        if as_json:
            _print_json(
                {
                    "valid": False,
                    "violations": [
                        {
                            "kind": exc.kind,
                            "path": exc.path or "$",
                            "message": exc.message,
                            "line": exc.line,
                            "column": exc.column,
                        }
                    ],
                }
            )
        else:
            click.echo(f"{file}: {exc}", err=True)
        sys.exit(1)
    violations = validate_pricing(pricing)
    if as_json:
        _print_json(
            {"valid": not violations, "violations": [violation_to_dict(v) for v in violations]}
        )
    elif violations:
        for violation in violations:
            click.echo(f"{violation.kind} at {violation.path}: {violation.message}")
    else:
        click.echo(
            f"OK: {len(pricing.plans)} plans, {len(pricing.add_ons)} add-ons, "
            f"{len(pricing.features)} features, {len(pricing.usage_limits)} limits"
        )
    if violations:
        sys.exit(1)


@main.command()
@click.argument("old_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("new_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--json", "as_json", is_flag=True, help="Emit the change set as JSON.")
def diff(old_file: str, new_file: str, as_json: bool) -> None:
    """Compare two pricing documents.

    Exits 1 when any change degrades existing subscribers, 0 otherwise.
    """
    old = _load_valid_pricing(old_file)
    new = _load_valid_pricing(new_file)
    changes = diff_pricing(old, new)
    if as_json:
        _print_json([change_to_dict(c) for c in changes])
    elif not changes:
        click.echo("no changes")
    else:
        for change in changes:
            click.echo(
                f"{change.kind} {change.path}: {change.old_value!r} -> "
                f"{change.new_value!r} [{change.impact}]"
            )
    if changes.degrades_existing():
        sys.exit(1)


@main.command(name="eval")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--plan", required=True, help="Plan name to evaluate under.")
@click.option("--addons", default=None, help="Comma-separated add-on names.")
@click.option(
    "--context",
    "context_file",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="JSON file of context values (keys with or without the context. prefix).",
)
@click.option("--sub-id", default="cli", show_default=True, help="Subscriber id to stamp.")
@click.option("--json", "as_json", is_flag=True, help="Emit the evaluation result as JSON.")
@click.option("--with-timestamps", is_flag=True, help="Include evaluatedAt in JSON output.")
def eval_command(
    file: str,
    plan: str,
    addons: str | None,
    context_file: str | None,
    sub_id: str,
    as_json: bool,
    with_timestamps: bool,
) -> None:
    """Evaluate every feature of FILE for a plan and context."""
    pricing = _load_valid_pricing(file)
    context = _read_context(context_file)
    result, _sub = _evaluate(pricing, plan, _split_addons(addons), context, sub_id)
    if as_json:
        _print_json(evaluation_result_to_dict(result, include_timestamps=with_timestamps))
        return
    click.echo(f"pricing version {result.pricing_version}, plan {plan}")
    for name in sorted(result.statuses):
        status = result.statuses[name]
        state = "on " if status.enabled else "off"
        line = f"{state}  {name}  [{status.reason}]"
        if not isinstance(status.value, bool):
            line += f" value={status.value!r}"
        if status.limit is not None:
            line += f" used={status.limit.used}/{status.limit.max}"
        click.echo(line)
    for note in result.diagnostics:
        click.echo(f"note: {note}")


@main.group()
def token() -> None:
    """Issue and verify feature tokens."""


@token.command()
@click.option("--pricing", "pricing_file", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--plan", required=True)
@click.option("--addons", default=None)
@click.option("--context", "context_file", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--sub-id", default="cli", show_default=True)
@click.option("--key-env", default=DEFAULT_KEY_ENV, show_default=True, help="Env var holding the signing key.")
@click.option("--ttl", default=300, show_default=True, help="Lifetime in seconds.")
@click.option("--iat", default=None, type=int, help="Fix the issued-at second (for reproducible output).")
def issue(
    pricing_file: str,
    plan: str,
    addons: str | None,
    context_file: str | None,
    sub_id: str,
    key_env: str,
    ttl: int,
    iat: int | None,
) -> None:
    """Evaluate and print a signed feature token."""
    key = _key_from_env(key_env)
    pricing = _load_valid_pricing(pricing_file)
    context = _read_context(context_file)
    result, subscription = _evaluate(pricing, plan, _split_addons(addons), context, sub_id)
    try:
        click.echo(issue_token(result, subscription, ttl, key, iat=iat))
    except (WeakKey, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


@token.command()
@click.argument("token_text")
@click.option("--key-env", default=DEFAULT_KEY_ENV, show_default=True)
@click.option("--now", default=None, type=int, help="Verify as of this UNIX second.")
@click.option("--json", "as_json", is_flag=True, help="Emit the verdict as JSON.")
def verify(token_text: str, key_env: str, now: int | None, as_json: bool) -> None:
    """Verify a token; exits 0 only for a valid one."""
    key = _key_from_env(key_env)
    verdict = verify_token(token_text, key, now=now)
    if as_json:
        _print_json(
            {
                "kind": verdict.kind,
                "detail": verdict.detail,
                "payload": verdict.payload,
            }
        )
    else:
        click.echo(verdict.kind)
        if verdict.detail and verdict.kind != VALID:
            click.echo(verdict.detail)
        if verdict.kind == VALID:
            click.echo(json.dumps(verdict.payload, sort_keys=True, indent=2))
    if verdict.kind != VALID:
        sys.exit(1)


@main.command()
@click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False), required=True)
def serve(config_file: str) -> None:
    """Run the HTTP service."""
    import uvicorn

    from pricegate.service import create_app

    try:
        config = ServiceConfig.load(config_file)
        app = create_app(config=config)
    except (ConfigError, WeakKey, ParseError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    uvicorn.run(app, host=config.listen_host, port=config.listen_port)


if __name__ == "__main__":
    main()
