"""Signed feature tokens: a compact, verifiable snapshot of an
evaluation result that a frontend can trust without re-asking the
backend per toggle.

Format: base64url(header JSON) "." base64url(payload JSON) "."
base64url(HMAC-SHA256(key, header_b64 "." payload_b64)), all base64url
unpadded. JSON is canonical: lexicographically sorted keys, no
whitespace, ASCII escapes. The header is {"alg": "HS256", "typ":
"PFT"}. The payload carries sub, ver (pricing version), plan, sorted
addOns, iat, exp and a features map: per feature e (enabled), v (the
resolved value, present for non-boolean features) and l ({u, m} usage
against the tightest attached limit, when one exists).

Verification order: structural checks (segment count, base64url,
header shape) first, then the constant-time signature comparison, then
payload JSON and expiry. now >= exp is expired: a token with exp equal
to the current second is already dead.
"""

from __future__ import annotations

import base64
import binascii
import hmac
import hashlib
import json
import time
from dataclasses import dataclass

from pricegate.errors import WeakKey
from pricegate.model import Subscription
from pricegate.router import EvaluationResult

MIN_KEY_BYTES = 32
TOKEN_TYPE = "PFT"
ALGORITHM = "HS256"

VALID = "VALID"
INVALID_SIGNATURE = "INVALID_SIGNATURE"
EXPIRED = "EXPIRED"
MALFORMED = "MALFORMED"


@dataclass(frozen=True)
class TokenVerdict:
    kind: str
    payload: dict | None = None
    detail: str | None = None


def _b64url(data: bytes) -> str:
    return base64.urlsafe_b64encode(data).decode("ascii").rstrip("=")


def _b64url_decode(text: str) -> bytes:
    padded = text + "=" * (-len(text) % 4)
    return base64.b64decode(padded.encode("ascii"), altchars=b"-_", validate=True)


def canonical_json(obj) -> bytes:
    """Canonical JSON bytes: sorted keys, compact separators, ASCII."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("ascii")


def _require_key(key: bytes) -> None:
    if not isinstance(key, (bytes, bytearray)):
        raise TypeError("key must be bytes")
    if len(key) < MIN_KEY_BYTES:
        raise WeakKey(len(key))


def features_payload(result: EvaluationResult) -> dict:
    """Project statuses to the compact token form."""
    features: dict = {}
    for name, status in result.statuses.items():
        entry: dict = {"e": status.enabled}
        if not isinstance(status.value, bool):
            entry["v"] = status.value
        if status.limit is not None:
            entry["l"] = {"u": status.limit.used, "m": status.limit.max}
        features[name] = entry
    return features


def issue_token(
    result: EvaluationResult,
    subscription: Subscription,
    ttl_seconds: int,
    key: bytes,
    iat: int | None = None,
) -> str:
    """Sign an evaluation result. iat defaults to the current time and
    is injectable so issuance is deterministic under test."""
    _require_key(key)
    if ttl_seconds <= 0:
        raise ValueError(f"ttl_seconds must be positive, got {ttl_seconds}")
    issued_at = int(time.time()) if iat is None else int(iat)
    header = {"alg": ALGORITHM, "typ": TOKEN_TYPE}
    payload = {
        "sub": result.subscriber_id,
        "ver": result.pricing_version,
        "plan": subscription.plan_name,
        "addOns": sorted(subscription.add_on_names),
        "iat": issued_at,
        "exp": issued_at + int(ttl_seconds),
        "features": features_payload(result),
    }
    header_b64 = _b64url(canonical_json(header))
    payload_b64 = _b64url(canonical_json(payload))
    signing_input = f"{header_b64}.{payload_b64}".encode("ascii")
    signature = hmac.new(bytes(key), signing_input, hashlib.sha256).digest()
    return f"{header_b64}.{payload_b64}.{_b64url(signature)}"


def verify_token(token: str, key: bytes, now: int | None = None) -> TokenVerdict:
    """Check a token and return a verdict; never raises on bad input.

    MALFORMED covers structural damage (wrong segment count, invalid
    base64url, wrong header, unparsable payload). INVALID_SIGNATURE is
    any mismatch under the constant-time comparison. EXPIRED means the
    signature held but now >= exp.
    """
    if not isinstance(token, str):
        return TokenVerdict(MALFORMED, detail="token must be a string")
    parts = token.split(".")
    if len(parts) != 3:
        return TokenVerdict(MALFORMED, detail=f"expected 3 segments, got {len(parts)}")
    header_b64, payload_b64, signature_b64 = parts
    try:
        header_bytes = _b64url_decode(header_b64)
        payload_bytes = _b64url_decode(payload_b64)
        signature = _b64url_decode(signature_b64)
    except (binascii.Error, ValueError, UnicodeEncodeError):
        return TokenVerdict(MALFORMED, detail="invalid base64url segment")
    try:
        header = json.loads(header_bytes)
    except json.JSONDecodeError:
        return TokenVerdict(MALFORMED, detail="header is not valid JSON")
    if not isinstance(header, dict) or header.get("alg") != ALGORITHM or header.get("typ") != TOKEN_TYPE:
        return TokenVerdict(MALFORMED, detail="unsupported header")
    signing_input = f"{header_b64}.{payload_b64}".encode("ascii")
    expected = hmac.new(bytes(key), signing_input, hashlib.sha256).digest()
    if not hmac.compare_digest(expected, signature):
        return TokenVerdict(INVALID_SIGNATURE, detail="signature mismatch")
    try:
        payload = json.loads(payload_bytes)
    except json.JSONDecodeError:
        return TokenVerdict(MALFORMED, detail="payload is not valid JSON")
    if not isinstance(payload, dict) or not isinstance(payload.get("exp"), int):
        return TokenVerdict(MALFORMED, detail="payload missing integer exp")
    current = int(time.time()) if now is None else int(now)
    if current >= payload["exp"]:
        return TokenVerdict(EXPIRED, payload=payload, detail="token expired")
    return TokenVerdict(VALID, payload=payload)
