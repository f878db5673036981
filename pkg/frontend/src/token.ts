/**
 * Feature token verification in the browser.
 *
 * Mirrors the server's verifier exactly: structure, then header, then
 * the HMAC over the raw segments, and only then is the payload parsed.
 * Nothing from an unverified token is ever interpreted. All outcomes
 * are verdicts; this module never throws on bad input.
 */

export type VerdictKind = "VALID" | "INVALID_SIGNATURE" | "EXPIRED" | "MALFORMED";

export interface LimitClaim {
  /** used */
  u: number;
  /** max */
  m: number;
}

export interface FeatureClaim {
  /** enabled */
  e: boolean;
  /** resolved value, present only for non-boolean features */
  v?: number | string;
  l?: LimitClaim;
}

export interface TokenPayload {
  sub: string;
  plan: string;
  addOns: string[];
  ver: number;
  iat: number;
  exp: number;
  features: Record<string, FeatureClaim>;
}

export interface TokenVerdict {
  kind: VerdictKind;
  payload?: TokenPayload;
  detail?: string;
}

const B64URL = /^[A-Za-z0-9_-]*$/;

function malformed(detail: string): TokenVerdict {
  return { kind: "MALFORMED", detail };
}

function b64urlDecode(segment: string): Uint8Array | null {
  if (!B64URL.test(segment)) return null;
  const padded = segment.replace(/-/g, "+").replace(/_/g, "/");
  try {
    const text = atob(padded + "=".repeat((4 - (padded.length % 4)) % 4));
    return Uint8Array.from(text, (c) => c.charCodeAt(0));
  } catch {
    return null;
  }
}

/** Decode the standard-base64 key handed out by GET /demo/key. */
export function decodeKey(base64: string): Uint8Array {
  return Uint8Array.from(atob(base64), (c) => c.charCodeAt(0));
}

async function hmacMatches(
  key: Uint8Array,
  message: Uint8Array,
  signature: Uint8Array,
): Promise<boolean> {
  const cryptoKey = await crypto.subtle.importKey(
    "raw",
    key as unknown as ArrayBuffer,
    { name: "HMAC", hash: "SHA-256" },
    false,
    ["verify"],
  );
  return crypto.subtle.verify(
    "HMAC",
    cryptoKey,
    signature as unknown as ArrayBuffer,
    message as unknown as ArrayBuffer,
  );
}

export async function verifyToken(
  token: unknown,
  key: Uint8Array,
  nowSeconds?: number,
): Promise<TokenVerdict> {
  if (typeof token !== "string") return malformed("token must be a string");
  const parts = token.split(".");
  if (parts.length !== 3) {
    return malformed(`expected 3 segments, got ${parts.length}`);
  }
  const [headerB64, payloadB64, signatureB64] = parts as [string, string, string];
  const headerBytes = b64urlDecode(headerB64);
  const payloadBytes = b64urlDecode(payloadB64);
  const signature = b64urlDecode(signatureB64);
  if (headerBytes === null || payloadBytes === null || signature === null) {
    return malformed("invalid base64url segment");
  }

  let header: unknown;
  try {
    header = JSON.parse(new TextDecoder().decode(headerBytes));
  } catch {
    return malformed("header is not valid JSON");
  }
  if (
    typeof header !== "object" ||
    header === null ||
    (header as Record<string, unknown>)["alg"] !== "HS256" ||
    (header as Record<string, unknown>)["typ"] !== "PFT"
  ) {
    return malformed("unsupported header");
  }

  const signingInput = new TextEncoder().encode(`${headerB64}.${payloadB64}`);
  if (!(await hmacMatches(key, signingInput, signature))) {
    return { kind: "INVALID_SIGNATURE", detail: "signature mismatch" };
  }

  let payload: unknown;
  try {
    payload = JSON.parse(new TextDecoder().decode(payloadBytes));
  } catch {
    return malformed("payload is not valid JSON");
  }
  if (
    typeof payload !== "object" ||
    payload === null ||
    Array.isArray(payload) ||
    !Number.isInteger((payload as Record<string, unknown>)["exp"])
  ) {
    return malformed("payload missing integer exp");
  }
  const claims = payload as unknown as TokenPayload;
  const now = nowSeconds ?? Math.floor(Date.now() / 1000);
  if (now >= claims.exp) {
    return { kind: "EXPIRED", payload: claims, detail: "token expired" };
  }
  return { kind: "VALID", payload: claims };
}
