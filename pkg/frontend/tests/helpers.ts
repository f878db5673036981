/**
 * Test-side token forge. Signs arbitrary payloads so the verifier and
 * the gate derivation can be exercised against both honest and
 * dishonest inputs without a server.
 */

export function b64url(data: Uint8Array): string {
  let text = "";
  for (const byte of data) text += String.fromCharCode(byte);
  return btoa(text).replace(/\+/g, "-").replace(/\//g, "_").replace(/=+$/, "");
}

export function utf8(text: string): Uint8Array {
  return new TextEncoder().encode(text);
}

export async function hmac(key: Uint8Array, message: Uint8Array): Promise<Uint8Array> {
  const cryptoKey = await crypto.subtle.importKey(
    "raw",
    key as unknown as ArrayBuffer,
    { name: "HMAC", hash: "SHA-256" },
    false,
    ["sign"],
  );
  return new Uint8Array(
    await crypto.subtle.sign("HMAC", cryptoKey, message as unknown as ArrayBuffer),
  );
}

export async function signToken(
  payload: unknown,
  key: Uint8Array,
  header: unknown = { alg: "HS256", typ: "PFT" },
): Promise<string> {
  const headerB64 = b64url(utf8(JSON.stringify(header)));
  const payloadB64 = b64url(utf8(JSON.stringify(payload)));
  const signature = await hmac(key, utf8(`${headerB64}.${payloadB64}`));
  return `${headerB64}.${payloadB64}.${b64url(signature)}`;
}

/** Deterministic PRNG for fuzz-style tests (mulberry32). */
export function prng(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export const KEY = utf8("k".repeat(32));

export function futurePayload(overrides: Record<string, unknown> = {}): Record<string, unknown> {
  const now = Math.floor(Date.now() / 1000);
  return {
    sub: "tester",
    plan: "GOLD",
    addOns: [],
    ver: 1,
    iat: now,
    exp: now + 300,
    features: {},
    ...overrides,
  };
}
