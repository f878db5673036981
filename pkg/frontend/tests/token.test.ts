import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { verifyToken } from "../src/token.js";
import { KEY, b64url, futurePayload, signToken, utf8 } from "./helpers.js";

// Golden vector issued by the backend with key "a"*32 at iat=1700000000,
// ttl 300s. Verifying it here proves the two languages agree byte for byte.
const GOLDEN_PATH = fileURLToPath(new URL("../../testdata/token_golden.txt", import.meta.url));
const GOLDEN = readFileSync(GOLDEN_PATH, "utf-8").trim();
const GOLDEN_KEY = utf8("a".repeat(32));

describe("cross-language golden token", () => {
  it("verifies VALID with the issuing key before expiry", async () => {
    const verdict = await verifyToken(GOLDEN, GOLDEN_KEY, 1700000100);
    expect(verdict.kind).toBe("VALID");
    expect(verdict.payload?.plan).toBe("PLATINUM");
    expect(verdict.payload?.sub).toBe("golden-sub");
    expect(verdict.payload?.iat).toBe(1700000000);
    expect(verdict.payload?.exp).toBe(1700000300);
    const pets = verdict.payload?.features["pets per owner"];
    expect(pets?.e).toBe(true);
    expect(pets?.l).toEqual({ u: 2, m: 7 });
  });

  it("reports EXPIRED at the exact expiry second, payload still attached", async () => {
    const verdict = await verifyToken(GOLDEN, GOLDEN_KEY, 1700000300);
    expect(verdict.kind).toBe("EXPIRED");
    expect(verdict.payload?.plan).toBe("PLATINUM");
  });

  it("rejects the golden token under any other key", async () => {
    const verdict = await verifyToken(GOLDEN, KEY, 1700000100);
    expect(verdict.kind).toBe("INVALID_SIGNATURE");
    expect(verdict.payload).toBeUndefined();
  });
});

describe("structural rejection", () => {
  const cases: Array<[string, unknown]> = [
    ["empty string", ""],
    ["one segment", "abc"],
    ["two segments", "abc.def"],
    ["four segments", "a.b.c.d"],
    ["non-string", 42],
    ["null", null],
    ["illegal base64url characters", "a+b.cd.ef"],
  ];
  for (const [label, input] of cases) {
    it(`MALFORMED: ${label}`, async () => {
      const verdict = await verifyToken(input, KEY);
      expect(verdict.kind).toBe("MALFORMED");
    });
  }

  it("MALFORMED: header is not JSON", async () => {
    const headerB64 = b64url(utf8("not json"));
    const verdict = await verifyToken(`${headerB64}.e30.AAAA`, KEY);
    expect(verdict.kind).toBe("MALFORMED");
  });

  it("MALFORMED: wrong algorithm even when correctly signed", async () => {
    const token = await signToken(futurePayload(), KEY, { alg: "none", typ: "PFT" });
    const verdict = await verifyToken(token, KEY);
    expect(verdict.kind).toBe("MALFORMED");
  });

  it("MALFORMED: wrong type field even when correctly signed", async () => {
    const token = await signToken(futurePayload(), KEY, { alg: "HS256", typ: "JWT" });
    const verdict = await verifyToken(token, KEY);
    expect(verdict.kind).toBe("MALFORMED");
  });
});

describe("signature checks run before payload parsing", () => {
  it("garbage payload with a bad signature is INVALID_SIGNATURE, not MALFORMED", async () => {
    const headerB64 = b64url(utf8(JSON.stringify({ alg: "HS256", typ: "PFT" })));
    const payloadB64 = b64url(utf8("{broken"));
    const verdict = await verifyToken(`${headerB64}.${payloadB64}.AAAA`, KEY);
    expect(verdict.kind).toBe("INVALID_SIGNATURE");
  });

  it("garbage payload with a good signature is MALFORMED", async () => {
    const headerB64 = b64url(utf8(JSON.stringify({ alg: "HS256", typ: "PFT" })));
    const payloadB64 = b64url(utf8("{broken"));
    const { hmac } = await import("./helpers.js");
    const sig = await hmac(KEY, utf8(`${headerB64}.${payloadB64}`));
    const verdict = await verifyToken(`${headerB64}.${payloadB64}.${b64url(sig)}`, KEY);
    expect(verdict.kind).toBe("MALFORMED");
  });
});

describe("locally signed round trips", () => {
  it("fresh token is VALID and carries the payload through", async () => {
    const payload = futurePayload({ plan: "BASIC", features: { x: { e: true } } });
    const verdict = await verifyToken(await signToken(payload, KEY), KEY);
    expect(verdict.kind).toBe("VALID");
    expect(verdict.payload?.plan).toBe("BASIC");
    expect(verdict.payload?.features["x"]?.e).toBe(true);
  });

  it("any payload byte change flips the verdict to INVALID_SIGNATURE", async () => {
    const token = await signToken(futurePayload(), KEY);
    const [h, p, s] = token.split(".") as [string, string, string];
    const tampered = p.slice(0, 4) + (p[4] === "A" ? "B" : "A") + p.slice(5);
    const verdict = await verifyToken(`${h}.${tampered}.${s}`, KEY);
    expect(verdict.kind).toBe("INVALID_SIGNATURE");
  });

  it("expiry boundary: exp - 1 is VALID, exp is EXPIRED", async () => {
    const payload = futurePayload({ exp: 5000, iat: 4000 });
    const token = await signToken(payload, KEY);
    expect((await verifyToken(token, KEY, 4999)).kind).toBe("VALID");
    expect((await verifyToken(token, KEY, 5000)).kind).toBe("EXPIRED");
  });

  it("missing or non-integer exp is MALFORMED even when signed", async () => {
    const noExp = futurePayload();
    delete (noExp as Record<string, unknown>)["exp"];
    expect((await verifyToken(await signToken(noExp, KEY), KEY)).kind).toBe("MALFORMED");
    const floatExp = futurePayload({ exp: 123.5 });
    expect((await verifyToken(await signToken(floatExp, KEY), KEY)).kind).toBe("MALFORMED");
  });

  it("non-object payload is MALFORMED even when signed", async () => {
    expect((await verifyToken(await signToken([1, 2], KEY), KEY)).kind).toBe("MALFORMED");
    expect((await verifyToken(await signToken("hi", KEY), KEY)).kind).toBe("MALFORMED");
  });
});
