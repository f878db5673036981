import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import { DemoPage } from "../src/demo.js";
import { PET_LIMIT_FEATURE, VISIT_LIMIT_FEATURE } from "../src/gates.js";
import { KEY, signToken, utf8 } from "./helpers.js";

const WRONG_KEY = utf8("w".repeat(32));

function keyBase64(): string {
  return Buffer.from(KEY).toString("base64");
}

async function gateToken(options: {
  used: number;
  max: number;
  exp?: number;
  key?: Uint8Array;
}): Promise<string> {
  const { used, max } = options;
  return signToken(
    {
      sub: "demo-sub",
      plan: "GOLD",
      addOns: [],
      ver: 1,
      iat: 900,
      exp: options.exp ?? 1300,
      features: {
        "pet dashboard": { e: true },
        "vet selection": { e: true },
        [PET_LIMIT_FEATURE]: { e: used < max, l: { u: used, m: max } },
        [VISIT_LIMIT_FEATURE]: { e: true, l: { u: 0, m: 4 } },
      },
    },
    options.key ?? KEY,
  );
}

/**
 * Scripted stand-in for ApiClient: counts calls and replays queued
 * responses, so the tests can pin down exactly how much network the
 * page controller generates.
 */
class FakeApi {
  evaluateCalls = 0;
  consumeCalls = 0;
  createCalls = 0;
  keyCalls = 0;
  evaluateTokens: string[] = [];
  consumeQueue: Array<{ granted: boolean; token: string }> = [];
  createError: ApiError | null = null;
  lastConsume: { limit: string; entityKey?: string } | null = null;

  async createSubscription(_body: unknown): Promise<unknown> {
    this.createCalls += 1;
    if (this.createError) throw this.createError;
    return { subscriberId: "demo-sub", plan: "GOLD", addOns: [] };
  }

  async demoKey(): Promise<string> {
    this.keyCalls += 1;
    return keyBase64();
  }

  async evaluate(_id: string): Promise<{ result: unknown; token: string }> {
    this.evaluateCalls += 1;
    const token = this.evaluateTokens.shift();
    if (token === undefined) throw new Error("no scripted evaluate response left");
    return { result: {}, token };
  }

  async consume(
    _id: string,
    limit: string,
    _amount?: number,
    entityKey?: string,
  ): Promise<{ granted: boolean; result: unknown; token: string }> {
    this.consumeCalls += 1;
    this.lastConsume = entityKey === undefined ? { limit } : { limit, entityKey };
    const next = this.consumeQueue.shift();
    if (next === undefined) throw new Error("no scripted consume response left");
    return { ...next, result: {} };
  }

  asClient(): ApiClient {
    return this as unknown as ApiClient;
  }
}

function page(api: FakeApi, clock: () => number): DemoPage {
  return new DemoPage(api.asClient(), "demo-sub", { now: clock });
}

describe("init", () => {
  it("creates the subscription, fetches the key, and evaluates exactly once", async () => {
    const api = new FakeApi();
    api.evaluateTokens.push(await gateToken({ used: 1, max: 4 }));
    const demo = page(api, () => 1000);
    await demo.init("GOLD");
    expect(api.createCalls).toBe(1);
    expect(api.keyCalls).toBe(1);
    expect(api.evaluateCalls).toBe(1);
    expect(demo.state.authorized).toBe(true);
    expect(demo.state.features["pet dashboard"]).toBe(true);
    expect(demo.state.addPet).toEqual({ visible: true, used: 1, max: 4, limitReached: false });
  });

  it("tolerates an already-existing subscription", async () => {
    const api = new FakeApi();
    api.createError = new ApiError(409, "DUPLICATE", "already there");
    api.evaluateTokens.push(await gateToken({ used: 0, max: 4 }));
    const demo = page(api, () => 1000);
    await demo.init("GOLD");
    expect(demo.state.authorized).toBe(true);
  });

  it("propagates any other subscription failure", async () => {
    const api = new FakeApi();
    api.createError = new ApiError(400, "UNKNOWN_PLAN", "no such plan");
    const demo = page(api, () => 1000);
    await expect(demo.init("DIAMOND")).rejects.toMatchObject({ code: "UNKNOWN_PLAN" });
    expect(api.evaluateCalls).toBe(0);
    expect(demo.state.authorized).toBe(false);
  });

  it("starts closed before init", () => {
    const demo = page(new FakeApi(), () => 1000);
    expect(demo.state.authorized).toBe(false);
    expect(demo.state.addPet.visible).toBe(false);
  });
});

describe("actions re-render from the response token, not a second evaluate", () => {
  it("addPet adopts the consume token", async () => {
    const api = new FakeApi();
    api.evaluateTokens.push(await gateToken({ used: 1, max: 4 }));
    api.consumeQueue.push({ granted: true, token: await gateToken({ used: 2, max: 4 }) });
    const demo = page(api, () => 1000);
    await demo.init("GOLD");

    const granted = await demo.addPet();
    expect(granted).toBe(true);
    expect(api.consumeCalls).toBe(1);
    expect(api.evaluateCalls).toBe(1);
    expect(api.lastConsume).toEqual({ limit: PET_LIMIT_FEATURE });
    expect(demo.state.addPet.used).toBe(2);
  });

  it("a denied grant closes the gate and raises the notice", async () => {
    const api = new FakeApi();
    api.evaluateTokens.push(await gateToken({ used: 3, max: 4 }));
    api.consumeQueue.push({ granted: true, token: await gateToken({ used: 4, max: 4 }) });
    api.consumeQueue.push({ granted: false, token: await gateToken({ used: 4, max: 4 }) });
    const demo = page(api, () => 1000);
    await demo.init("GOLD");

    expect(await demo.addPet()).toBe(true);
    expect(demo.state.addPet).toEqual({ visible: false, used: 4, max: 4, limitReached: true });

    expect(await demo.addPet()).toBe(false);
    expect(demo.state.addPet.limitReached).toBe(true);
    expect(api.evaluateCalls).toBe(1);
  });

  it("bookVisit passes the entity key through", async () => {
    const api = new FakeApi();
    api.evaluateTokens.push(await gateToken({ used: 0, max: 4 }));
    api.consumeQueue.push({ granted: true, token: await gateToken({ used: 0, max: 4 }) });
    const demo = page(api, () => 1000);
    await demo.init("GOLD");
    await demo.bookVisit("rex");
    expect(api.lastConsume).toEqual({ limit: VISIT_LIMIT_FEATURE, entityKey: "rex" });
  });
});

describe("token trust", () => {
  it("a token signed with the wrong key closes the whole page", async () => {
    const api = new FakeApi();
    api.evaluateTokens.push(await gateToken({ used: 0, max: 4, key: WRONG_KEY }));
    const demo = page(api, () => 1000);
    await demo.init("GOLD");
    expect(demo.state.authorized).toBe(false);
    expect(demo.state.addPet.visible).toBe(false);
    expect(Object.values(demo.state.features).some((f) => f)).toBe(false);
  });

  it("an expired token closes the page until the next refresh", async () => {
    const api = new FakeApi();
    api.evaluateTokens.push(await gateToken({ used: 0, max: 4, exp: 999 }));
    api.evaluateTokens.push(await gateToken({ used: 0, max: 4, exp: 1300 }));
    const demo = page(api, () => 1000);
    await demo.init("GOLD");
    expect(demo.state.authorized).toBe(false);

    await demo.ensureFresh();
    expect(api.evaluateCalls).toBe(2);
    expect(demo.state.authorized).toBe(true);
  });

  it("ensureFresh is silent while the token is still current", async () => {
    const api = new FakeApi();
    api.evaluateTokens.push(await gateToken({ used: 0, max: 4, exp: 1300 }));
    const demo = page(api, () => 1000);
    await demo.init("GOLD");
    await demo.ensureFresh();
    await demo.ensureFresh();
    expect(api.evaluateCalls).toBe(1);
  });

  it("ensureFresh re-evaluates once the clock passes exp", async () => {
    const api = new FakeApi();
    api.evaluateTokens.push(await gateToken({ used: 0, max: 4, exp: 1300 }));
    api.evaluateTokens.push(await gateToken({ used: 0, max: 4, exp: 2300 }));
    let clock = 1000;
    const demo = page(api, () => clock);
    await demo.init("GOLD");
    clock = 1300;
    await demo.ensureFresh();
    expect(api.evaluateCalls).toBe(2);
    expect(demo.state.authorized).toBe(true);
    expect(demo.state.expiresAt).toBe(2300);
  });

  it("locally mutated state cannot survive: gates re-derive from the token", async () => {
    const api = new FakeApi();
    api.evaluateTokens.push(await gateToken({ used: 4, max: 4 }));
    api.evaluateTokens.push(await gateToken({ used: 4, max: 4 }));
    const demo = page(api, () => 1000);
    await demo.init("GOLD");
    expect(demo.state.addPet.visible).toBe(false);
    expect(Object.isFrozen(demo.state)).toBe(true);
    expect(() => {
      demo.state.features["adoption centre"] = true;
    }).toThrow(TypeError);

    // even replacing the whole state object only lasts until the next render pass
    demo.state = { ...demo.state, addPet: { visible: true, used: 0, max: 9, limitReached: false } };
    await demo.refresh();
    expect(demo.state.addPet.visible).toBe(false);
    expect(demo.state.addPet.limitReached).toBe(true);
  });
});
