import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import type { Change, PricingDocument } from "../src/api.js";
import { PricingEditor } from "../src/editor.js";

function serverDocument(): PricingDocument {
  return {
    name: "clinic",
    version: 7,
    currency: "EUR",
    usageLimits: [{ name: "pets per owner", defaultValue: 2 }],
    features: [{ name: "pet dashboard", valueType: "BOOLEAN", defaultValue: false }],
    plans: [
      { name: "BASIC", monthlyPrice: 0, limitValues: { "pets per owner": 2 } },
      { name: "GOLD", monthlyPrice: 9.95, limitValues: { "pets per owner": 4 } },
    ],
    addOns: [],
  };
}

class FakeAdminApi {
  getCalls = 0;
  putCalls = 0;
  diffCalls = 0;
  putError: ApiError | null = null;
  diffChanges: Change[] = [];
  lastPut: PricingDocument | null = null;
  lastPreview: PricingDocument | null = null;

  async getPricing(): Promise<{ version: number; pricing: PricingDocument }> {
    this.getCalls += 1;
    const pricing = serverDocument();
    return { version: pricing.version, pricing };
  }

  async previewDiff(
    document: PricingDocument,
  ): Promise<{ from: number; to: number; changes: Change[] }> {
    this.diffCalls += 1;
    this.lastPreview = document;
    return { from: 7, to: document.version, changes: this.diffChanges };
  }

  async putPricing(document: PricingDocument): Promise<{ version: number; changes: Change[] }> {
    this.putCalls += 1;
    if (this.putError) throw this.putError;
    this.lastPut = document;
    return { version: document.version, changes: this.diffChanges };
  }

  asClient(): ApiClient {
    return this as unknown as ApiClient;
  }
}

describe("PricingEditor", () => {
  it("refuses to submit before load()", async () => {
    const editor = new PricingEditor(new FakeAdminApi().asClient());
    await expect(editor.submit()).rejects.toThrow(/load/);
  });

  it("load then submit with no edits stays off the network", async () => {
    const api = new FakeAdminApi();
    const editor = new PricingEditor(api.asClient());
    await editor.load();
    const outcome = await editor.submit();
    expect(outcome).toEqual({ ok: false, kind: "empty", message: "no changes to submit" });
    expect(api.putCalls).toBe(0);
  });

  it("a locally invalid draft is reported without a PUT", async () => {
    const api = new FakeAdminApi();
    const editor = new PricingEditor(api.asClient());
    const draft = await editor.load();
    draft.setPlanLimit("GOLD", "pets per owner", -2);
    const outcome = await editor.submit();
    expect(outcome.ok).toBe(false);
    if (!outcome.ok && outcome.kind === "invalid") {
      expect(outcome.violations[0]?.kind).toBe("NegativeLimit");
    } else {
      throw new Error(`expected invalid, got ${JSON.stringify(outcome)}`);
    }
    expect(api.putCalls).toBe(0);
  });

  it("a real edit submits once and rebaselines the draft", async () => {
    const api = new FakeAdminApi();
    api.diffChanges = [
      {
        kind: "LimitValueChanged",
        path: "plans.GOLD.limitValues.pets per owner",
        old: 4,
        new: 2,
        impact: "DEGRADES_EXISTING",
      },
    ];
    const editor = new PricingEditor(api.asClient());
    const draft = await editor.load();
    draft.setPlanLimit("GOLD", "pets per owner", 2);
    const outcome = await editor.submit();
    expect(outcome).toEqual({ ok: true, version: 8, changes: api.diffChanges });
    expect(api.putCalls).toBe(1);
    expect(api.lastPut?.version).toBe(8);
    expect(editor.loadedVersion).toBe(8);
    expect(editor.draft?.isDirty()).toBe(false);
    expect(editor.draft?.baselineVersion).toBe(8);
  });

  it("maps a server 400 to inline violations", async () => {
    const api = new FakeAdminApi();
    api.putError = new ApiError(400, "VALIDATION_FAILED", "rejected", [
      { kind: "DanglingReference", path: "plans.GOLD.limitValues.x", message: "no such limit" },
    ]);
    const editor = new PricingEditor(api.asClient());
    const draft = await editor.load();
    draft.setPlanPrice("GOLD", 12);
    const outcome = await editor.submit();
    expect(outcome).toMatchObject({ ok: false, kind: "invalid" });
    if (!outcome.ok && outcome.kind === "invalid") {
      expect(outcome.violations[0]?.kind).toBe("DanglingReference");
    }
  });

  it("maps a server 409 to a stale prompt", async () => {
    const api = new FakeAdminApi();
    api.putError = new ApiError(409, "STALE_VERSION", "someone else published version 8");
    const editor = new PricingEditor(api.asClient());
    const draft = await editor.load();
    draft.setPlanPrice("GOLD", 12);
    const outcome = await editor.submit();
    expect(outcome.ok).toBe(false);
    if (!outcome.ok && outcome.kind === "stale") {
      expect(outcome.message).toMatch(/reload the editor/);
    } else {
      throw new Error(`expected stale, got ${JSON.stringify(outcome)}`);
    }
  });

  it("previewDiff sends the bumped draft to the dry-run endpoint", async () => {
    const api = new FakeAdminApi();
    const editor = new PricingEditor(api.asClient());
    const draft = await editor.load();
    draft.setPlanLimit("BASIC", "pets per owner", 3);
    await editor.previewDiff();
    expect(api.diffCalls).toBe(1);
    expect(api.lastPreview?.version).toBe(8);
    expect(api.lastPreview?.plans[0]?.limitValues?.["pets per owner"]).toBe(3);
  });
});
