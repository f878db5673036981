/**
 * Controller for the pricing editor page: load, edit via the draft,
 * preview the server-computed diff, submit, and surface the outcome
 * (applied changes, inline violations, or a stale-version prompt) as
 * plain state for the renderer.
 */

import { ApiClient, ApiError } from "./api.js";
import type { Change, Violation } from "./api.js";
import { EmptyDraftError, DraftInvalidError, PricingDraft } from "./draft.js";

export type SubmitOutcome =
  | { ok: true; version: number; changes: Change[] }
  | { ok: false; kind: "empty"; message: string }
  | { ok: false; kind: "invalid"; violations: Violation[] }
  | { ok: false; kind: "stale"; message: string };

export class PricingEditor {
  draft: PricingDraft | null = null;
  loadedVersion: number | null = null;

  constructor(private readonly api: ApiClient) {}

  async load(): Promise<PricingDraft> {
    const { version, pricing } = await this.api.getPricing();
    this.loadedVersion = version;
    this.draft = new PricingDraft(pricing);
    return this.draft;
  }

  private requireDraft(): PricingDraft {
    if (!this.draft) throw new Error("load() first");
    return this.draft;
  }

  /** Server-computed diff of the draft against the active pricing. */
  async previewDiff(): Promise<Change[]> {
    const { changes } = await this.api.previewDiff(this.requireDraft().previewDocument());
    return changes;
  }

  /**
   * PUT the draft. Guards run first, so an unchanged or locally
   * invalid draft never reaches the network.
   */
  async submit(): Promise<SubmitOutcome> {
    let document;
    try {
      document = this.requireDraft().submitDocument();
    } catch (error) {
      if (error instanceof EmptyDraftError) {
        return { ok: false, kind: "empty", message: error.message };
      }
      if (error instanceof DraftInvalidError) {
        return { ok: false, kind: "invalid", violations: error.problems };
      }
      throw error;
    }
    try {
      const { version, changes } = await this.api.putPricing(document);
      this.loadedVersion = version;
      this.draft = new PricingDraft(document);
      return { ok: true, version, changes };
    } catch (error) {
      if (error instanceof ApiError && error.status === 400) {
        return { ok: false, kind: "invalid", violations: error.violations };
      }
      if (error instanceof ApiError && error.status === 409) {
        return {
          ok: false,
          kind: "stale",
          message: `${error.message}; reload the editor to pick up the current version`,
        };
      }
      throw error;
    }
  }
}
