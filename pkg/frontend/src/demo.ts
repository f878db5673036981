/**
 * Controller for the demo page.
 *
 * The server is consulted exactly once per page load (one evaluate)
 * and once per action (one consume, whose response already carries a
 * fresh token), never per toggle. Every render decision flows through
 * verifyToken + deriveUiState, so the page cannot be coaxed into
 * showing a feature by editing local state: the next derivation
 * starts from the signed token again.
 */

import { ApiClient, ApiError } from "./api.js";
import { deriveUiState, PET_LIMIT_FEATURE, VISIT_LIMIT_FEATURE } from "./gates.js";
import type { UiState } from "./gates.js";
import { decodeKey, verifyToken } from "./token.js";
import type { TokenPayload } from "./token.js";

export class DemoPage {
  state: UiState;
  private key: Uint8Array | null = null;
  private payload: TokenPayload | null = null;
  private readonly now: () => number;

  constructor(
    private readonly api: ApiClient,
    readonly subscriberId: string,
    options: { now?: () => number } = {},
  ) {
    this.now = options.now ?? (() => Math.floor(Date.now() / 1000));
    this.state = deriveUiState({ kind: "MALFORMED", detail: "not loaded" });
  }

  /** Create the subscription if needed, fetch the demo key, evaluate once. */
  async init(plan: string, addOns: string[] = []): Promise<void> {
    try {
      await this.api.createSubscription({
        subscriberId: this.subscriberId,
        plan,
        addOns,
      });
    } catch (error) {
      // an existing subscription is fine; anything else is not
      if (!(error instanceof ApiError && error.status === 409)) throw error;
    }
    this.key = decodeKey(await this.api.demoKey());
    await this.refresh();
  }

  private async adopt(token: string): Promise<void> {
    if (this.key === null) throw new Error("init() first");
    const verdict = await verifyToken(token, this.key, this.now());
    this.payload = verdict.kind === "VALID" ? (verdict.payload ?? null) : null;
    this.state = deriveUiState(verdict);
  }

  /** One evaluate call; all gates re-derive from its token. */
  async refresh(): Promise<void> {
    const { token } = await this.api.evaluate(this.subscriberId);
    await this.adopt(token);
  }

  /** Re-evaluate silently when the current token has aged out. */
  async ensureFresh(): Promise<void> {
    if (this.payload === null || this.now() >= this.payload.exp) {
      await this.refresh();
    }
  }

  /**
   * One consume call; the response token re-renders the page, so a
   * grant or a freshly exhausted limit shows up without a second
   * request.
   */
  async addPet(): Promise<boolean> {
    const { granted, token } = await this.api.consume(
      this.subscriberId,
      PET_LIMIT_FEATURE,
    );
    await this.adopt(token);
    return granted;
  }

  async bookVisit(petName: string): Promise<boolean> {
    const { granted, token } = await this.api.consume(
      this.subscriberId,
      VISIT_LIMIT_FEATURE,
      1,
      petName,
    );
    await this.adopt(token);
    return granted;
  }
}
