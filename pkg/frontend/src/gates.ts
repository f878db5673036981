/**
 * Render decisions, derived from a token verdict and nothing else.
 *
 * deriveUiState is a pure function: same verdict in, same state out,
 * and the returned object is deeply frozen. Anything other than a
 * VALID verdict yields the closed state, so a forged, tampered or
 * stale token can never open a gate. Callers re-derive instead of
 * mutating.
 */

import type { FeatureClaim, TokenVerdict } from "./token.js";

/** The toggles the demo page renders as sections. */
export const UI_FEATURES = [
  "appointments calendar",
  "vet selection",
  "pet dashboard",
  "online consultations",
  "smart clinic reports",
  "adoption centre",
] as const;

export const PET_LIMIT_FEATURE = "pets per owner";
export const VISIT_LIMIT_FEATURE = "max visits";
export const SUPPORT_FEATURE = "support priority";

export interface CounterGate {
  /** render the action button at all */
  visible: boolean;
  used: number | null;
  max: number | null;
  /** show the "limit reached" notice instead of the button */
  limitReached: boolean;
}

export interface UiState {
  /** true only for a VALID verdict */
  authorized: boolean;
  plan: string | null;
  addOns: string[];
  pricingVersion: number | null;
  expiresAt: number | null;
  /** one entry per UI_FEATURES name */
  features: Record<string, boolean>;
  addPet: CounterGate;
  bookVisit: CounterGate;
  supportPriority: string | null;
}

const CLOSED_GATE: CounterGate = {
  visible: false,
  used: null,
  max: null,
  limitReached: false,
};

function closedState(): UiState {
  const features: Record<string, boolean> = {};
  for (const name of UI_FEATURES) features[name] = false;
  return {
    authorized: false,
    plan: null,
    addOns: [],
    pricingVersion: null,
    expiresAt: null,
    features,
    addPet: { ...CLOSED_GATE },
    bookVisit: { ...CLOSED_GATE },
    supportPriority: null,
  };
}

function counterGate(claim: FeatureClaim | undefined): CounterGate {
  if (claim === undefined) return { ...CLOSED_GATE };
  const used = claim.l ? claim.l.u : null;
  const max = claim.l ? claim.l.m : null;
  return {
    visible: claim.e === true,
    used,
    max,
    limitReached: used !== null && max !== null && used >= max,
  };
}

function deepFreeze<T>(value: T): T {
  if (value !== null && typeof value === "object") {
    for (const child of Object.values(value as object)) deepFreeze(child);
    Object.freeze(value);
  }
  return value;
}

export function deriveUiState(verdict: TokenVerdict): UiState {
  if (verdict.kind !== "VALID" || verdict.payload === undefined) {
    return deepFreeze(closedState());
  }
  const payload = verdict.payload;
  const claims = payload.features ?? {};
  const features: Record<string, boolean> = {};
  for (const name of UI_FEATURES) {
    features[name] = claims[name]?.e === true;
  }
  const support = claims[SUPPORT_FEATURE];
  return deepFreeze({
    authorized: true,
    plan: payload.plan ?? null,
    addOns: [...(payload.addOns ?? [])],
    pricingVersion: payload.ver ?? null,
    expiresAt: payload.exp,
    features,
    addPet: counterGate(claims[PET_LIMIT_FEATURE]),
    bookVisit: counterGate(claims[VISIT_LIMIT_FEATURE]),
    supportPriority:
      support?.e === true && typeof support.v === "string" ? support.v : null,
  });
}
