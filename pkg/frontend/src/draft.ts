/**
 * An editable working copy of the pricing document.
 *
 * The draft tracks which paths were touched, runs the cheap client
 * side checks so obviously broken documents never reach the wire, and
 * refuses to produce a submit body when nothing actually changed.
 * The server remains the authority: its validation runs again on PUT
 * and its verdict wins.
 */

import type { PricingDocument, PlanDoc, Violation } from "./api.js";

export class EmptyDraftError extends Error {
  constructor() {
    super("no changes to submit");
    this.name = "EmptyDraftError";
  }
}

export class DraftInvalidError extends Error {
  constructor(readonly problems: Violation[]) {
    super(problems.map((p) => `${p.path}: ${p.message}`).join("; "));
    this.name = "DraftInvalidError";
  }
}

function deepCopy<T>(value: T): T {
  return JSON.parse(JSON.stringify(value)) as T;
}

/** Key-order independent serialization, for semantic comparison. */
function stableStringify(value: unknown): string {
  if (Array.isArray(value)) {
    return `[${value.map(stableStringify).join(",")}]`;
  }
  if (value !== null && typeof value === "object") {
    const entries = Object.entries(value as Record<string, unknown>)
      .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
      .map(([k, v]) => `${JSON.stringify(k)}:${stableStringify(v)}`);
    return `{${entries.join(",")}}`;
  }
  return JSON.stringify(value);
}

function withoutVersion(document: PricingDocument): Record<string, unknown> {
  const { version: _version, ...rest } = document;
  return rest;
}

export class PricingDraft {
  readonly baselineVersion: number;
  private readonly baseline: PricingDocument;
  private working: PricingDocument;
  private readonly touched = new Set<string>();

  constructor(baseline: PricingDocument) {
    this.baseline = deepCopy(baseline);
    this.working = deepCopy(baseline);
    this.baselineVersion = baseline.version;
  }

  /** A copy; mutating it does not affect the draft. */
  document(): PricingDocument {
    return deepCopy(this.working);
  }

  touchedPaths(): string[] {
    return [...this.touched].sort();
  }

  private plan(name: string): PlanDoc {
    const plan = this.working.plans.find((p) => p.name === name);
    if (!plan) throw new Error(`no plan named ${JSON.stringify(name)}`);
    return plan;
  }

  setPlanPrice(planName: string, price: number): void {
    this.plan(planName).monthlyPrice = price;
    this.touched.add(`plans.${planName}.monthlyPrice`);
  }

  setPlanLimit(planName: string, limitName: string, value: number): void {
    const plan = this.plan(planName);
    plan.limitValues = { ...(plan.limitValues ?? {}), [limitName]: value };
    this.touched.add(`plans.${planName}.limitValues.${limitName}`);
  }

  setPlanFeature(planName: string, featureName: string, value: unknown): void {
    const plan = this.plan(planName);
    plan.featureValues = { ...(plan.featureValues ?? {}), [featureName]: value };
    this.touched.add(`plans.${planName}.featureValues.${featureName}`);
  }

  clearPlanFeature(planName: string, featureName: string): void {
    const plan = this.plan(planName);
    if (plan.featureValues && featureName in plan.featureValues) {
      const { [featureName]: _gone, ...rest } = plan.featureValues;
      plan.featureValues = rest;
      this.touched.add(`plans.${planName}.featureValues.${featureName}`);
    }
  }

  /** Semantic difference against the loaded baseline, version aside. */
  isDirty(): boolean {
    return (
      stableStringify(withoutVersion(this.working)) !==
      stableStringify(withoutVersion(this.baseline))
    );
  }

  /** Client-side checks; the shape mirrors server violations. */
  validation(): Violation[] {
    const problems: Violation[] = [];
    const declaredType = new Map<string, string>();
    for (const feature of this.working.features) {
      declaredType.set(feature.name, feature.valueType ?? "BOOLEAN");
    }
    const declaredLimits = new Set((this.working.usageLimits ?? []).map((l) => l.name));
    for (const plan of this.working.plans) {
      const base = `plans.${plan.name}`;
      if (plan.monthlyPrice !== undefined && !(plan.monthlyPrice >= 0)) {
        problems.push({
          kind: "NegativePrice",
          path: `${base}.monthlyPrice`,
          message: "price must be zero or positive",
        });
      }
      for (const [limitName, value] of Object.entries(plan.limitValues ?? {})) {
        if (!declaredLimits.has(limitName)) {
          problems.push({
            kind: "DanglingReference",
            path: `${base}.limitValues.${limitName}`,
            message: "no such usage limit",
          });
        }
        if (typeof value !== "number" || !Number.isFinite(value) || value < 0) {
          problems.push({
            kind: "NegativeLimit",
            path: `${base}.limitValues.${limitName}`,
            message: "limit values must be finite and zero or positive",
          });
        }
      }
      for (const [featureName, value] of Object.entries(plan.featureValues ?? {})) {
        const type = declaredType.get(featureName);
        if (type === undefined) {
          problems.push({
            kind: "DanglingReference",
            path: `${base}.featureValues.${featureName}`,
            message: "no such feature",
          });
          continue;
        }
        const ok =
          (type === "BOOLEAN" && typeof value === "boolean") ||
          (type === "NUMERIC" && typeof value === "number") ||
          (type === "TEXT" && typeof value === "string");
        if (!ok) {
          problems.push({
            kind: "TypeMismatch",
            path: `${base}.featureValues.${featureName}`,
            message: `value does not match the feature's ${type} type`,
          });
        }
      }
    }
    return problems;
  }

  canSubmit(): boolean {
    return this.isDirty() && this.validation().length === 0;
  }

  /**
   * The document to PUT, with the version bumped past the baseline.
   * Throws EmptyDraftError on a no-op edit and DraftInvalidError when
   * client-side validation fails; a clean load-then-submit can never
   * bump the server version.
   */
  submitDocument(): PricingDocument {
    if (!this.isDirty()) throw new EmptyDraftError();
    const problems = this.validation();
    if (problems.length > 0) throw new DraftInvalidError(problems);
    return { ...deepCopy(this.working), version: this.baselineVersion + 1 };
  }

  /** Preview body: same version bump, but allowed while invalid or clean. */
  previewDocument(): PricingDocument {
    return { ...deepCopy(this.working), version: this.baselineVersion + 1 };
  }
}
