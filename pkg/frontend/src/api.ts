/**
 * Typed client for the entitlement service HTTP API.
 *
 * The fetch implementation is injectable so tests can instrument or
 * fake the network. Every non-2xx response becomes an ApiError
 * carrying the machine code, except consume's LIMIT_EXHAUSTED, which
 * is a domain outcome (granted: false) rather than a failure.
 */

export interface PlanDoc {
  name: string;
  monthlyPrice?: number;
  featureValues?: Record<string, unknown>;
  limitValues?: Record<string, number>;
}

export interface FeatureDoc {
  name: string;
  description?: string;
  valueType?: "BOOLEAN" | "NUMERIC" | "TEXT";
  defaultValue?: unknown;
  expression?: string;
  attachedLimits?: string[];
}

export interface AddOnDoc {
  name: string;
  monthlyPrice?: number;
  featureValues?: Record<string, unknown>;
  limitDeltas?: Record<string, number>;
  dependsOnPlans?: string[];
}

export interface LimitDoc {
  name: string;
  unit?: string;
  defaultValue: number;
  scope?: "SUBSCRIPTION" | "ENTITY";
  period?: "LIFETIME" | "BILLING_PERIOD";
  contextKey?: string;
}

export interface PricingDocument {
  name: string;
  version: number;
  currency: string;
  features: FeatureDoc[];
  plans: PlanDoc[];
  addOns?: AddOnDoc[];
  usageLimits?: LimitDoc[];
}

export interface Violation {
  kind: string;
  path: string;
  message: string;
}

export interface Change {
  kind: string;
  path: string;
  old: unknown;
  new: unknown;
  impact: "SAFE" | "DEGRADES_EXISTING" | "NEEDS_MIGRATION";
}

export interface LimitStatusOut {
  limitName: string;
  used: number;
  max: number;
  remaining: number;
}

export interface FeatureStatusOut {
  enabled: boolean;
  value: unknown;
  reason: string;
  detail?: string;
  limit?: LimitStatusOut;
}

export interface EvaluationOut {
  subscriberId: string;
  pricingVersion: number;
  evaluatedAt?: string;
  statuses: Record<string, FeatureStatusOut>;
  diagnostics: string[];
}

export interface SubscriptionOut {
  subscriberId: string;
  plan: string;
  addOns: string[];
}

export interface ConsumeOut {
  granted: boolean;
  used: number;
  max: number;
  limitName: string;
  entityKey?: string;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly violations: Violation[] = [],
  ) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export interface ApiOptions {
  baseUrl: string;
  adminToken?: string;
  fetchImpl?: FetchLike;
}

async function errorFrom(response: Response): Promise<ApiError> {
  let code = "UNKNOWN";
  let message = `HTTP ${response.status}`;
  let violations: Violation[] = [];
  try {
    const body = (await response.json()) as Record<string, unknown>;
    if (typeof body["code"] === "string") code = body["code"];
    if (typeof body["message"] === "string") message = body["message"];
    if (Array.isArray(body["violations"])) violations = body["violations"] as Violation[];
  } catch {
    // non-JSON error body; keep the defaults
  }
  return new ApiError(response.status, code, message, violations);
}

export class ApiClient {
  private readonly baseUrl: string;
  private readonly adminToken: string | undefined;
  private readonly doFetch: FetchLike;

  constructor(options: ApiOptions) {
    this.baseUrl = options.baseUrl.replace(/\/$/, "");
    this.adminToken = options.adminToken;
    // fall back to the global, bound so browsers do not lose `this`
    this.doFetch = options.fetchImpl ?? ((input, init) => fetch(input, init));
  }

  private async request(
    method: string,
    path: string,
    options: { json?: unknown; rawBody?: string; admin?: boolean } = {},
  ): Promise<Response> {
    const headers: Record<string, string> = {};
    let body: string | undefined;
    if (options.rawBody !== undefined) {
      headers["Content-Type"] = "application/yaml";
      body = options.rawBody;
    } else if (options.json !== undefined) {
      headers["Content-Type"] = "application/json";
      body = JSON.stringify(options.json);
    }
    if (options.admin) {
      if (!this.adminToken) {
        throw new ApiError(401, "NOT_AUTHORIZED", "no admin token configured");
      }
      headers["Authorization"] = `Bearer ${this.adminToken}`;
    }
    return this.doFetch(`${this.baseUrl}${path}`, { method, headers, body });
  }

  private async expectJson<T>(response: Response): Promise<T> {
    if (!response.ok) throw await errorFrom(response);
    return (await response.json()) as T;
  }

  async health(): Promise<{ status: string; pricingVersion: number }> {
    return this.expectJson(await this.request("GET", "/healthz"));
  }

  async getPricing(): Promise<{ version: number; pricing: PricingDocument }> {
    return this.expectJson(await this.request("GET", "/pricing"));
  }

  /** JSON is valid YAML, so the document is sent as JSON text. */
  async putPricing(document: PricingDocument): Promise<{ version: number; changes: Change[] }> {
    return this.expectJson(
      await this.request("PUT", "/pricing", {
        rawBody: JSON.stringify(document),
        admin: true,
      }),
    );
  }

  async previewDiff(
    document: PricingDocument,
  ): Promise<{ from: number; to: number; changes: Change[] }> {
    return this.expectJson(
      await this.request("POST", "/pricing/diff", {
        rawBody: JSON.stringify(document),
        admin: true,
      }),
    );
  }

  async createSubscription(body: {
    plan: string;
    subscriberId?: string;
    addOns?: string[];
  }): Promise<SubscriptionOut> {
    return this.expectJson(await this.request("POST", "/subscriptions", { json: body }));
  }

  async getSubscription(id: string): Promise<SubscriptionOut> {
    return this.expectJson(
      await this.request("GET", `/subscriptions/${encodeURIComponent(id)}`),
    );
  }

  async evaluate(
    id: string,
    context?: Record<string, boolean | number | string>,
  ): Promise<{ result: EvaluationOut; token: string }> {
    return this.expectJson(
      await this.request("POST", `/subscriptions/${encodeURIComponent(id)}/evaluate`, {
        json: context ? { context } : {},
      }),
    );
  }

  /**
   * Reserve usage. A 409 LIMIT_EXHAUSTED is returned, not thrown: the
   * body still carries the counter state and a fresh token.
   */
  async consume(
    id: string,
    limit: string,
    amount = 1,
    entityKey?: string,
  ): Promise<{ granted: boolean; result: ConsumeOut; token: string }> {
    const response = await this.request(
      "POST",
      `/subscriptions/${encodeURIComponent(id)}/usage`,
      { json: { limit, amount, entityKey: entityKey ?? null } },
    );
    if (response.status === 409) {
      const body = (await response.json()) as Record<string, unknown>;
      if (body["code"] === "LIMIT_EXHAUSTED") {
        return {
          granted: false,
          result: body["result"] as ConsumeOut,
          token: body["token"] as string,
        };
      }
      throw new ApiError(409, String(body["code"] ?? "UNKNOWN"), String(body["message"] ?? ""));
    }
    const body = await this.expectJson<{ result: ConsumeOut; token: string }>(response);
    return { granted: true, ...body };
  }

  async demoKey(): Promise<string> {
    const body = await this.expectJson<{ key: string }>(
      await this.request("GET", "/demo/key"),
    );
    return body.key;
  }
}
