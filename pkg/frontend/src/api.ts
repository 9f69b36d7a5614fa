// Thin fetch client for the plan service. Non-2xx responses become ApiError
// carrying the service's machine-readable code and human message.

import type {
  ApiErrorBody,
  FeedbackResponse,
  PlanResponse,
  ProfileBody,
  ProfileResponse,
  RecipeSummary,
  ServiceDefaults,
  SlotRef,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly details: unknown[];

  constructor(status: number, body: ApiErrorBody) {
    super(body.message);
    this.name = "ApiError";
    this.status = status;
    this.code = body.code;
    this.details = body.details ?? [];
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class Client {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      ...init,
      headers: { "Content-Type": "application/json", ...(init?.headers ?? {}) },
    });
    if (!response.ok) {
      let body: ApiErrorBody;
      try {
        body = (await response.json()) as ApiErrorBody;
      } catch {
        body = { code: "http_error", message: `HTTP ${response.status}` };
      }
      throw new ApiError(response.status, body);
    }
    return (await response.json()) as T;
  }

  health(): Promise<{ status: string; recipes: number; flags: string[] }> {
    return this.request("/health");
  }

  defaults(): Promise<ServiceDefaults> {
    return this.request("/config/defaults");
  }

  async recipes(): Promise<RecipeSummary[]> {
    const body = await this.request<{ recipes: RecipeSummary[] }>("/recipes");
    return body.recipes;
  }

  putProfile(userId: string, body: ProfileBody): Promise<ProfileResponse> {
    return this.request(`/profiles/${encodeURIComponent(userId)}`, {
      method: "PUT",
      body: JSON.stringify(body),
    });
  }

  requestPlan(req: {
    user_id: string;
    horizon: number;
    algorithm: string;
    seed?: number;
  }): Promise<PlanResponse> {
    return this.request("/plans", { method: "POST", body: JSON.stringify(req) });
  }

  sendFeedback(planId: string, slots: SlotRef[]): Promise<FeedbackResponse> {
    return this.request("/feedback", {
      method: "POST",
      body: JSON.stringify({ plan_id: planId, slots }),
    });
  }
}
