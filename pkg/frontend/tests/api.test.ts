import { describe, expect, it } from "vitest";

import { ApiError, Client } from "../src/api.js";

type Handler = (input: string, init?: RequestInit) => { status: number; body: unknown };

function clientWith(handler: Handler): { client: Client; calls: Array<{ url: string; init?: RequestInit }> } {
  const calls: Array<{ url: string; init?: RequestInit }> = [];
  const fetchImpl = async (input: string, init?: RequestInit): Promise<Response> => {
    calls.push({ url: input, init });
    const { status, body } = handler(input, init);
    return new Response(JSON.stringify(body), {
      status,
      headers: { "Content-Type": "application/json" },
    });
  };
  return { client: new Client("http://svc", fetchImpl), calls };
}

describe("Client", () => {
  it("joins the base url and parses json", async () => {
    const { client, calls } = clientWith(() => ({
      status: 200,
      body: { status: "ok", recipes: 50, flags: [] },
    }));
    const health = await client.health();
    expect(health.recipes).toBe(50);
    expect(calls[0].url).toBe("http://svc/health");
  });

  it("sends profile bodies with PUT", async () => {
    const { client, calls } = clientWith(() => ({
      status: 200,
      body: { user_id: "a b", version: 1, profile: {} },
    }));
    await client.putProfile("a b", { prefs: { hasNuts: 0 } });
    expect(calls[0].url).toBe("http://svc/profiles/a%20b");
    expect(calls[0].init?.method).toBe("PUT");
    expect(JSON.parse(String(calls[0].init?.body))).toEqual({ prefs: { hasNuts: 0 } });
  });

  it("maps error bodies onto ApiError", async () => {
    const { client } = clientWith(() => ({
      status: 400,
      body: { code: "invalid_profile", message: "preference for hasNuts must be -1, 0, or +1" },
    }));
    const err = await client.putProfile("u", { prefs: {} }).catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(400);
    expect(err.code).toBe("invalid_profile");
    expect(err.message).toMatch(/hasNuts/);
  });

  it("survives non-json error payloads", async () => {
    const fetchImpl = async (): Promise<Response> =>
      new Response("backend exploded", { status: 502 });
    const client = new Client("http://svc", fetchImpl);
    const err = await client.health().catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.code).toBe("http_error");
  });

  it("posts feedback with plan id and slot refs", async () => {
    const { client, calls } = clientWith(() => ({
      status: 200,
      body: { model_version: 2, samples_added: 1 },
    }));
    const out = await client.sendFeedback("p1", [
      { day: 0, meal: "lunch", slot: 1, accept: false },
    ]);
    expect(out.model_version).toBe(2);
    const sent = JSON.parse(String(calls[0].init?.body));
    expect(sent.plan_id).toBe("p1");
    expect(sent.slots).toHaveLength(1);
  });
});
