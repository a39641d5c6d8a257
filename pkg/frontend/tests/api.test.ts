import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";

interface Recorded {
  url: string;
  method: string;
  body: unknown;
}

function mockClient(payloads: Record<string, unknown>, status = 200) {
  const calls: Recorded[] = [];
  const fetchImpl = (async (url: string, init?: RequestInit) => {
    calls.push({
      url: String(url),
      method: init?.method ?? "GET",
      body: init?.body ? JSON.parse(String(init.body)) : undefined,
    });
    const path = String(url).replace("http://test", "").split("?")[0]!;
    return {
      ok: status < 400,
      status,
      json: async () => payloads[path] ?? {},
    } as Response;
  }) as typeof fetch;
  return { api: new ApiClient("http://test", fetchImpl), calls };
}

describe("ApiClient", () => {
  it("builds search request bodies exactly as the gateway expects", async () => {
    const { api, calls } = mockClient({
      "/search/concept": { feature: "concept_search", parameters: {}, issued_at_ms: 0, entries: [] },
    });
    await api.conceptSearch("s1", "faces texts", 0.4, 7);
    expect(calls[0]).toEqual({
      url: "http://test/search/concept",
      method: "POST",
      body: { session: "s1", query: "faces texts", theta: 0.4, limit: 7 },
    });
  });

  it("sends sketch cells verbatim with min_match", async () => {
    const { api, calls } = mockClient({ "/search/sketch": { entries: [] } });
    await api.sketchSearch("s1", { "4": 8, "0": 3 }, 2);
    expect(calls[0]!.body).toEqual({ session: "s1", cells: { "4": 8, "0": 3 }, min_match: 2 });
  });

  it("url-encodes path parameters", async () => {
    const { api, calls } = mockClient({ "/maps/concept:faces": { cells: [] } });
    await api.getMap("concept:faces");
    expect(calls[0]!.url).toBe("http://test/maps/concept%3Afaces");
  });

  it("passes query and session to the map listing", async () => {
    const { api, calls } = mockClient({ "/maps": { maps: [] } });
    await api.listMaps("faces", "s1");
    expect(calls[0]!.url).toBe("http://test/maps?query=faces&session=s1");
    await api.listMaps();
    expect(calls[1]!.url).toBe("http://test/maps");
  });

  it("unwraps session tokens and nullable results", async () => {
    const { api } = mockClient({
      "/sessions": { session: "tok", user: "u", role: "expert" },
      "/history/back": { results: null },
    });
    expect(await api.createSession("u", "expert")).toBe("tok");
    expect(await api.historyBack("tok")).toBeNull();
  });

  it("submits shots with the gateway's field names", async () => {
    const { api, calls } = mockClient({
      "/tasks/avs1/submit": { verdict: "correct", score_delta: 10 },
    });
    const judgment = await api.submit("avs1", "s1", "v01", 3, 7.5);
    expect(calls[0]!.body).toEqual({
      session: "s1",
      video: "v01",
      shot_index: 3,
      timestamp_sec: 7.5,
      at_sec: null,
    });
    expect(judgment.verdict).toBe("correct");
  });

  it("raises ApiError with the server's error name", async () => {
    const { api } = mockClient(
      { "/search/concept": { error: "BlankQuery", detail: "query is blank" } },
      400,
    );
    await expect(api.conceptSearch("s1", "  ")).rejects.toThrowError(ApiError);
    await expect(api.conceptSearch("s1", "  ")).rejects.toThrow(/BlankQuery/);
  });

  it("derives the websocket url from the base url", () => {
    const { api } = mockClient({});
    expect(api.collabUrl("team one")).toBe("ws://test/collab/team%20one");
  });
});
