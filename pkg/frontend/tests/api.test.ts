import { describe, expect, it } from "vitest";

import { createApiClient, ServiceError } from "../src/api.js";

function jsonResponse(body: unknown, init: ResponseInit = {}): Response {
  return new Response(JSON.stringify(body), {
    status: 200,
    headers: { "Content-Type": "application/json" },
    ...init,
  });
}

describe("api client", () => {
  it("uploads raw bytes and returns the image record", async () => {
    const calls: Array<{ url: string; init?: RequestInit }> = [];
    const api = createApiClient("http://svc", async (url, init) => {
      calls.push({ url: String(url), init });
      return jsonResponse({ id: "deadbeefcafe0123", width: 160, height: 120 });
    });
    const info = await api.upload(new ArrayBuffer(4));
    expect(info).toEqual({ id: "deadbeefcafe0123", width: 160, height: 120 });
    expect(calls[0].url).toBe("http://svc/images");
    expect(calls[0].init?.method).toBe("POST");
  });

  it("parses plan and timings from response headers", async () => {
    const plan = {
      factor: 0.7, distortion: 0.9, crop_left: 3, crop_right: 4,
      reached_target: false, scale_fallback: false,
    };
    const api = createApiClient("", async (url) => {
      expect(String(url)).toBe("/images/abc/retarget?width=80&dt=1&omega0=1");
      return new Response(new Blob([new Uint8Array(8)]), {
        status: 200,
        headers: {
          "X-Retarget-Plan": JSON.stringify(plan),
          "X-Retarget-Timings": JSON.stringify({ render: 12.5 }),
        },
      });
    });
    const resp = await api.retarget("abc", { width: 80, dt: 1, omega0: 1 });
    expect(resp.plan).toEqual(plan);
    expect(resp.timingsMs.render).toBe(12.5);
  });

  it("surfaces engine error details with the status code", async () => {
    const api = createApiClient("", async () =>
      jsonResponse({ detail: "distortion budget exceeded" }, { status: 409 }),
    );
    await expect(api.retarget("abc", { width: 900, dt: 0.01 })).rejects.toThrowError(
      ServiceError,
    );
    await expect(api.retarget("abc", { width: 900, dt: 0.01 })).rejects.toThrow(
      /409.*distortion budget exceeded/,
    );
  });

  it("requests the curve with sample count and factor floor", async () => {
    const api = createApiClient("", async (url) => {
      expect(String(url)).toBe("/images/abc/curve?samples=11&factor=0.5");
      return jsonResponse([{ factor: 1.0, d: 0.0 }]);
    });
    const curve = await api.curve("abc", 11, 0.5);
    expect(curve[0]).toEqual({ factor: 1.0, d: 0.0 });
  });
});
