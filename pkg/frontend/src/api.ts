/** Typed client for the retarget preview service. All pixels and numbers the
 *  UI displays come from these endpoints; nothing is computed locally. */

export interface UploadInfo {
  id: string;
  width: number;
  height: number;
}

export interface Plan {
  factor: number;
  distortion: number;
  crop_left: number;
  crop_right: number;
  reached_target: boolean;
  scale_fallback: boolean;
  vertical?: Plan | null;
}

export interface RetargetResponse {
  image: Blob;
  plan: Plan;
  timingsMs: Record<string, number>;
}

export interface CurvePoint {
  factor: number;
  d: number;
}

export interface RetargetParams {
  width: number;
  dt?: number;
  omega0?: number;
  allowScaleFallback?: boolean;
}

export interface ApiClient {
  upload(bytes: Blob | ArrayBuffer): Promise<UploadInfo>;
  importanceUrl(id: string): string;
  retarget(id: string, params: RetargetParams): Promise<RetargetResponse>;
  curve(id: string, samples: number, factor: number, dt?: number): Promise<CurvePoint[]>;
}

export class ServiceError extends Error {
  constructor(public status: number, public detail: string) {
    super(`service error ${status}: ${detail}`);
  }
}

type Fetch = typeof fetch;

export function createApiClient(baseUrl = "", fetchFn: Fetch = fetch): ApiClient {
  async function fail(resp: Response): Promise<never> {
    let detail = resp.statusText;
    try {
      const body = await resp.json();
      if (body && typeof body.detail === "string") detail = body.detail;
    } catch {
      /* non-JSON error body */
    }
    throw new ServiceError(resp.status, detail);
  }

  return {
    async upload(bytes) {
      const resp = await fetchFn(`${baseUrl}/images`, {
        method: "POST",
        headers: { "Content-Type": "application/octet-stream" },
        body: bytes,
      });
      if (!resp.ok) return fail(resp);
      return (await resp.json()) as UploadInfo;
    },

    importanceUrl(id) {
      return `${baseUrl}/images/${id}/importance`;
    },

    async retarget(id, params) {
      const q = new URLSearchParams({ width: String(params.width) });
      if (params.dt !== undefined) q.set("dt", String(params.dt));
      if (params.omega0 !== undefined) q.set("omega0", String(params.omega0));
      if (params.allowScaleFallback) q.set("allow_scale_fallback", "true");
      const resp = await fetchFn(`${baseUrl}/images/${id}/retarget?${q}`);
      if (!resp.ok) return fail(resp);
      const plan = JSON.parse(resp.headers.get("X-Retarget-Plan") ?? "{}") as Plan;
      const timingsMs = JSON.parse(
        resp.headers.get("X-Retarget-Timings") ?? "{}",
      ) as Record<string, number>;
      return { image: await resp.blob(), plan, timingsMs };
    },

    async curve(id, samples, factor, dt) {
      const q = new URLSearchParams({
        samples: String(samples),
        factor: String(factor),
      });
      if (dt !== undefined) q.set("dt", String(dt));
      const resp = await fetchFn(`${baseUrl}/images/${id}/curve?${q}`);
      if (!resp.ok) return fail(resp);
      return (await resp.json()) as CurvePoint[];
    },
  };
}
