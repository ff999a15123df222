/** Session state machine: one uploaded image, debounced retarget requests,
 *  stale-response discarding by sequence number. */

import { ApiClient, CurvePoint, Plan, RetargetResponse, ServiceError } from "./api.js";

export type Badge = "warp-only" | "hybrid" | "crop-only";

/** Regime label from plan metadata: no crop means the warp absorbed the whole
 *  change; an unwarped mesh (factor 1) means cropping did; anything else is a
 *  mix of the two. */
export function badgeFor(plan: Plan): Badge {
  const crop = plan.crop_left + plan.crop_right;
  if (crop === 0) return "warp-only";
  if (plan.factor >= 1) return "crop-only";
  return "hybrid";
}

export interface SessionState {
  imageId: string;
  sourceWidth: number;
  sourceHeight: number;
  targetWidth: number;
  dt: number;
  omega0: number;
  plan: Plan | null;
  badge: Badge | null;
  resultImage: Blob | null;
  curve: CurvePoint[];
  error: string | null;
}

export interface SessionView {
  /** Called after every applied state change (result, curve, or error). */
  render(state: SessionState): void;
}

export const DEBOUNCE_MS = 80;
const MIN_FACTOR = 0.2;
const MAX_FACTOR = 2.0;
const CURVE_SAMPLES = 33;

type Timer = ReturnType<typeof setTimeout>;

export class Session {
  readonly state: SessionState;
  private seq = 0; // last issued request number
  private applied = 0; // newest request whose response was applied
  private inflight = false;
  private pendingSend = false;
  private timer: Timer | null = null;

  constructor(
    private api: ApiClient,
    info: { id: string; width: number; height: number },
    private view: SessionView,
    private debounceMs: number = DEBOUNCE_MS,
  ) {
    this.state = {
      imageId: info.id,
      sourceWidth: info.width,
      sourceHeight: info.height,
      targetWidth: info.width,
      dt: 1.0,
      omega0: 1.0,
      plan: null,
      badge: null,
      resultImage: null,
      curve: [],
      error: null,
    };
  }

  /** Slider/drag input: clamp, then debounce a single retarget request. */
  setTargetWidth(width: number): void {
    const lo = Math.round(this.state.sourceWidth * MIN_FACTOR);
    const hi = Math.round(this.state.sourceWidth * MAX_FACTOR);
    this.state.targetWidth = Math.min(hi, Math.max(lo, Math.round(width)));
    this.schedule();
  }

  setDt(dt: number): void {
    this.state.dt = Math.max(0, dt);
    this.schedule();
  }

  setOmega0(omega0: number): void {
    this.state.omega0 = Math.max(0, omega0);
    this.schedule();
  }

  private schedule(): void {
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => {
      this.timer = null;
      this.send();
    }, this.debounceMs);
  }

  /** At most one request in flight; a change made meanwhile queues exactly
   *  one follow-up with the latest parameters. */
  private send(): void {
    if (this.inflight) {
      this.pendingSend = true;
      return;
    }
    const seq = ++this.seq;
    this.inflight = true;
    const { imageId, targetWidth, dt, omega0 } = this.state;
    this.api
      .retarget(imageId, { width: targetWidth, dt, omega0 })
      .then((resp) => this.applyResult(seq, resp))
      .catch((err) => this.applyError(seq, err))
      .finally(() => {
        this.inflight = false;
        if (this.pendingSend) {
          this.pendingSend = false;
          this.send();
        }
      });
  }

  private applyResult(seq: number, resp: RetargetResponse): void {
    if (seq <= this.applied) return; // stale: a newer response already landed
    this.applied = seq;
    this.state.plan = resp.plan;
    this.state.badge = badgeFor(resp.plan);
    this.state.resultImage = resp.image;
    this.state.error = null;
    this.view.render(this.state);
  }

  private applyError(seq: number, err: unknown): void {
    if (seq <= this.applied) return;
    this.applied = seq;
    // keep the last good result on screen; surface only the message
    this.state.error =
      err instanceof ServiceError ? err.message : `request failed: ${String(err)}`;
    this.view.render(this.state);
  }

  /** Fetch the distortion-vs-factor curve down to the current factor floor. */
  async refreshCurve(): Promise<void> {
    const floor = Math.min(
      1.0,
      Math.max(MIN_FACTOR, this.state.targetWidth / this.state.sourceWidth),
    );
    try {
      this.state.curve = await this.api.curve(
        this.state.imageId,
        CURVE_SAMPLES,
        Math.min(floor, 0.5),
      );
      this.state.error = null;
    } catch (err) {
      this.state.error =
        err instanceof ServiceError ? err.message : `request failed: ${String(err)}`;
    }
    this.view.render(this.state);
  }

  /** Flush any pending debounce immediately (used on pointer-up). */
  flush(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
      this.send();
    }
  }
}

export async function startSession(
  api: ApiClient,
  bytes: Blob | ArrayBuffer,
  view: SessionView,
  debounceMs: number = DEBOUNCE_MS,
): Promise<Session> {
  const info = await api.upload(bytes);
  return new Session(api, info, view, debounceMs);
}
