/** Page wiring: upload, sliders, result/overlay canvases, curve plot. */

import { createApiClient } from "./api.js";
import { drawCurve, layoutCurve, PlotBox } from "./curve.js";
import { cropBands, drawCropBands, drawImportance } from "./overlay.js";
import { Session, SessionState, startSession } from "./session.js";

const api = createApiClient("");

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

const fileInput = byId<HTMLInputElement>("file");
const widthSlider = byId<HTMLInputElement>("width");
const widthLabel = byId<HTMLSpanElement>("width-label");
const dtSlider = byId<HTMLInputElement>("dt");
const dtLabel = byId<HTMLSpanElement>("dt-label");
const badgeEl = byId<HTMLSpanElement>("badge");
const distortionEl = byId<HTMLSpanElement>("distortion");
const toastEl = byId<HTMLDivElement>("toast");
const resultCanvas = byId<HTMLCanvasElement>("result");
const overlayCanvas = byId<HTMLCanvasElement>("overlay");
const curveCanvas = byId<HTMLCanvasElement>("curve-plot");

const curveBox: PlotBox = { width: curveCanvas.width, height: curveCanvas.height, pad: 12 };

let session: Session | null = null;
let sourceBitmap: ImageBitmap | null = null;
let importanceBitmap: ImageBitmap | null = null;

function showToast(message: string): void {
  toastEl.textContent = message;
  toastEl.classList.add("visible");
  setTimeout(() => toastEl.classList.remove("visible"), 4000);
}

async function renderResult(state: SessionState): Promise<void> {
  if (state.error) showToast(state.error);
  if (state.badge) {
    badgeEl.textContent = state.badge;
    badgeEl.dataset.badge = state.badge;
  }
  if (state.plan) {
    distortionEl.textContent = `D = ${state.plan.distortion.toFixed(3)}`;
  }
  if (state.resultImage) {
    const bmp = await createImageBitmap(state.resultImage);
    resultCanvas.width = bmp.width;
    resultCanvas.height = bmp.height;
    resultCanvas.getContext("2d")!.drawImage(bmp, 0, 0);
    bmp.close();
  }
  if (sourceBitmap && state.plan) {
    overlayCanvas.width = sourceBitmap.width;
    overlayCanvas.height = sourceBitmap.height;
    const ctx = overlayCanvas.getContext("2d")!;
    ctx.drawImage(sourceBitmap, 0, 0);
    if (importanceBitmap) {
      drawImportance(ctx, importanceBitmap, sourceBitmap.width, sourceBitmap.height);
    }
    drawCropBands(ctx, cropBands(state.plan, sourceBitmap.width), sourceBitmap.height);
  }
  drawCurve(
    curveCanvas.getContext("2d")!,
    layoutCurve(state.curve, state.dt, state.plan, curveBox),
    curveBox,
  );
}

const view = {
  render(state: SessionState): void {
    void renderResult(state);
  },
};

fileInput.addEventListener("change", async () => {
  const file = fileInput.files?.[0];
  if (!file) return;
  try {
    session = await startSession(api, file, view);
  } catch (err) {
    showToast(String(err));
    return;
  }
  sourceBitmap = await createImageBitmap(file);
  const impResp = await fetch(api.importanceUrl(session.state.imageId));
  importanceBitmap = impResp.ok ? await createImageBitmap(await impResp.blob()) : null;

  widthSlider.min = String(Math.round(session.state.sourceWidth * 0.2));
  widthSlider.max = String(Math.round(session.state.sourceWidth * 2.0));
  widthSlider.value = String(session.state.sourceWidth);
  widthLabel.textContent = `${session.state.sourceWidth}px`;
  session.setTargetWidth(session.state.sourceWidth);
  void session.refreshCurve();
});

widthSlider.addEventListener("input", () => {
  if (!session) return;
  session.setTargetWidth(Number(widthSlider.value));
  widthLabel.textContent = `${session.state.targetWidth}px`;
});
widthSlider.addEventListener("change", () => {
  session?.flush();
  void session?.refreshCurve();
});

dtSlider.addEventListener("input", () => {
  if (!session) return;
  session.setDt(Number(dtSlider.value));
  dtLabel.textContent = session.state.dt.toFixed(2);
});
dtSlider.addEventListener("change", () => session?.flush());
