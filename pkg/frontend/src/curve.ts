/** Distortion-vs-factor plot: layout as plain data, drawing on canvas.
 *  Shows the service-supplied curve, a horizontal line at the current D_t,
 *  and a marker at the operating point. */

import { CurvePoint, Plan } from "./api.js";

export interface CurveLayout {
  /** Polyline points in pixel space, left (factor 1.0) to right. */
  line: Array<{ x: number; y: number }>;
  /** y of the D_t threshold line, or null when off-scale. */
  thresholdY: number | null;
  /** Operating-point marker, or null before the first plan. */
  marker: { x: number; y: number } | null;
}

export interface PlotBox {
  width: number;
  height: number;
  pad: number;
}

export function layoutCurve(
  curve: CurvePoint[],
  dt: number,
  plan: Plan | null,
  box: PlotBox,
): CurveLayout {
  if (curve.length === 0) return { line: [], thresholdY: null, marker: null };
  const fmin = Math.min(...curve.map((p) => p.factor));
  const fmax = Math.max(...curve.map((p) => p.factor));
  // scale to the data, not D_t, so an extreme threshold can't flatten the
  // curve; the threshold line simply falls off-scale then
  const dmax =
    Math.max(1e-9, plan ? plan.distortion : 0, ...curve.map((p) => p.d)) * 1.05;
  const span = Math.max(1e-9, fmax - fmin);
  const innerW = box.width - 2 * box.pad;
  const innerH = box.height - 2 * box.pad;
  // factor decreases left to right: dragging smaller moves the marker right
  const toX = (f: number) => box.pad + ((fmax - f) / span) * innerW;
  const toY = (d: number) => box.pad + (1 - d / dmax) * innerH;

  const line = curve.map((p) => ({ x: toX(p.factor), y: toY(p.d) }));
  const thresholdY = dt <= dmax ? toY(dt) : null;
  let marker: { x: number; y: number } | null = null;
  if (plan) {
    const f = Math.min(fmax, Math.max(fmin, plan.factor));
    marker = { x: toX(f), y: toY(Math.min(plan.distortion, dmax)) };
  }
  return { line, thresholdY, marker };
}

export function drawCurve(ctx: CanvasRenderingContext2D, layout: CurveLayout, box: PlotBox): void {
  ctx.clearRect(0, 0, box.width, box.height);
  if (layout.line.length === 0) return;
  ctx.save();

  if (layout.thresholdY !== null) {
    ctx.strokeStyle = "rgba(40, 120, 220, 0.7)";
    ctx.setLineDash([5, 4]);
    ctx.beginPath();
    ctx.moveTo(box.pad, layout.thresholdY);
    ctx.lineTo(box.width - box.pad, layout.thresholdY);
    ctx.stroke();
    ctx.setLineDash([]);
  }

  ctx.strokeStyle = "#333";
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  layout.line.forEach((p, i) => (i === 0 ? ctx.moveTo(p.x, p.y) : ctx.lineTo(p.x, p.y)));
  ctx.stroke();

  if (layout.marker) {
    ctx.fillStyle = "rgb(220, 40, 40)";
    ctx.beginPath();
    ctx.arc(layout.marker.x, layout.marker.y, 4, 0, 2 * Math.PI);
    ctx.fill();
  }
  ctx.restore();
}
