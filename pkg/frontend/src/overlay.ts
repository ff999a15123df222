/** Overlay geometry and drawing: importance heat at 40% opacity, crop
 *  margins as hatched bands. Geometry is computed in plain data so it can be
 *  tested without a DOM; drawing targets the canvas 2D context. */

import { Plan } from "./api.js";

export const HEAT_OPACITY = 0.4;
const HATCH_STEP = 8;

export interface CropBand {
  x: number;
  width: number;
}

/** Left/right hatched bands in *source* pixel coordinates.
 *
 *  Plan crops are expressed on the intermediate (warped) raster; mapping them
 *  back through the uniform part of the warp by 1/factor gives the source
 *  extent the viewer actually loses. */
export function cropBands(plan: Plan, sourceWidth: number): CropBand[] {
  const bands: CropBand[] = [];
  const scale = plan.factor > 0 ? 1 / plan.factor : 1;
  const left = Math.round(plan.crop_left * scale);
  const right = Math.round(plan.crop_right * scale);
  if (left > 0) bands.push({ x: 0, width: Math.min(left, sourceWidth) });
  if (right > 0) {
    const w = Math.min(right, sourceWidth);
    bands.push({ x: sourceWidth - w, width: w });
  }
  return bands;
}

/** Draw the grayscale importance image over the source at 40% opacity with a
 *  red-tinted heat ramp. */
export function drawImportance(
  ctx: CanvasRenderingContext2D,
  importance: CanvasImageSource,
  width: number,
  height: number,
): void {
  ctx.save();
  ctx.globalAlpha = HEAT_OPACITY;
  ctx.drawImage(importance, 0, 0, width, height);
  ctx.globalCompositeOperation = "multiply";
  ctx.fillStyle = "rgb(255, 96, 32)";
  ctx.fillRect(0, 0, width, height);
  ctx.restore();
}

/** Hatch the cropped margins so removed content reads differently from
 *  merely unimportant content. */
export function drawCropBands(
  ctx: CanvasRenderingContext2D,
  bands: CropBand[],
  height: number,
): void {
  ctx.save();
  ctx.strokeStyle = "rgba(220, 40, 40, 0.85)";
  ctx.lineWidth = 1.5;
  for (const band of bands) {
    ctx.beginPath();
    ctx.rect(band.x, 0, band.width, height);
    ctx.clip();
    ctx.beginPath();
    for (let x = band.x - height; x < band.x + band.width; x += HATCH_STEP) {
      ctx.moveTo(x, 0);
      ctx.lineTo(x + height, height);
    }
    ctx.stroke();
    ctx.strokeRect(band.x, 0, band.width, height);
    ctx.restore();
    ctx.save();
    ctx.strokeStyle = "rgba(220, 40, 40, 0.85)";
    ctx.lineWidth = 1.5;
  }
  ctx.restore();
}
