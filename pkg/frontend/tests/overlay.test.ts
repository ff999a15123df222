import { describe, expect, it } from "vitest";

import { Plan } from "../src/api.js";
import { cropBands, HEAT_OPACITY } from "../src/overlay.js";
import { layoutCurve } from "../src/curve.js";

const plan = (factor: number, left: number, right: number): Plan => ({
  factor,
  distortion: 0.5,
  crop_left: left,
  crop_right: right,
  reached_target: true,
  scale_fallback: false,
});

describe("cropBands", () => {
  it("is empty for warp-only plans", () => {
    expect(cropBands(plan(0.5, 0, 0), 160)).toEqual([]);
  });

  it("maps crop-only margins straight to source pixels", () => {
    expect(cropBands(plan(1.0, 40, 40), 160)).toEqual([
      { x: 0, width: 40 },
      { x: 120, width: 40 },
    ]);
  });

  it("scales hybrid crops back through the warp factor", () => {
    // 10 warped px cropped at factor 0.5 correspond to 20 source px
    expect(cropBands(plan(0.5, 10, 0), 160)).toEqual([{ x: 0, width: 20 }]);
  });

  it("never exceeds the source extent", () => {
    const bands = cropBands(plan(0.25, 50, 50), 160);
    for (const b of bands) {
      expect(b.x).toBeGreaterThanOrEqual(0);
      expect(b.x + b.width).toBeLessThanOrEqual(160);
    }
  });
});

describe("overlay constants", () => {
  it("renders importance at 40% opacity", () => {
    expect(HEAT_OPACITY).toBe(0.4);
  });
});

describe("layoutCurve", () => {
  const box = { width: 200, height: 100, pad: 10 };
  const curve = [
    { factor: 1.0, d: 0.0 },
    { factor: 0.75, d: 0.5 },
    { factor: 0.5, d: 1.2 },
  ];

  it("runs left-to-right as the factor decreases, monotonically down in y", () => {
    const layout = layoutCurve(curve, 1.0, null, box);
    expect(layout.line.length).toBe(3);
    expect(layout.line[0].x).toBeLessThan(layout.line[1].x);
    expect(layout.line[1].x).toBeLessThan(layout.line[2].x);
    // higher distortion plots lower y value (screen-up)
    expect(layout.line[0].y).toBeGreaterThan(layout.line[2].y);
  });

  it("places the threshold line at the D_t height and the marker on the plan", () => {
    const p = plan(0.75, 5, 5);
    p.distortion = 0.5;
    const layout = layoutCurve(curve, 0.5, p, box);
    expect(layout.thresholdY).not.toBeNull();
    expect(layout.marker).not.toBeNull();
    // operating point sits at D = D_t, so marker y equals the threshold line
    expect(layout.marker!.y).toBeCloseTo(layout.thresholdY!, 6);
    // and x matches the curve point at factor 0.75
    expect(layout.marker!.x).toBeCloseTo(layout.line[1].x, 6);
  });

  it("drops the threshold line when D_t is far off-scale", () => {
    const layout = layoutCurve(curve, 1e6, null, box);
    expect(layout.thresholdY).toBeNull();
  });

  it("handles an empty curve", () => {
    expect(layoutCurve([], 1.0, null, box)).toEqual({
      line: [],
      thresholdY: null,
      marker: null,
    });
  });
});
