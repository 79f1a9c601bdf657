import assert from "node:assert/strict";
import { test } from "node:test";
import { CanvasMapping, sensingExtent } from "../src/coords.js";
const PAD16 = sensingExtent(16, 16, 3.0, 0.254);
test("sensing extent matches the grid formula", () => {
    assert.ok(Math.abs(PAD16.widthM - 0.045254) < 1e-9);
    assert.ok(Math.abs(PAD16.heightM - 0.045254) < 1e-9);
});
test("canvas-pad-canvas round trip stays within one canvas pixel", () => {
    const mapping = new CanvasMapping(PAD16, 452, 452);
    for (let px = 0; px <= 452; px += 7) {
        for (let py = 0; py <= 452; py += 11) {
            const pad = mapping.canvasToPad(px, py);
            const back = mapping.padToCanvas(pad.x, pad.y);
            assert.ok(Math.abs(back.px - px) < 1.0);
            assert.ok(Math.abs(back.py - py) < 1.0);
        }
    }
});
test("a 4 cm drag spans 4 cm of pad coordinates", () => {
    const mapping = new CanvasMapping(PAD16, 452, 452);
    const pxPerMeter = 452 / PAD16.widthM;
    const start = mapping.canvasToPad(10, 10);
    const end = mapping.canvasToPad(10 + 0.04 * pxPerMeter, 10);
    assert.ok(Math.abs(end.x - start.x - 0.04) < 1e-6);
});
test("inside() bounds the canvas", () => {
    const mapping = new CanvasMapping(PAD16, 100, 100);
    assert.ok(mapping.inside(0, 0));
    assert.ok(mapping.inside(100, 100));
    assert.ok(!mapping.inside(-1, 50));
    assert.ok(!mapping.inside(50, 101));
});
//# sourceMappingURL=coords.test.js.map