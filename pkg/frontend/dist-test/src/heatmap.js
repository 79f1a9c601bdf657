/**
 * Grid rendering helpers, DOM-free so they can be unit tested headlessly.
 *
 * Continuous stages render as a black-red-yellow-white heat ramp over the
 * frame's own maximum; the binary stage renders two-tone. Both produce
 * RGBA byte arrays one pixel per grid cell; the canvas layer scales them
 * up with nearest-neighbor.
 */
export const BINARY_OFF = [24, 24, 32];
export const BINARY_ON = [235, 235, 220];
/** Heat color for a normalized value in [0, 1]. */
export function heatColor(v) {
    const t = Math.max(0, Math.min(1, v));
    if (t <= 1 / 3) {
        return [Math.round(3 * t * 255), 0, 0];
    }
    if (t <= 2 / 3) {
        return [255, Math.round((3 * t - 1) * 255), 0];
    }
    return [255, 255, Math.round((3 * t - 2) * 255)];
}
export function binaryColor(v) {
    return v > 0 ? BINARY_ON : BINARY_OFF;
}
/**
 * RGBA bytes (rows*cols*4) for a stage grid. Continuous stages are scaled
 * by the frame maximum; an all-zero frame renders uniformly dark.
 */
export function gridToRgba(values, binary) {
    const out = new Uint8ClampedArray(values.length * 4);
    let peak = 0;
    if (!binary) {
        for (const v of values) {
            if (v > peak)
                peak = v;
        }
    }
    values.forEach((v, i) => {
        const [r, g, b] = binary ? binaryColor(v) : heatColor(peak > 0 ? v / peak : 0);
        out[i * 4] = r;
        out[i * 4 + 1] = g;
        out[i * 4 + 2] = b;
        out[i * 4 + 3] = 255;
    });
    return out;
}
//# sourceMappingURL=heatmap.js.map