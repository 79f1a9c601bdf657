/**
 * Canvas <-> pad coordinate mapping.
 *
 * The drawing canvas is sized to the pad's sensing extent; pad coordinates
 * are meters with the origin at the first crossover corner, x along
 * columns, y along rows. Canvas y grows downward, same as pad rows, so the
 * mapping is a pure scale.
 */
/** Sensing extent for a grid: (n-1)*pitch + line width per axis. */
export function sensingExtent(rows, cols, pitchMm, lineWidthMm) {
    return {
        widthM: ((cols - 1) * pitchMm + lineWidthMm) * 1e-3,
        heightM: ((rows - 1) * pitchMm + lineWidthMm) * 1e-3,
    };
}
export class CanvasMapping {
    extent;
    canvasWidth;
    canvasHeight;
    constructor(extent, canvasWidth, canvasHeight) {
        this.extent = extent;
        this.canvasWidth = canvasWidth;
        this.canvasHeight = canvasHeight;
    }
    canvasToPad(px, py) {
        return {
            x: (px / this.canvasWidth) * this.extent.widthM,
            y: (py / this.canvasHeight) * this.extent.heightM,
        };
    }
    padToCanvas(x, y) {
        return {
            px: (x / this.extent.widthM) * this.canvasWidth,
            py: (y / this.extent.heightM) * this.canvasHeight,
        };
    }
    inside(px, py) {
        return px >= 0 && px <= this.canvasWidth && py >= 0 && py <= this.canvasHeight;
    }
}
//# sourceMappingURL=coords.js.map