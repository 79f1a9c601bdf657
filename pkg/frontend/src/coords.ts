/**
 * Canvas <-> pad coordinate mapping.
 *
 * The drawing canvas is sized to the pad's sensing extent; pad coordinates
 * are meters with the origin at the first crossover corner, x along
 * columns, y along rows. Canvas y grows downward, same as pad rows, so the
 * mapping is a pure scale.
 */

export interface PadExtent {
  widthM: number;
  heightM: number;
}

/** Sensing extent for a grid: (n-1)*pitch + line width per axis. */
export function sensingExtent(
  rows: number,
  cols: number,
  pitchMm: number,
  lineWidthMm: number,
): PadExtent {
  return {
    widthM: ((cols - 1) * pitchMm + lineWidthMm) * 1e-3,
    heightM: ((rows - 1) * pitchMm + lineWidthMm) * 1e-3,
  };
}

export class CanvasMapping {
  constructor(
    readonly extent: PadExtent,
    readonly canvasWidth: number,
    readonly canvasHeight: number,
  ) {}

  canvasToPad(px: number, py: number): { x: number; y: number } {
    return {
      x: (px / this.canvasWidth) * this.extent.widthM,
      y: (py / this.canvasHeight) * this.extent.heightM,
    };
  }

  padToCanvas(x: number, y: number): { px: number; py: number } {
    return {
      px: (x / this.extent.widthM) * this.canvasWidth,
      py: (y / this.extent.heightM) * this.canvasHeight,
    };
  }

  inside(px: number, py: number): boolean {
    return px >= 0 && px <= this.canvasWidth && py >= 0 && py <= this.canvasHeight;
  }
}
