/**
 * Pointer-to-stroke batching.
 *
 * Pointer samples are mapped from canvas pixels to pad meters and queued;
 * the app flushes one batch per animation tick. Pointer pressure scales
 * the stroke force when the device reports it, otherwise a constant force
 * is used. While disconnected, events buffer up to a cap and are then
 * dropped (the drop count is surfaced so the UI can show an indicator).
 */

import { CanvasMapping } from "./coords.js";
import { StrokeEventDto } from "./protocol.js";

export interface PointerSample {
  canvasX: number;
  canvasY: number;
  /** 0..1 from the pointer device; 0 or undefined means "not supported". */
  pressure?: number;
  timeMs: number;
}

export const DEFAULT_FORCE_N = 3.0;
export const OFFLINE_BUFFER_CAP = 2000;

export class StrokeBatcher {
  private pending: StrokeEventDto[] = [];
  private droppedTotal = 0;

  constructor(
    private mapping: CanvasMapping,
    private readonly fullForceN: number = DEFAULT_FORCE_N,
    private readonly bufferCap: number = OFFLINE_BUFFER_CAP,
  ) {}

  remap(mapping: CanvasMapping): void {
    this.mapping = mapping;
  }

  /** Queue one pointer sample; out-of-canvas samples are dropped. */
  add(sample: PointerSample): void {
    if (!this.mapping.inside(sample.canvasX, sample.canvasY)) {
      return;
    }
    if (this.pending.length >= this.bufferCap) {
      this.droppedTotal += 1;
      return;
    }
    const { x, y } = this.mapping.canvasToPad(sample.canvasX, sample.canvasY);
    const pressure =
      sample.pressure !== undefined && sample.pressure > 0 ? sample.pressure : 1.0;
    this.pending.push({
      x,
      y,
      force: pressure * this.fullForceN,
      t: sample.timeMs / 1000,
    });
  }

  /** Take everything queued since the last tick. */
  flush(): StrokeEventDto[] {
    const batch = this.pending;
    this.pending = [];
    return batch;
  }

  get pendingCount(): number {
    return this.pending.length;
  }

  get droppedCount(): number {
    return this.droppedTotal;
  }
}
