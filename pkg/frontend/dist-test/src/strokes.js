/**
 * Pointer-to-stroke batching.
 *
 * Pointer samples are mapped from canvas pixels to pad meters and queued;
 * the app flushes one batch per animation tick. Pointer pressure scales
 * the stroke force when the device reports it, otherwise a constant force
 * is used. While disconnected, events buffer up to a cap and are then
 * dropped (the drop count is surfaced so the UI can show an indicator).
 */
export const DEFAULT_FORCE_N = 3.0;
export const OFFLINE_BUFFER_CAP = 2000;
export class StrokeBatcher {
    mapping;
    fullForceN;
    bufferCap;
    pending = [];
    droppedTotal = 0;
    constructor(mapping, fullForceN = DEFAULT_FORCE_N, bufferCap = OFFLINE_BUFFER_CAP) {
        this.mapping = mapping;
        this.fullForceN = fullForceN;
        this.bufferCap = bufferCap;
    }
    remap(mapping) {
        this.mapping = mapping;
    }
    /** Queue one pointer sample; out-of-canvas samples are dropped. */
    add(sample) {
        if (!this.mapping.inside(sample.canvasX, sample.canvasY)) {
            return;
        }
        if (this.pending.length >= this.bufferCap) {
            this.droppedTotal += 1;
            return;
        }
        const { x, y } = this.mapping.canvasToPad(sample.canvasX, sample.canvasY);
        const pressure = sample.pressure !== undefined && sample.pressure > 0 ? sample.pressure : 1.0;
        this.pending.push({
            x,
            y,
            force: pressure * this.fullForceN,
            t: sample.timeMs / 1000,
        });
    }
    /** Take everything queued since the last tick. */
    flush() {
        const batch = this.pending;
        this.pending = [];
        return batch;
    }
    get pendingCount() {
        return this.pending.length;
    }
    get droppedCount() {
        return this.droppedTotal;
    }
}
//# sourceMappingURL=strokes.js.map