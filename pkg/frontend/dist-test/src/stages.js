/**
 * View-state store for the pad UI.
 *
 * Incoming stage frames are coalesced per capture: a capture becomes
 * visible only once all four stages have arrived, and the four grids are
 * swapped in atomically so the views never tear across stages. Older
 * partial captures are discarded when a newer one completes. The last
 * config echo is kept as the single source of truth for control values.
 */
import { STAGE_TAGS, } from "./protocol.js";
export class StageStore {
    partials = new Map();
    state = {
        connected: false,
        config: null,
        capture: null,
        crosstalk: null,
        crosstalkCaptureId: -1,
        stimulated: null,
        lastError: null,
        droppedStrokes: 0,
    };
    listeners = [];
    get current() {
        return this.state;
    }
    subscribe(listener) {
        this.listeners.push(listener);
        return () => {
            this.listeners = this.listeners.filter((l) => l !== listener);
        };
    }
    emit(patch) {
        this.state = { ...this.state, ...patch };
        for (const listener of this.listeners) {
            listener(this.state);
        }
    }
    setConnected(connected) {
        this.emit({ connected });
    }
    setDroppedStrokes(count) {
        if (count !== this.state.droppedStrokes) {
            this.emit({ droppedStrokes: count });
        }
    }
    applyConfig(config) {
        this.emit({ config, lastError: null });
    }
    applyError(message) {
        this.emit({ lastError: message });
    }
    applyReport(report) {
        this.emit({
            crosstalk: report.crosstalk,
            crosstalkCaptureId: report.capture_id,
            stimulated: report.stimulated,
        });
    }
    /** Current capture id on display, or -1 before the first one. */
    get displayedCaptureId() {
        return this.state.capture?.sum.captureId ?? -1;
    }
    applyFrame(payload) {
        if (payload.capture_id < this.displayedCaptureId) {
            return; // stale frame from an already superseded capture
        }
        const partial = this.partials.get(payload.capture_id) ?? {};
        partial[payload.stage] = {
            captureId: payload.capture_id,
            timestamp: payload.timestamp,
            rows: payload.rows,
            cols: payload.cols,
            values: payload.values,
        };
        this.partials.set(payload.capture_id, partial);
        if (STAGE_TAGS.every((tag) => partial[tag] !== undefined)) {
            // Complete: commit atomically, drop this and anything older.
            for (const id of [...this.partials.keys()]) {
                if (id <= payload.capture_id) {
                    this.partials.delete(id);
                }
            }
            this.emit({ capture: partial });
        }
    }
}
//# sourceMappingURL=stages.js.map