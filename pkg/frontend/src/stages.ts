/**
 * View-state store for the pad UI.
 *
 * Incoming stage frames are coalesced per capture: a capture becomes
 * visible only once all four stages have arrived, and the four grids are
 * swapped in atomically so the views never tear across stages. Older
 * partial captures are discarded when a newer one completes. The last
 * config echo is kept as the single source of truth for control values.
 */

import {
  FramePayload,
  ReportPayload,
  SessionConfigDto,
  STAGE_TAGS,
  StageTag,
} from "./protocol.js";

export interface StageFrame {
  captureId: number;
  timestamp: number;
  rows: number;
  cols: number;
  values: number[];
}

export type StagedCapture = Record<StageTag, StageFrame>;

export interface PadViewState {
  connected: boolean;
  config: SessionConfigDto | null;
  capture: StagedCapture | null;
  crosstalk: number | null;
  /** Capture the indicator belongs to; reports trail their capture's frames. */
  crosstalkCaptureId: number;
  stimulated: [number, number] | null;
  lastError: string | null;
  droppedStrokes: number;
}

export class StageStore {
  private partials = new Map<number, Partial<StagedCapture>>();
  private state: PadViewState = {
    connected: false,
    config: null,
    capture: null,
    crosstalk: null,
    crosstalkCaptureId: -1,
    stimulated: null,
    lastError: null,
    droppedStrokes: 0,
  };
  private listeners: Array<(state: PadViewState) => void> = [];

  get current(): PadViewState {
    return this.state;
  }

  subscribe(listener: (state: PadViewState) => void): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(patch: Partial<PadViewState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  setConnected(connected: boolean): void {
    this.emit({ connected });
  }

  setDroppedStrokes(count: number): void {
    if (count !== this.state.droppedStrokes) {
      this.emit({ droppedStrokes: count });
    }
  }

  applyConfig(config: SessionConfigDto): void {
    this.emit({ config, lastError: null });
  }

  applyError(message: string): void {
    this.emit({ lastError: message });
  }

  applyReport(report: ReportPayload): void {
    this.emit({
      crosstalk: report.crosstalk,
      crosstalkCaptureId: report.capture_id,
      stimulated: report.stimulated,
    });
  }

  /** Current capture id on display, or -1 before the first one. */
  get displayedCaptureId(): number {
    return this.state.capture?.sum.captureId ?? -1;
  }

  applyFrame(payload: FramePayload): void {
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
      this.emit({ capture: partial as StagedCapture });
    }
  }
}
