/**
 * Session message schema and NDJSON framing.
 *
 * The pad service speaks newline-delimited JSON over a full-duplex byte
 * channel. Every message is {"type": ..., "payload": ...}; this module
 * mirrors the server's shapes exactly.
 */

export type StageTag = "sum" | "sn" | "blur" | "binary";

export const STAGE_TAGS: readonly StageTag[] = ["sum", "sn", "blur", "binary"];

export interface StrokeEventDto {
  x: number; // pad meters
  y: number; // pad meters
  force: number; // newtons
  t: number; // seconds
}

export interface FramePayload {
  capture_id: number;
  timestamp: number;
  stage: StageTag;
  rows: number;
  cols: number;
  values: number[];
}

export interface ReportPayload {
  capture_id: number;
  crosstalk: number | null;
  stimulated: [number, number] | null;
}

/** Flat config keys, exactly the server's SessionConfig dictionary. */
export interface SessionConfigDto {
  rows: number;
  cols: number;
  pitch_mm: number;
  line_width_mm: number;
  r_off: number;
  r_on: number;
  p_half: number;
  gamma: number;
  r_sheet: number | null;
  vdd: number;
  bias_ohm: number;
  adc_bits: number;
  frame_period_s: number;
  frames_n: number;
  mechanisms: string[];
  ground_unused: boolean;
  noise_sigma_v: number;
  blur_sigma: number;
  kernel_radius: number | null;
  use_softmax: boolean;
  bend_radius_cm: number | null;
  bend_axis: "horizontal" | "vertical";
  bend_scale: number;
  diffusion_sigma_mm: number;
  seed: number | null;
}

export type ServerMessage =
  | { type: "config"; payload: SessionConfigDto }
  | { type: "frame"; payload: FramePayload }
  | { type: "report"; payload: ReportPayload }
  | { type: "error"; payload: { message: string } };

export type ClientMessage =
  | { type: "stroke"; payload: { events: StrokeEventDto[] } }
  | { type: "clear"; payload: Record<string, never> }
  | { type: "config"; payload: Partial<SessionConfigDto> };

export function encodeMessage(msg: ClientMessage): string {
  return JSON.stringify(msg) + "\n";
}

export function parseServerMessage(line: string): ServerMessage {
  const raw = JSON.parse(line) as { type?: string; payload?: unknown };
  switch (raw.type) {
    case "config":
    case "frame":
    case "report":
    case "error":
      return raw as ServerMessage;
    default:
      throw new Error(`unknown server message type: ${String(raw.type)}`);
  }
}

/**
 * Splits a byte/string stream into complete lines, buffering partials
 * across chunk boundaries.
 */
export class LineSplitter {
  private partial = "";

  push(chunk: string): string[] {
    this.partial += chunk;
    const pieces = this.partial.split("\n");
    this.partial = pieces.pop() ?? "";
    return pieces.filter((p) => p.trim().length > 0);
  }

  /** Whatever is left without a trailing newline. */
  remainder(): string {
    return this.partial;
  }
}
