/**
 * Session message schema and NDJSON framing.
 *
 * The pad service speaks newline-delimited JSON over a full-duplex byte
 * channel. Every message is {"type": ..., "payload": ...}; this module
 * mirrors the server's shapes exactly.
 */
export const STAGE_TAGS = ["sum", "sn", "blur", "binary"];
export function encodeMessage(msg) {
    return JSON.stringify(msg) + "\n";
}
export function parseServerMessage(line) {
    const raw = JSON.parse(line);
    switch (raw.type) {
        case "config":
        case "frame":
        case "report":
        case "error":
            return raw;
        default:
            throw new Error(`unknown server message type: ${String(raw.type)}`);
    }
}
/**
 * Splits a byte/string stream into complete lines, buffering partials
 * across chunk boundaries.
 */
export class LineSplitter {
    partial = "";
    push(chunk) {
        this.partial += chunk;
        const pieces = this.partial.split("\n");
        this.partial = pieces.pop() ?? "";
        return pieces.filter((p) => p.trim().length > 0);
    }
    /** Whatever is left without a trailing newline. */
    remainder() {
        return this.partial;
    }
}
//# sourceMappingURL=protocol.js.map