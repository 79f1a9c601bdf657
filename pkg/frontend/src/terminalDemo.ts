/**
 * Minimal terminal client: connects to a running `velopad serve`, writes a
 * diagonal stroke, and prints the binary stage as ASCII every capture.
 *
 *   velopad serve --fast &
 *   npm run demo -- 127.0.0.1 7353
 */

import { connectTcp, PadClient } from "./client.js";
import { CanvasMapping, sensingExtent } from "./coords.js";
import { StrokeBatcher } from "./strokes.js";

const host = process.argv[2] ?? "127.0.0.1";
const port = Number(process.argv[3] ?? 7353);

const client = new PadClient(await connectTcp(host, port));

client.store.subscribe((state) => {
  if (!state.capture) return;
  const { rows, cols, values } = state.capture.binary;
  const lines: string[] = [];
  for (let r = 0; r < rows; r++) {
    lines.push(
      Array.from({ length: cols }, (_, c) => ((values[r * cols + c] ?? 0) > 0 ? "#" : "."))
        .join(""),
    );
  }
  console.clear();
  console.log(`capture ${state.capture.binary.captureId}  crosstalk ${state.crosstalk ?? "-"}`);
  console.log(lines.join("\n"));
});

// Draw one diagonal stroke once the config echo arrives.
const waitForConfig = setInterval(() => {
  const config = client.store.current.config;
  if (!config) return;
  clearInterval(waitForConfig);
  const extent = sensingExtent(config.rows, config.cols, config.pitch_mm, config.line_width_mm);
  const mapping = new CanvasMapping(extent, 100, 100);
  const batcher = new StrokeBatcher(mapping);
  for (let i = 10; i <= 90; i += 2) {
    batcher.add({ canvasX: i, canvasY: i, timeMs: i });
  }
  client.sendStrokes(batcher.flush());
}, 50);
