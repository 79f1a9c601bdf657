/**
 * Browser entry: the virtual writing pad.
 *
 * A canvas sized to the sensing area captures pointer strokes and streams
 * them to the session service; the four pipeline stages (raw sum, S&N,
 * blurred, binary) render side by side from the same capture so the
 * writer can adapt stroke size and pressure to legibility. Connects
 * through a websocket-to-TCP bridge (see README).
 */
import { connectWebSocket, PadClient } from "./client.js";
import { ControlPanel } from "./controls.js";
import { CanvasMapping, sensingExtent } from "./coords.js";
import { gridToRgba } from "./heatmap.js";
import { STAGE_TAGS } from "./protocol.js";
import { StrokeBatcher } from "./strokes.js";
const PAD_CANVAS_SIZE = 452; // 10 px per mm of the default 45.2 mm pad
const STAGE_CANVAS_SIZE = 160;
const STAGE_LABELS = {
    sum: "raw sum",
    sn: "square + normalize",
    blur: "gaussian blur",
    binary: "threshold",
};
function el(id) {
    const node = document.getElementById(id);
    if (!node)
        throw new Error(`missing element #${id}`);
    return node;
}
function mount() {
    document.body.innerHTML = `
    <h1>velopad</h1>
    <div id="status">connecting…</div>
    <div style="display:flex; gap:24px; align-items:flex-start;">
      <div>
        <canvas id="pad" width="${PAD_CANVAS_SIZE}" height="${PAD_CANVAS_SIZE}"
                style="border:1px solid #888; touch-action:none; cursor:crosshair;"></canvas>
        <div>
          <button id="clear">Clear pad</button>
          <span id="dropped"></span>
        </div>
      </div>
      <div>
        <div id="stages" style="display:grid; grid-template-columns:repeat(2, ${STAGE_CANVAS_SIZE}px); gap:12px;"></div>
        <div id="indicator" style="margin-top:8px;">crosstalk: –</div>
        <div id="latency"></div>
        <fieldset style="margin-top:12px;">
          <legend>controls</legend>
          <label>blur σ <input id="blur" type="range" min="0" max="2" step="0.1"> <span id="blur-v"></span></label><br>
          <label>frames n <input id="frames" type="range" min="1" max="100" step="1"> <span id="frames-v"></span></label><br>
          <label>bend radius cm <input id="bend" type="range" min="0" max="20" step="1"> <span id="bend-v"></span></label><br>
          <label><input id="mech-sheet" type="checkbox"> sheet paths</label>
          <label><input id="mech-off" type="checkbox"> finite off-resistance</label>
          <label><input id="mech-diff" type="checkbox"> diffusion</label>
          <div id="config-error" style="color:#b00;"></div>
        </fieldset>
      </div>
    </div>
  `;
    const stagesBox = el("stages");
    const stageCanvases = new Map();
    for (const tag of STAGE_TAGS) {
        const wrap = document.createElement("div");
        const label = document.createElement("div");
        label.textContent = STAGE_LABELS[tag];
        const canvas = document.createElement("canvas");
        canvas.width = STAGE_CANVAS_SIZE;
        canvas.height = STAGE_CANVAS_SIZE;
        canvas.style.border = "1px solid #555";
        canvas.style.imageRendering = "pixelated";
        wrap.append(label, canvas);
        stagesBox.append(wrap);
        stageCanvases.set(tag, canvas);
    }
    const bridgeUrl = new URLSearchParams(location.search).get("bridge") ?? "ws://127.0.0.1:7354";
    const client = new PadClient(connectWebSocket(bridgeUrl));
    const panel = new ControlPanel((delta) => client.setConfig(delta));
    let mapping = new CanvasMapping(sensingExtent(16, 16, 3.0, 0.254), PAD_CANVAS_SIZE, PAD_CANVAS_SIZE);
    const batcher = new StrokeBatcher(mapping);
    const pad = el("pad");
    const padCtx = pad.getContext("2d");
    let drawing = false;
    pad.addEventListener("pointerdown", (ev) => {
        drawing = true;
        pad.setPointerCapture(ev.pointerId);
    });
    pad.addEventListener("pointerup", () => {
        drawing = false;
    });
    pad.addEventListener("pointermove", (ev) => {
        if (!drawing)
            return;
        const rect = pad.getBoundingClientRect();
        const sample = {
            canvasX: ev.clientX - rect.left,
            canvasY: ev.clientY - rect.top,
            pressure: ev.pressure,
            timeMs: ev.timeStamp,
        };
        batcher.add(sample);
        padCtx.fillStyle = "#223";
        padCtx.beginPath();
        padCtx.arc(sample.canvasX, sample.canvasY, 2 + 3 * (ev.pressure || 0.5), 0, 2 * Math.PI);
        padCtx.fill();
    });
    el("clear").onclick = () => {
        client.clear();
        padCtx.clearRect(0, 0, pad.width, pad.height);
    };
    // One stroke batch per animation tick.
    const tick = () => {
        const batch = batcher.flush();
        if (batch.length > 0 && client.store.current.connected) {
            client.sendStrokes(batch);
        }
        el("dropped").textContent =
            batcher.droppedCount > 0 ? ` dropped ${batcher.droppedCount} events` : "";
        requestAnimationFrame(tick);
    };
    requestAnimationFrame(tick);
    const drawStage = (tag, frame) => {
        const canvas = stageCanvases.get(tag);
        const ctx = canvas.getContext("2d");
        const rgba = gridToRgba(frame.values, tag === "binary");
        const image = new ImageData(new Uint8ClampedArray(rgba), frame.cols, frame.rows);
        const offscreen = document.createElement("canvas");
        offscreen.width = frame.cols;
        offscreen.height = frame.rows;
        offscreen.getContext("2d").putImageData(image, 0, 0);
        ctx.imageSmoothingEnabled = false;
        ctx.drawImage(offscreen, 0, 0, canvas.width, canvas.height);
    };
    const bindControls = (state) => {
        if (!state.config)
            return;
        const blur = el("blur");
        const frames = el("frames");
        const bend = el("bend");
        blur.value = String(panel.value("blur_sigma") ?? 0.6);
        frames.value = String(panel.value("frames_n") ?? 5);
        bend.value = String(panel.value("bend_radius_cm") ?? 0);
        el("blur-v").textContent = blur.value;
        el("frames-v").textContent = frames.value;
        el("bend-v").textContent = bend.value === "0" ? "flat" : bend.value;
        const mech = state.config.mechanisms;
        el("mech-sheet").checked = mech.includes("sheet_paths");
        el("mech-off").checked = mech.includes("finite_off");
        el("mech-diff").checked = mech.includes("diffusion");
    };
    el("blur").onchange = (ev) => panel.propose("blur_sigma", Number(ev.target.value));
    el("frames").onchange = (ev) => panel.propose("frames_n", Number(ev.target.value));
    el("bend").onchange = (ev) => {
        const cm = Number(ev.target.value);
        panel.propose("bend_radius_cm", cm === 0 ? null : cm);
    };
    const mechChanged = () => {
        const names = [];
        if (el("mech-sheet").checked)
            names.push("sheet_paths");
        if (el("mech-off").checked)
            names.push("finite_off");
        if (el("mech-diff").checked)
            names.push("diffusion");
        panel.propose("mechanisms", names);
    };
    el("mech-sheet").onchange = mechChanged;
    el("mech-off").onchange = mechChanged;
    el("mech-diff").onchange = mechChanged;
    client.store.subscribe((state) => {
        el("status").textContent = state.connected
            ? "connected"
            : "disconnected (strokes buffer until reconnect)";
        if (state.config) {
            panel.applyEcho(state.config);
            const extent = sensingExtent(state.config.rows, state.config.cols, state.config.pitch_mm, state.config.line_width_mm);
            mapping = new CanvasMapping(extent, PAD_CANVAS_SIZE, PAD_CANVAS_SIZE);
            batcher.remap(mapping);
            bindControls(state);
        }
        if (state.lastError) {
            panel.revertPending();
            el("config-error").textContent = state.lastError;
            bindControls(state);
        }
        if (state.capture) {
            for (const tag of STAGE_TAGS) {
                drawStage(tag, state.capture[tag]);
            }
            const age = ((Date.now() / 1000) % 1e6) - state.capture.sum.timestamp;
            el("latency").textContent =
                `capture ${state.capture.sum.captureId} (sim t=${state.capture.sum.timestamp.toFixed(1)}s)`;
            void age;
        }
        el("indicator").textContent =
            state.crosstalk === null
                ? "crosstalk: –"
                : `crosstalk: ${state.crosstalk.toFixed(4)}` +
                    (state.stimulated ? ` at (${state.stimulated[0]}, ${state.stimulated[1]})` : "");
    });
}
if (typeof document !== "undefined") {
    mount();
}
//# sourceMappingURL=main.js.map