import assert from "node:assert/strict";
import { test } from "node:test";

import { FramePayload, StageTag, STAGE_TAGS } from "../src/protocol.js";
import { StageStore } from "../src/stages.js";

function frame(captureId: number, stage: StageTag, value = 0): FramePayload {
  return {
    capture_id: captureId,
    timestamp: captureId * 0.5,
    stage,
    rows: 2,
    cols: 2,
    values: [value, 0, 0, 0],
  };
}

test("capture commits only when all four stages arrived", () => {
  const store = new StageStore();
  store.applyFrame(frame(0, "sum"));
  store.applyFrame(frame(0, "sn"));
  store.applyFrame(frame(0, "blur"));
  const partial = store.current.capture;
  assert.equal(partial, null);
  store.applyFrame(frame(0, "binary"));
  const committed = store.current.capture;
  assert.notEqual(committed, null);
  assert.equal(committed?.sum.captureId, 0);
});

test("all stages of a committed capture share the capture id", () => {
  const store = new StageStore();
  for (const tag of STAGE_TAGS) store.applyFrame(frame(3, tag));
  for (const tag of STAGE_TAGS) {
    assert.equal(store.current.capture?.[tag].captureId, 3);
  }
});

test("stale frames from superseded captures are ignored", () => {
  const store = new StageStore();
  for (const tag of STAGE_TAGS) store.applyFrame(frame(5, tag, 1));
  store.applyFrame(frame(4, "sum", 9));
  assert.equal(store.current.capture?.sum.captureId, 5);
  assert.equal(store.current.capture?.sum.values[0], 1);
});

test("coalesces to the newest complete capture", () => {
  const store = new StageStore();
  // Interleave two captures; only 7 completes first, then 8.
  store.applyFrame(frame(7, "sum"));
  store.applyFrame(frame(8, "sum"));
  store.applyFrame(frame(7, "sn"));
  store.applyFrame(frame(7, "blur"));
  store.applyFrame(frame(7, "binary"));
  assert.equal(store.current.capture?.sum.captureId, 7);
  store.applyFrame(frame(8, "sn"));
  store.applyFrame(frame(8, "blur"));
  store.applyFrame(frame(8, "binary"));
  assert.equal(store.current.capture?.sum.captureId, 8);
});

test("subscription sees atomic updates and reports", () => {
  const store = new StageStore();
  const seen: Array<number | null> = [];
  store.subscribe((state) => seen.push(state.capture?.sum.captureId ?? null));
  for (const tag of STAGE_TAGS) store.applyFrame(frame(1, tag));
  store.applyReport({ capture_id: 1, crosstalk: 0.25, stimulated: [1, 1] });
  assert.deepEqual(seen, [1, 1]);
  assert.equal(store.current.crosstalk, 0.25);
});

test("errors surface without touching the capture", () => {
  const store = new StageStore();
  for (const tag of STAGE_TAGS) store.applyFrame(frame(2, tag));
  store.applyError("bad config");
  assert.equal(store.current.lastError, "bad config");
  assert.equal(store.current.capture?.sum.captureId, 2);
});
