import assert from "node:assert/strict";
import { test } from "node:test";

import { Throttle } from "../src/throttle.js";

test("100 pushes in one second pass at most 15 values", () => {
  let clock = 0;
  const emitted: number[] = [];
  const th = new Throttle<number>((v) => emitted.push(v), 15, () => clock);
  for (let i = 0; i < 100; i++) {
    clock = (i * 1000) / 100;
    th.push(i);
  }
  assert.ok(emitted.length <= 15, `${emitted.length} > 15`);
  assert.ok(emitted.length >= 14, `suspiciously few: ${emitted.length}`);
});

test("flush emits the most recent suppressed value once", () => {
  let clock = 0;
  const emitted: string[] = [];
  const th = new Throttle<string>((v) => emitted.push(v), 10, () => clock);
  th.push("a");          // passes
  clock += 1;
  th.push("b");          // suppressed
  th.push("c");          // suppressed, replaces b
  assert.equal(th.flush(), true);
  assert.deepEqual(emitted, ["a", "c"]);
  assert.equal(th.flush(), false); // nothing pending
});

test("spaced pushes all pass", () => {
  let clock = 0;
  const emitted: number[] = [];
  const th = new Throttle<number>((v) => emitted.push(v), 10, () => clock);
  for (let i = 0; i < 5; i++) {
    th.push(i);
    clock += 200;
  }
  assert.deepEqual(emitted, [0, 1, 2, 3, 4]);
});
