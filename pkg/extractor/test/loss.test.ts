import assert from "node:assert/strict";
import { test } from "node:test";

import { mocoLoss } from "../src/loss";

// 40-digit reference values for the two closed-form anchor cases.
const ALIGNED = 0.3132616875182228; // -log(e / (e + 1))
const LN2 = 0.6931471805599453;

test("aligned query with one orthogonal negative", () => {
  const q = [1, 0, 0];
  const loss = mocoLoss({ query: q, positive: q, negatives: [[0, 1, 0]], temperature: 1 });
  assert.ok(Math.abs(loss - ALIGNED) < 1e-12);
});

test("no negatives gives exactly zero at any temperature", () => {
  const q = [0.6, 0.8];
  for (const temperature of [0.05, 1, 20]) {
    assert.equal(mocoLoss({ query: q, positive: q, negatives: [], temperature }), 0);
  }
});

test("tied positive and negative similarity gives ln 2", () => {
  const loss = mocoLoss({
    query: [1, 0, 0],
    positive: [0, 1, 0],
    negatives: [[0, 0, 1]],
    temperature: 1,
  });
  assert.ok(Math.abs(loss - LN2) < 1e-12);
});

test("matches a direct evaluation on random batches", () => {
  let state = 1234567;
  const next = () => {
    state = (state * 48271) % 2147483647;
    return state / 2147483647;
  };
  for (let trial = 0; trial < 200; trial++) {
    const dim = 2 + Math.floor(next() * 6);
    const vec = () => Array.from({ length: dim }, () => next() * 2 - 1);
    const query = vec();
    const positive = vec();
    const negatives = Array.from({ length: Math.floor(next() * 5) }, vec);
    const temperature = 0.1 + next();

    const dot = (a: number[], b: number[]) => a.reduce((s, x, i) => s + x * b[i], 0);
    const pos = Math.exp(dot(query, positive) / temperature);
    const denom =
      pos + negatives.reduce((s, kn) => s + Math.exp(dot(query, kn) / temperature), 0);
    const direct = -Math.log(pos / denom);

    const loss = mocoLoss({ query, positive, negatives, temperature });
    assert.ok(Math.abs(loss - direct) < 1e-9, `trial ${trial}: ${loss} vs ${direct}`);
  }
});

test("loss strictly decreases as query-positive similarity grows", () => {
  const q = [1, 0];
  let previous = Infinity;
  for (let s = -0.95; s <= 0.95; s += 0.05) {
    const positive = [s, Math.sqrt(1 - s * s)];
    const loss = mocoLoss({ query: q, positive, negatives: [[0, 1]], temperature: 0.3 });
    assert.ok(loss < previous);
    previous = loss;
  }
});

test("rejects non-positive temperature and mismatched dimensions", () => {
  assert.throws(() => mocoLoss({ query: [1], positive: [1], negatives: [], temperature: 0 }));
  assert.throws(() =>
    mocoLoss({ query: [1, 0], positive: [1], negatives: [], temperature: 1 }),
  );
});

test("stable for extreme similarity over tiny temperature", () => {
  const loss = mocoLoss({
    query: [1e3, 0],
    positive: [1e3, 0],
    negatives: [[-1e3, 0]],
    temperature: 0.01,
  });
  assert.ok(Number.isFinite(loss) && loss >= 0);
});
