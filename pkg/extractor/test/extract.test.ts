import assert from "node:assert/strict";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { test } from "node:test";

import { makeCheckpoint, saveCheckpoint, loadCheckpoint } from "../src/checkpoint";
import { encodeImage } from "../src/encoder";
import { extractDirectory } from "../src/extract";
import { decodeEmbeddingFile } from "../src/male";

function ppm(width: number, height: number, fill: (x: number, y: number) => number[]): Buffer {
  const header = Buffer.from(`P6\n${width} ${height}\n255\n`, "ascii");
  const pixels = Buffer.alloc(width * height * 3);
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      const [r, g, b] = fill(x, y);
      pixels.set([r, g, b], (y * width + x) * 3);
    }
  }
  return Buffer.concat([header, pixels]);
}

function tempDir(): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), "extract-test-"));
}

test("checkpoint save/load round trip, deterministic per seed", () => {
  const dir = tempDir();
  const file = path.join(dir, "enc.ckpt");
  saveCheckpoint(makeCheckpoint(8, 16, 42, "relu"), file);
  const back = loadCheckpoint(file);
  assert.equal(back.outDim, 8);
  assert.equal(back.inputSize, 16);
  assert.equal(back.tap, "relu");
  const again = makeCheckpoint(8, 16, 42, "relu");
  assert.deepEqual(Array.from(back.weights), Array.from(again.weights));
  const other = makeCheckpoint(8, 16, 43, "relu");
  assert.notDeepEqual(Array.from(back.weights), Array.from(other.weights));
});

test("encoded features are unit norm by default, raw with normalize off", () => {
  const ckpt = makeCheckpoint(6, 8, 1);
  const image = { width: 10, height: 10, pixels: new Uint8Array(300).fill(200) };
  const unit = encodeImage(ckpt, image, true);
  const norm = Math.hypot(...Array.from(unit));
  assert.ok(Math.abs(norm - 1) < 1e-6);
  const raw = encodeImage(ckpt, image, false);
  assert.notEqual(Math.hypot(...Array.from(raw)).toFixed(6), "1.000000");
});

test("class subdirectories become sorted labels with a manifest", () => {
  const dir = tempDir();
  for (const [cls, shade] of [["tumor", 200], ["stroma", 40]] as const) {
    fs.mkdirSync(path.join(dir, cls));
    for (let i = 0; i < 3; i++) {
      fs.writeFileSync(
        path.join(dir, cls, `img_${i}.ppm`),
        ppm(6, 6, () => [shade, shade, shade]),
      );
    }
  }
  const out = path.join(dir, "out.emb");
  const ckpt = makeCheckpoint(4, 8, 7);
  const result = extractDirectory({
    imagesDir: dir,
    checkpoint: ckpt,
    checkpointPath: "enc.ckpt",
    outPath: out,
    normalize: true,
    log: () => {},
  });
  assert.equal(result.written, 6);
  assert.equal(result.kClasses, 2);
  const parsed = decodeEmbeddingFile(fs.readFileSync(out));
  assert.equal(parsed.n, 6);
  assert.equal(parsed.dim, 4);
  // "stroma" sorts before "tumor": labels 0 then 1.
  assert.deepEqual(Array.from(parsed.labels), [0, 0, 0, 1, 1, 1]);
  const manifest = JSON.parse(fs.readFileSync(result.manifestPath, "utf8"));
  assert.deepEqual(manifest.classes, ["stroma", "tumor"]);
  assert.equal(manifest.counts.tumor, 3);
  assert.equal(manifest.encoder.normalized, true);
});

test("flat directories yield unknown labels", () => {
  const dir = tempDir();
  fs.writeFileSync(path.join(dir, "a.ppm"), ppm(4, 4, (x) => [x * 60, 0, 0]));
  fs.writeFileSync(path.join(dir, "b.ppm"), ppm(4, 4, (_, y) => [0, y * 60, 0]));
  const out = path.join(dir, "out.emb");
  extractDirectory({
    imagesDir: dir,
    checkpoint: makeCheckpoint(4, 8, 7),
    checkpointPath: "enc.ckpt",
    outPath: out,
    normalize: true,
    log: () => {},
  });
  const parsed = decodeEmbeddingFile(fs.readFileSync(out));
  assert.deepEqual(Array.from(parsed.labels), [-1, -1]);
  assert.equal(parsed.kClasses, 1);
});

test("unreadable images are skipped and recorded, not fatal", () => {
  const dir = tempDir();
  fs.writeFileSync(path.join(dir, "good.ppm"), ppm(4, 4, () => [1, 2, 3]));
  fs.writeFileSync(path.join(dir, "broken.png"), Buffer.from("this is not a png"));
  const out = path.join(dir, "out.emb");
  const warnings: string[] = [];
  const result = extractDirectory({
    imagesDir: dir,
    checkpoint: makeCheckpoint(4, 8, 7),
    checkpointPath: "enc.ckpt",
    outPath: out,
    normalize: true,
    log: (line) => warnings.push(line),
  });
  assert.equal(result.written, 1);
  assert.equal(result.skipped.length, 1);
  assert.match(result.skipped[0].file, /broken\.png$/);
  assert.equal(warnings.length, 1);
  const manifest = JSON.parse(fs.readFileSync(result.manifestPath, "utf8"));
  assert.equal(manifest.skipped.length, 1);
});

test("different images produce different embeddings, same image identical", () => {
  const ckpt = makeCheckpoint(8, 8, 11);
  const imgA = { width: 6, height: 6, pixels: new Uint8Array(108).fill(10) };
  const imgB = { width: 6, height: 6, pixels: new Uint8Array(108).fill(240) };
  const a1 = encodeImage(ckpt, imgA);
  const a2 = encodeImage(ckpt, imgA);
  const b = encodeImage(ckpt, imgB);
  assert.deepEqual(Array.from(a1), Array.from(a2));
  assert.notDeepEqual(Array.from(a1), Array.from(b));
});
