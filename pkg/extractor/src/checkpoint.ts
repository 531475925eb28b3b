/**
 * Frozen encoder checkpoints.
 *
 * A checkpoint holds a single linear map from a fixed-size pixel patch to the
 * embedding space, with an optional ReLU tap. This is the generic fallback
 * encoder for desk-scale work: a seeded random projection preserves cluster
 * geometry well enough to exercise the whole downstream pipeline, and the
 * same binary container can carry distilled weights from a real pretrained
 * backbone. Binary layout (little-endian): magic "MALC", u32 version = 1,
 * u32 inputSize (square side), u32 channels, u32 outDim, u32 tap
 * (0 = linear, 1 = relu), float32 W[outDim][inputSize^2 * channels],
 * float32 b[outDim].
 */
import * as fs from "fs";

import { mulberry32, uniform } from "./prng";

export const CKPT_MAGIC = "MALC";

export type Tap = "linear" | "relu";

export interface EncoderCheckpoint {
  inputSize: number;
  channels: number;
  outDim: number;
  tap: Tap;
  /** Row-major outDim x (inputSize^2 * channels). */
  weights: Float32Array;
  bias: Float32Array;
}

export function makeCheckpoint(
  outDim: number,
  inputSize = 32,
  seed = 0,
  tap: Tap = "linear",
): EncoderCheckpoint {
  if (outDim < 1 || inputSize < 1) throw new Error("outDim and inputSize must be >= 1");
  const channels = 3;
  const fanIn = inputSize * inputSize * channels;
  const next = mulberry32(seed);
  const bound = Math.sqrt(6 / (fanIn + outDim));
  const weights = new Float32Array(outDim * fanIn);
  for (let i = 0; i < weights.length; i++) weights[i] = uniform(next, bound);
  return { inputSize, channels, outDim, tap, weights, bias: new Float32Array(outDim) };
}

export function encodeCheckpoint(ckpt: EncoderCheckpoint): Buffer {
  const headBytes = 4 + 4 * 5;
  const buffer = Buffer.alloc(headBytes + 4 * ckpt.weights.length + 4 * ckpt.bias.length);
  buffer.write(CKPT_MAGIC, 0, "ascii");
  buffer.writeUInt32LE(1, 4);
  buffer.writeUInt32LE(ckpt.inputSize, 8);
  buffer.writeUInt32LE(ckpt.channels, 12);
  buffer.writeUInt32LE(ckpt.outDim, 16);
  buffer.writeUInt32LE(ckpt.tap === "relu" ? 1 : 0, 20);
  let offset = headBytes;
  for (let i = 0; i < ckpt.weights.length; i++, offset += 4) {
    buffer.writeFloatLE(ckpt.weights[i], offset);
  }
  for (let i = 0; i < ckpt.bias.length; i++, offset += 4) {
    buffer.writeFloatLE(ckpt.bias[i], offset);
  }
  return buffer;
}

export function loadCheckpoint(path: string): EncoderCheckpoint {
  const buffer = fs.readFileSync(path);
  if (buffer.length < 24 || buffer.toString("ascii", 0, 4) !== CKPT_MAGIC) {
    throw new Error(`${path}: not an encoder checkpoint (bad magic)`);
  }
  const version = buffer.readUInt32LE(4);
  if (version !== 1) throw new Error(`${path}: unsupported checkpoint version ${version}`);
  const inputSize = buffer.readUInt32LE(8);
  const channels = buffer.readUInt32LE(12);
  const outDim = buffer.readUInt32LE(16);
  const tap: Tap = buffer.readUInt32LE(20) === 1 ? "relu" : "linear";
  const fanIn = inputSize * inputSize * channels;
  const expect = 24 + 4 * (outDim * fanIn + outDim);
  if (buffer.length < expect) throw new Error(`${path}: truncated checkpoint`);
  const weights = new Float32Array(outDim * fanIn);
  let offset = 24;
  for (let i = 0; i < weights.length; i++, offset += 4) {
    weights[i] = buffer.readFloatLE(offset);
  }
  const bias = new Float32Array(outDim);
  for (let i = 0; i < outDim; i++, offset += 4) {
    bias[i] = buffer.readFloatLE(offset);
  }
  return { inputSize, channels, outDim, tap, weights, bias };
}

export function saveCheckpoint(ckpt: EncoderCheckpoint, path: string): void {
  fs.writeFileSync(path, encodeCheckpoint(ckpt));
}
