/**
 * Writer (and reader, for tests) of the engine's binary embedding format.
 *
 * Little-endian layout: magic "MALE", u32 version = 1, u64 N, u32 d,
 * u32 kClasses, then N*d float32 features row-major, then N int32 labels
 * with -1 meaning unknown. Bit-identical to what the engine reads.
 */

export const MAGIC = "MALE";
export const VERSION = 1;
export const UNKNOWN_LABEL = -1;

const HEADER_BYTES = 4 + 4 + 8 + 4 + 4;

export interface EmbeddingFile {
  n: number;
  dim: number;
  kClasses: number;
  /** Row-major, length n * dim. */
  features: Float32Array;
  /** Length n; -1 = unknown. */
  labels: Int32Array;
}

export function encodeEmbeddingFile(data: EmbeddingFile): Buffer {
  const { n, dim, kClasses, features, labels } = data;
  if (features.length !== n * dim) {
    throw new Error(`features length ${features.length} != n*d = ${n * dim}`);
  }
  if (labels.length !== n) {
    throw new Error(`labels length ${labels.length} != n = ${n}`);
  }
  const buffer = Buffer.alloc(HEADER_BYTES + 4 * n * dim + 4 * n);
  buffer.write(MAGIC, 0, "ascii");
  buffer.writeUInt32LE(VERSION, 4);
  buffer.writeBigUInt64LE(BigInt(n), 8);
  buffer.writeUInt32LE(dim, 16);
  buffer.writeUInt32LE(kClasses, 20);
  let offset = HEADER_BYTES;
  for (let i = 0; i < features.length; i++, offset += 4) {
    buffer.writeFloatLE(features[i], offset);
  }
  for (let i = 0; i < n; i++, offset += 4) {
    buffer.writeInt32LE(labels[i], offset);
  }
  return buffer;
}

export function decodeEmbeddingFile(buffer: Buffer): EmbeddingFile {
  if (buffer.length < HEADER_BYTES || buffer.toString("ascii", 0, 4) !== MAGIC) {
    throw new Error("not an embedding file (bad magic)");
  }
  const version = buffer.readUInt32LE(4);
  if (version !== VERSION) throw new Error(`unsupported version ${version}`);
  const n = Number(buffer.readBigUInt64LE(8));
  const dim = buffer.readUInt32LE(16);
  const kClasses = buffer.readUInt32LE(20);
  const features = new Float32Array(n * dim);
  let offset = HEADER_BYTES;
  for (let i = 0; i < features.length; i++, offset += 4) {
    features[i] = buffer.readFloatLE(offset);
  }
  const labels = new Int32Array(n);
  for (let i = 0; i < n; i++, offset += 4) {
    labels[i] = buffer.readInt32LE(offset);
  }
  return { n, dim, kClasses, features, labels };
}
