/**
 * Minimal image decoding: 8-bit non-interlaced PNG (grayscale, gray+alpha,
 * RGB, RGBA, via the built-in zlib) and binary PPM (P6). Everything is
 * returned as packed RGB bytes. Enough for patch datasets; anything exotic
 * is reported as unreadable and skipped upstream.
 */
import * as zlib from "zlib";

export interface RgbImage {
  width: number;
  height: number;
  /** Packed RGB, length width * height * 3. */
  pixels: Uint8Array;
}

const PNG_SIGNATURE = Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]);

function paeth(a: number, b: number, c: number): number {
  const p = a + b - c;
  const pa = Math.abs(p - a);
  const pb = Math.abs(p - b);
  const pc = Math.abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  return pb <= pc ? b : c;
}

export function decodePng(buffer: Buffer): RgbImage {
  if (buffer.length < 8 || !buffer.subarray(0, 8).equals(PNG_SIGNATURE)) {
    throw new Error("not a PNG file");
  }
  let width = 0;
  let height = 0;
  let colorType = 0;
  const idat: Buffer[] = [];
  let offset = 8;
  while (offset + 8 <= buffer.length) {
    const length = buffer.readUInt32BE(offset);
    const kind = buffer.toString("ascii", offset + 4, offset + 8);
    const body = buffer.subarray(offset + 8, offset + 8 + length);
    if (kind === "IHDR") {
      width = body.readUInt32BE(0);
      height = body.readUInt32BE(4);
      const bitDepth = body.readUInt8(8);
      colorType = body.readUInt8(9);
      const interlace = body.readUInt8(12);
      if (bitDepth !== 8) throw new Error(`unsupported PNG bit depth ${bitDepth}`);
      if (![0, 2, 4, 6].includes(colorType)) {
        throw new Error(`unsupported PNG color type ${colorType}`);
      }
      if (interlace !== 0) throw new Error("interlaced PNG not supported");
    } else if (kind === "IDAT") {
      idat.push(body);
    } else if (kind === "IEND") {
      break;
    }
    offset += 8 + length + 4; // chunk + crc
  }
  if (!width || !height || idat.length === 0) throw new Error("malformed PNG");

  const channels = { 0: 1, 2: 3, 4: 2, 6: 4 }[colorType as 0 | 2 | 4 | 6]!;
  const raw = zlib.inflateSync(Buffer.concat(idat));
  const stride = width * channels;
  if (raw.length < height * (stride + 1)) throw new Error("truncated PNG pixel data");

  const lines = new Uint8Array(height * stride);
  for (let y = 0; y < height; y++) {
    const filter = raw[y * (stride + 1)];
    const src = y * (stride + 1) + 1;
    const dst = y * stride;
    for (let x = 0; x < stride; x++) {
      const value = raw[src + x];
      const left = x >= channels ? lines[dst + x - channels] : 0;
      const up = y > 0 ? lines[dst + x - stride] : 0;
      const upLeft = y > 0 && x >= channels ? lines[dst + x - stride - channels] : 0;
      let out: number;
      switch (filter) {
        case 0: out = value; break;
        case 1: out = value + left; break;
        case 2: out = value + up; break;
        case 3: out = value + ((left + up) >> 1); break;
        case 4: out = value + paeth(left, up, upLeft); break;
        default: throw new Error(`bad PNG filter ${filter} on row ${y}`);
      }
      lines[dst + x] = out & 0xff;
    }
  }

  const pixels = new Uint8Array(width * height * 3);
  for (let i = 0; i < width * height; i++) {
    const s = i * channels;
    if (channels === 1 || channels === 2) {
      pixels[i * 3] = pixels[i * 3 + 1] = pixels[i * 3 + 2] = lines[s];
    } else {
      pixels[i * 3] = lines[s];
      pixels[i * 3 + 1] = lines[s + 1];
      pixels[i * 3 + 2] = lines[s + 2];
    }
  }
  return { width, height, pixels };
}

export function decodePpm(buffer: Buffer): RgbImage {
  if (buffer.toString("ascii", 0, 2) !== "P6") throw new Error("not a binary PPM (P6) file");
  // Header: "P6" <ws> width <ws> height <ws> maxval <single ws> pixel data.
  let pos = 2;
  const fields: number[] = [];
  while (fields.length < 3) {
    while (pos < buffer.length && /\s/.test(String.fromCharCode(buffer[pos]))) pos++;
    if (buffer[pos] === 0x23) { // '#' comment
      while (pos < buffer.length && buffer[pos] !== 0x0a) pos++;
      continue;
    }
    let start = pos;
    while (pos < buffer.length && !/\s/.test(String.fromCharCode(buffer[pos]))) pos++;
    fields.push(parseInt(buffer.toString("ascii", start, pos), 10));
  }
  pos++; // single whitespace after maxval
  const [width, height, maxval] = fields;
  if (!(width > 0 && height > 0)) throw new Error("bad PPM dimensions");
  if (maxval !== 255) throw new Error(`unsupported PPM maxval ${maxval}`);
  const need = width * height * 3;
  if (buffer.length < pos + need) throw new Error("truncated PPM pixel data");
  return { width, height, pixels: new Uint8Array(buffer.subarray(pos, pos + need)) };
}

export function decodeImage(buffer: Buffer, name: string): RgbImage {
  if (name.toLowerCase().endsWith(".ppm")) return decodePpm(buffer);
  if (name.toLowerCase().endsWith(".png")) return decodePng(buffer);
  throw new Error(`unsupported image type: ${name}`);
}

export const SUPPORTED_EXTENSIONS = [".png", ".ppm"];

/**
 * Box-average resize to a square side x side RGB float image in [0, 1].
 * Each source pixel contributes to exactly one target cell, so the result is
 * deterministic and cheap; patches are near-square anyway.
 */
export function boxResize(image: RgbImage, side: number): Float64Array {
  const { width, height, pixels } = image;
  const sums = new Float64Array(side * side * 3);
  const counts = new Float64Array(side * side);
  for (let y = 0; y < height; y++) {
    const ty = Math.min(side - 1, Math.floor((y * side) / height));
    for (let x = 0; x < width; x++) {
      const tx = Math.min(side - 1, Math.floor((x * side) / width));
      const cell = ty * side + tx;
      const s = (y * width + x) * 3;
      sums[cell * 3] += pixels[s];
      sums[cell * 3 + 1] += pixels[s + 1];
      sums[cell * 3 + 2] += pixels[s + 2];
      counts[cell]++;
    }
  }
  const out = new Float64Array(side * side * 3);
  for (let cell = 0; cell < side * side; cell++) {
    const c = counts[cell] || 1;
    out[cell * 3] = sums[cell * 3] / c / 255;
    out[cell * 3 + 1] = sums[cell * 3 + 1] / c / 255;
    out[cell * 3 + 2] = sums[cell * 3 + 2] / c / 255;
  }
  return out;
}
