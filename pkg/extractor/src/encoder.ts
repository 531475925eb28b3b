/**
 * Applies a frozen checkpoint to decoded pixels: box-resize to the encoder's
 * input patch, centre the channels, one linear map, the configured tap, and
 * (by default) L2 normalisation to match the contrastive-feature convention.
 */
import { EncoderCheckpoint } from "./checkpoint";
import { RgbImage, boxResize } from "./image";

export function encodeImage(
  ckpt: EncoderCheckpoint,
  image: RgbImage,
  normalize = true,
): Float32Array {
  const patch = boxResize(image, ckpt.inputSize);
  const fanIn = ckpt.inputSize * ckpt.inputSize * ckpt.channels;
  const centered = new Float64Array(fanIn);
  for (let i = 0; i < fanIn; i++) centered[i] = patch[i] - 0.5;

  const out = new Float32Array(ckpt.outDim);
  for (let row = 0; row < ckpt.outDim; row++) {
    let total = ckpt.bias[row];
    const base = row * fanIn;
    for (let i = 0; i < fanIn; i++) total += ckpt.weights[base + i] * centered[i];
    out[row] = ckpt.tap === "relu" ? Math.max(0, total) : total;
  }

  if (normalize) {
    let norm = 0;
    for (let i = 0; i < out.length; i++) norm += out[i] * out[i];
    norm = Math.sqrt(norm);
    if (norm > 0) {
      for (let i = 0; i < out.length; i++) out[i] /= norm;
    }
  }
  return out;
}
