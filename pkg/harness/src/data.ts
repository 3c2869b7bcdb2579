/** Deterministic two-class toy image set.
 *
 * 16x16 grayscale images: class 0 is bright in the top half, class 1 in
 * the bottom half, plus per-pixel noise. Every pixel is quantized to
 * k/256 (exactly representable in float32), mirroring 8-bit image data
 * and making adversarial-perturbation arithmetic exact for dyadic
 * epsilons.
 */
import { mulberry32 } from "./prng";

export const IMAGE_SIDE = 16;
export const NUM_CLASSES = 2;

export interface Dataset {
  /** flattened row-major images, [count * side * side], values in [0,1] */
  images: Float32Array;
  labels: Int32Array;
  count: number;
  side: number;
}

export function quantize(v: number): number {
  const clipped = Math.min(1.0, Math.max(0.0, v));
  return Math.round(clipped * 256) / 256;
}

export function makeDataset(count: number, seed: number): Dataset {
  const rand = mulberry32(seed);
  const side = IMAGE_SIDE;
  const images = new Float32Array(count * side * side);
  const labels = new Int32Array(count);
  // the per-pixel class margin is small (+-0.06) so sign-gradient
  // perturbations of comparable size genuinely erase the signal
  for (let i = 0; i < count; i++) {
    const label = i % NUM_CLASSES;
    labels[i] = label;
    for (let y = 0; y < side; y++) {
      const brightHalf = label === 0 ? y < side / 2 : y >= side / 2;
      for (let x = 0; x < side; x++) {
        const base = brightHalf ? 0.56 : 0.44;
        const noise = (rand() - 0.5) * 0.24;
        images[i * side * side + y * side + x] = quantize(base + noise);
      }
    }
  }
  return { images, labels, count, side };
}

/** Parse a dataset spec of the form "synthetic:<count>:<seed>". */
export function parseDatasetSpec(spec: string): Dataset {
  const parts = spec.split(":");
  if (parts[0] !== "synthetic") {
    throw new Error(
      `unreadable dataset ${spec}: only "synthetic:<count>:<seed>" specs are ` +
        "supported in this environment (image directories need a decoder backend)"
    );
  }
  const count = parts.length > 1 ? parseInt(parts[1], 10) : 200;
  const seed = parts.length > 2 ? parseInt(parts[2], 10) : 0;
  if (!Number.isFinite(count) || count < 1) {
    throw new Error(`unreadable dataset ${spec}: bad count`);
  }
  return makeDataset(count, seed);
}
