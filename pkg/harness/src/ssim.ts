/** Structural similarity (Wang et al. 2004): 11x11 Gaussian window with
 * sigma 1.5, K1=0.01, K2=0.03, on single-channel images. Inputs live in
 * [0, 1], so the dynamic range L defaults to 1. */

const WINDOW = 11;
const SIGMA = 1.5;
const K1 = 0.01;
const K2 = 0.03;

function gaussianKernel(): Float64Array {
  const half = (WINDOW - 1) / 2;
  const kernel = new Float64Array(WINDOW * WINDOW);
  let total = 0;
  for (let y = 0; y < WINDOW; y++) {
    for (let x = 0; x < WINDOW; x++) {
      const dy = y - half;
      const dx = x - half;
      const v = Math.exp(-(dx * dx + dy * dy) / (2 * SIGMA * SIGMA));
      kernel[y * WINDOW + x] = v;
      total += v;
    }
  }
  for (let i = 0; i < kernel.length; i++) kernel[i] /= total;
  return kernel;
}

const KERNEL = gaussianKernel();

export interface Image {
  width: number;
  height: number;
  /** row-major grayscale values in [0, 1] */
  data: Float32Array | Float64Array;
}

/** Mean SSIM over all valid window positions of two equally sized images. */
export function ssim(a: Image, b: Image, dynamicRange = 1.0): number {
  if (a.width !== b.width || a.height !== b.height) {
    throw new Error("ssim requires equally sized images");
  }
  if (a.width < WINDOW || a.height < WINDOW) {
    throw new Error(`images must be at least ${WINDOW}x${WINDOW}`);
  }
  const c1 = (K1 * dynamicRange) ** 2;
  const c2 = (K2 * dynamicRange) ** 2;
  let total = 0;
  let windows = 0;
  for (let top = 0; top + WINDOW <= a.height; top++) {
    for (let left = 0; left + WINDOW <= a.width; left++) {
      let muA = 0;
      let muB = 0;
      for (let y = 0; y < WINDOW; y++) {
        for (let x = 0; x < WINDOW; x++) {
          const w = KERNEL[y * WINDOW + x];
          muA += w * a.data[(top + y) * a.width + (left + x)];
          muB += w * b.data[(top + y) * b.width + (left + x)];
        }
      }
      let varA = 0;
      let varB = 0;
      let cov = 0;
      for (let y = 0; y < WINDOW; y++) {
        for (let x = 0; x < WINDOW; x++) {
          const w = KERNEL[y * WINDOW + x];
          const da = a.data[(top + y) * a.width + (left + x)] - muA;
          const db = b.data[(top + y) * b.width + (left + x)] - muB;
          varA += w * da * da;
          varB += w * db * db;
          cov += w * da * db;
        }
      }
      total +=
        ((2 * muA * muB + c1) * (2 * cov + c2)) /
        ((muA * muA + muB * muB + c1) * (varA + varB + c2));
      windows++;
    }
  }
  return total / windows;
}

/** Average SSIM across a batch of flattened square images. */
export function meanSsim(
  batchA: Float32Array,
  batchB: Float32Array,
  count: number,
  side: number,
  dynamicRange = 1.0
): number {
  if (batchA.length !== batchB.length || batchA.length !== count * side * side) {
    throw new Error("batch shapes disagree");
  }
  let total = 0;
  for (let i = 0; i < count; i++) {
    const offset = i * side * side;
    total += ssim(
      { width: side, height: side, data: batchA.subarray(offset, offset + side * side) },
      { width: side, height: side, data: batchB.subarray(offset, offset + side * side) },
      dynamicRange
    );
  }
  return total / count;
}
