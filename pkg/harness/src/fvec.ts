/** FVEC v1 feature-matrix container (little-endian).
 *
 * Layout: magic "XMFV" | version u8=1 | dtype u8=1 (f32) | reserved
 * u16=0 | rows u64 | cols u64 | rows*cols f32 row-major | label_count
 * u64 (0 or rows) | label_count u32 labels.
 *
 * This is the interchange format with the analysis pipeline, so the
 * writer must produce byte-exact files the pipeline's reader accepts.
 */
import * as fs from "fs";

export const FVEC_MAGIC = "XMFV";
const HEADER_BYTES = 24;

export interface FeatureMatrix {
  rows: number;
  cols: number;
  /** row-major, length rows*cols, finite values only */
  values: Float32Array;
  labels?: Uint32Array;
}

export function matrixFrom2d(rows: number[][], labels?: number[]): FeatureMatrix {
  const r = rows.length;
  const c = rows[0].length;
  const values = new Float32Array(r * c);
  rows.forEach((row, i) => {
    if (row.length !== c) throw new Error(`ragged row ${i}`);
    values.set(row, i * c);
  });
  return {
    rows: r,
    cols: c,
    values,
    labels: labels ? Uint32Array.from(labels) : undefined,
  };
}

function assertValid(m: FeatureMatrix): void {
  if (m.rows < 1 || m.cols < 1) throw new Error("empty matrix");
  if (m.values.length !== m.rows * m.cols) {
    throw new Error(`values length ${m.values.length} != rows*cols`);
  }
  for (let i = 0; i < m.values.length; i++) {
    if (!Number.isFinite(m.values[i])) {
      throw new Error(`non-finite value at index ${i}`);
    }
  }
  if (m.labels && m.labels.length !== m.rows) {
    throw new Error(`label count ${m.labels.length} must equal rows ${m.rows}`);
  }
}

export function encodeFvec(m: FeatureMatrix): Buffer {
  assertValid(m);
  const labelCount = m.labels ? m.labels.length : 0;
  const size = HEADER_BYTES + m.values.length * 4 + 8 + labelCount * 4;
  const buf = Buffer.alloc(size);
  let offset = 0;
  buf.write(FVEC_MAGIC, offset, "ascii");
  offset += 4;
  buf.writeUInt8(1, offset++); // version
  buf.writeUInt8(1, offset++); // dtype f32
  buf.writeUInt16LE(0, offset);
  offset += 2;
  buf.writeBigUInt64LE(BigInt(m.rows), offset);
  offset += 8;
  buf.writeBigUInt64LE(BigInt(m.cols), offset);
  offset += 8;
  for (let i = 0; i < m.values.length; i++) {
    buf.writeFloatLE(m.values[i], offset);
    offset += 4;
  }
  buf.writeBigUInt64LE(BigInt(labelCount), offset);
  offset += 8;
  if (m.labels) {
    for (let i = 0; i < m.labels.length; i++) {
      buf.writeUInt32LE(m.labels[i], offset);
      offset += 4;
    }
  }
  return buf;
}

export function writeFvec(m: FeatureMatrix, path: string): void {
  fs.writeFileSync(path, encodeFvec(m));
}

export function readFvec(path: string): FeatureMatrix {
  const buf = fs.readFileSync(path);
  if (buf.length < HEADER_BYTES) throw new Error(`${path}: truncated header`);
  if (buf.toString("ascii", 0, 4) !== FVEC_MAGIC) {
    throw new Error(`${path}: bad magic`);
  }
  if (buf.readUInt8(4) !== 1) throw new Error(`${path}: unsupported version`);
  if (buf.readUInt8(5) !== 1) throw new Error(`${path}: unsupported dtype`);
  const rows = Number(buf.readBigUInt64LE(8));
  const cols = Number(buf.readBigUInt64LE(16));
  if (rows === 0 || cols === 0) throw new Error(`${path}: empty matrix`);
  let offset = HEADER_BYTES;
  const count = rows * cols;
  if (buf.length < offset + count * 4 + 8) throw new Error(`${path}: truncated payload`);
  const values = new Float32Array(count);
  for (let i = 0; i < count; i++) {
    values[i] = buf.readFloatLE(offset);
    offset += 4;
    if (!Number.isFinite(values[i])) throw new Error(`${path}: non-finite payload`);
  }
  const labelCount = Number(buf.readBigUInt64LE(offset));
  offset += 8;
  let labels: Uint32Array | undefined;
  if (labelCount > 0) {
    if (labelCount !== rows) throw new Error(`${path}: label_count must be 0 or rows`);
    if (buf.length < offset + labelCount * 4) throw new Error(`${path}: truncated labels`);
    labels = new Uint32Array(labelCount);
    for (let i = 0; i < labelCount; i++) {
      labels[i] = buf.readUInt32LE(offset);
      offset += 4;
    }
  }
  return { rows, cols, values, labels };
}
