/** Interop with the analysis pipeline: FVEC files written here must be
 * accepted byte-exactly by its reader, and exported records must pass
 * its analyze command's schema validation. */
import { execFileSync } from "child_process";
import * as fs from "fs";
import * as os from "os";
import * as path from "path";

import { describe, expect, it } from "vitest";

import { BACKBONES } from "../src/backbones";
import { makeDataset } from "../src/data";
import { writeFvec } from "../src/fvec";
import { exportAttackTable, readOverlapCsv, ContextRow } from "../src/export";

const PYTHON = process.env.PYTHON ?? "python3";

function tmpDir(): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), "interop-"));
}

function python(code: string): string {
  return execFileSync(PYTHON, ["-c", code], { encoding: "utf-8" });
}

describe("pipeline interop", () => {
  it("registers the study backbones with their published feature widths", () => {
    expect(BACKBONES.resnetv2_50.featureDim).toBe(2048);
    expect(BACKBONES.mobilenetv3_large.featureDim).toBe(1280);
    expect(BACKBONES.efficientnet_b0.featureDim).toBe(1280);
    expect(BACKBONES.inception_v3.featureDim).toBe(2048);
    expect(BACKBONES.inception_resnet_v2.featureDim).toBe(1536);
  });

  it("writes FVEC files the pipeline reads back byte-exactly", () => {
    const dir = tmpDir();
    const data = makeDataset(12, 3);
    const file = path.join(dir, "features.fvec");
    writeFvec(
      {
        rows: data.count,
        cols: data.side * data.side,
        values: data.images,
        labels: Uint32Array.from(data.labels),
      },
      file
    );
    const echoed = path.join(dir, "echoed.fvec");
    const out = python(
      `import xmanifold as xm\n` +
        `m = xm.read_fvec(${JSON.stringify(file)})\n` +
        `xm.write_fvec(m, ${JSON.stringify(echoed)})\n` +
        `print(m.rows, m.cols, int(m.labels.sum()))\n`
    );
    expect(out.trim()).toBe(`12 ${data.side * data.side} 6`);
    expect(fs.readFileSync(echoed).equals(fs.readFileSync(file))).toBe(true);
  });

  it("exports records the pipeline's analyze command accepts", () => {
    const dir = tmpDir();
    const rowsFile = path.join(dir, "records.csv");
    const hFile = path.join(dir, "h.csv");
    fs.writeFileSync(
      hFile,
      "target,surrogate,dataset,H\n" +
        "toycnn_b,toycnn,synthA,0.12\n" +
        "toycnn_b,toycnn,synthB,0.71\n"
    );
    const rows: ContextRow[] = [
      {
        epsilon: 0.03, AA: 0.82, F1: 0.8, meanSsim: 0.94,
        role: "transfer", target: "toycnn_b", surrogate: "toycnn", dataset: "synthA",
      },
      {
        epsilon: 0.03, AA: 0.21, F1: 0.2, meanSsim: 0.93,
        role: "transfer", target: "toycnn_b", surrogate: "toycnn", dataset: "synthB",
      },
    ];
    exportAttackTable(rows, rowsFile, readOverlapCsv(hFile));
    const out = execFileSync(
      PYTHON,
      ["-m", "xmanifold", "analyze", rowsFile, "--output-dir", dir],
      { encoding: "utf-8" }
    );
    const report = JSON.parse(out);
    expect(report.correlation.n_used).toBe(2);
    expect(report.correlation.rho).toBeCloseTo(-1.0, 6);
  });
});
