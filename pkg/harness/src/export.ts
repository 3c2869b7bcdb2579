/** Attack-row bookkeeping and export to the analysis pipeline's
 * records CSV schema (target,surrogate,dataset,AA,H,flags). */
import * as fs from "fs";

import { AttackResultRow, EVAL_THRESHOLD } from "./attack";

export interface ContextRow extends AttackResultRow {
  target: string;
  surrogate: string;
  dataset: string;
}

const ROW_HEADER = "target,surrogate,dataset,epsilon,AA,F1,mean_ssim,role";
const RECORDS_HEADER = "target,surrogate,dataset,AA,H,flags";

export function writeAttackRows(rows: ContextRow[], path: string): void {
  const lines = [ROW_HEADER];
  for (const r of rows) {
    lines.push(
      [r.target, r.surrogate, r.dataset, r.epsilon, r.AA, r.F1, r.meanSsim, r.role].join(",")
    );
  }
  fs.writeFileSync(path, lines.join("\n") + "\n");
}

export function readAttackRows(path: string): ContextRow[] {
  const lines = fs.readFileSync(path, "utf-8").trim().split("\n");
  if (lines[0] !== ROW_HEADER) {
    throw new Error(`${path}: expected header ${ROW_HEADER}`);
  }
  return lines.slice(1).map((line, idx) => {
    const cells = line.split(",");
    if (cells.length !== 8) throw new Error(`${path}:${idx + 2}: short row`);
    return {
      target: cells[0],
      surrogate: cells[1],
      dataset: cells[2],
      epsilon: parseFloat(cells[3]),
      AA: parseFloat(cells[4]),
      F1: parseFloat(cells[5]),
      meanSsim: parseFloat(cells[6]),
      role: cells[7] as ContextRow["role"],
    };
  });
}

/** Optional overlap values keyed by `${target}|${surrogate}|${dataset}`. */
export type OverlapTable = Map<string, number>;

export function readOverlapCsv(path: string): OverlapTable {
  const lines = fs.readFileSync(path, "utf-8").trim().split("\n");
  if (lines[0] !== "target,surrogate,dataset,H") {
    throw new Error(`${path}: expected header target,surrogate,dataset,H`);
  }
  const table: OverlapTable = new Map();
  for (const line of lines.slice(1)) {
    const [target, surrogate, dataset, h] = line.split(",");
    table.set(`${target}|${surrogate}|${dataset}`, parseFloat(h));
  }
  return table;
}

/** Emit one analysis record per transfer pair at the evaluation
 * threshold; H comes from the overlap table when provided, otherwise
 * the row is flagged missing_H. */
export function exportAttackTable(
  rows: ContextRow[],
  path: string,
  overlaps?: OverlapTable
): number {
  const lines = [RECORDS_HEADER];
  const byPair = new Map<string, ContextRow>();
  for (const row of rows) {
    if (row.role !== "transfer") continue;
    const key = `${row.target}|${row.surrogate}|${row.dataset}`;
    const seen = byPair.get(key);
    const closer =
      !seen ||
      Math.abs(row.epsilon - EVAL_THRESHOLD) < Math.abs(seen.epsilon - EVAL_THRESHOLD);
    if (closer) byPair.set(key, row);
  }
  for (const [key, row] of byPair) {
    const overlap = overlaps?.get(key);
    const aa = Math.min(1, Math.max(0, row.AA));
    if (overlap === undefined) {
      lines.push(`${row.target},${row.surrogate},${row.dataset},${aa},,missing_H`);
    } else {
      lines.push(`${row.target},${row.surrogate},${row.dataset},${aa},${overlap},`);
    }
  }
  if (byPair.size === 0) {
    console.warn("export: no transfer rows, writing a header-only file");
  }
  fs.writeFileSync(path, lines.join("\n") + "\n");
  return byPair.size;
}
