/** Full pipeline through the built CLI: extract -> train-head ->
 * attack -> evaluate -> export. Requires `tsc` to have run (the test
 * script builds first). */
import { execFileSync } from "child_process";
import * as fs from "fs";
import * as os from "os";
import * as path from "path";

import { describe, expect, it } from "vitest";

import { readFvec } from "../src/fvec";
import { readAttackRows } from "../src/export";

const CLI = path.resolve(__dirname, "../dist/cli.js");

function run(args: string[], allowFail = false): { stdout: string; status: number } {
  try {
    const stdout = execFileSync("node", [CLI, ...args], { encoding: "utf-8" });
    return { stdout, status: 0 };
  } catch (err: any) {
    if (!allowFail) throw err;
    return { stdout: String(err.stdout ?? ""), status: err.status ?? 1 };
  }
}

describe("harness cli", () => {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), "harness-cli-"));

  it("drives the whole attack pipeline", () => {
    const features = path.join(dir, "features.fvec");
    const extract = JSON.parse(
      run(["extract", "--backbone", "toycnn", "--dataset", "synthetic:40:3", "--out", features]).stdout
    );
    expect(extract.cols).toBe(32);
    expect(readFvec(features).rows).toBe(40);

    const surrogateModel = path.join(dir, "surrogate.json");
    const trained = JSON.parse(
      run([
        "train-head", "--backbone", "toycnn", "--dataset", "synthetic:160:7",
        "--seed", "1", "--max-epochs", "30", "--out", surrogateModel,
      ]).stdout
    );
    expect(trained.epochs).toBeGreaterThan(0);
    expect(trained.loss).toBeLessThan(1.0);

    const targetModel = path.join(dir, "target.json");
    run([
      "train-head", "--backbone", "toycnn", "--dataset", "synthetic:160:8",
      "--seed", "2", "--max-epochs", "30", "--out", targetModel,
    ]);

    const attackDir = path.join(dir, "attack");
    const rowsFile = path.join(dir, "rows.csv");
    const attack = JSON.parse(
      run([
        "attack", "--model", surrogateModel, "--dataset", "synthetic:120:9",
        "--epsilons", "0,0.03,0.1", "--surrogate", "toycnn",
        "--dataset-name", "synthA", "--out-dir", attackDir, "--rows", rowsFile,
      ]).stdout
    );
    expect(attack.self_AA.length).toBe(3);
    expect(fs.existsSync(path.join(attackDir, "attacked_eps0p03.fvec"))).toBe(true);
    expect(fs.existsSync(path.join(attackDir, "clean.fvec"))).toBe(true);

    for (const [epsilon, name] of [[0.03, "synthA"], [0.1, "synthB"]] as const) {
      const tag = String(epsilon).replace(".", "p");
      run([
        "evaluate", "--model", targetModel,
        "--images", path.join(attackDir, `attacked_eps${tag}.fvec`),
        "--clean", path.join(attackDir, "clean.fvec"),
        "--epsilon", String(epsilon), "--role", "transfer",
        "--target", "toycnn_b", "--surrogate", "toycnn",
        "--dataset-name", name, "--rows", rowsFile,
      ]);
    }
    const rows = readAttackRows(rowsFile);
    expect(rows.filter((r) => r.role === "transfer").length).toBe(2);
    expect(rows.filter((r) => r.role === "surrogate_self").length).toBe(3);

    const records = path.join(dir, "records.csv");
    const exported = JSON.parse(
      run(["export", "--rows", rowsFile, "--out", records]).stdout
    );
    expect(exported.records).toBe(2);
    const lines = fs.readFileSync(records, "utf-8").trim().split("\n");
    expect(lines[0]).toBe("target,surrogate,dataset,AA,H,flags");
    expect(lines.length).toBe(3);
    expect(lines[1]).toContain("missing_H");
  });

  it("reads defaults from a config file", () => {
    const config = path.join(dir, "harness.cfg");
    fs.writeFileSync(config, "[extract]\ndataset = synthetic:17:4\n");
    const out = path.join(dir, "cfg_features.fvec");
    run(["extract", "--config", config, "--out", out]);
    expect(readFvec(out).rows).toBe(17);
  });

  it("fails fast on unknown backbones and unknown flags", () => {
    const bad = run(
      ["extract", "--backbone", "vgg19", "--out", path.join(dir, "x.fvec")],
      true
    );
    expect(bad.status).not.toBe(0);
    const badFlag = run(["extract", "--bogus", "1"], true);
    expect(badFlag.status).not.toBe(0);
  });
});
