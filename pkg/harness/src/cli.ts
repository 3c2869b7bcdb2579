#!/usr/bin/env node
/** Harness CLI: extract features, train heads, attack, evaluate, export.
 *
 * extract     dataset + backbone -> feature FVEC (labels included)
 * train-head  dataset + backbone -> frozen-backbone classifier (JSON)
 * attack      model + dataset + epsilon grid -> adversarial FVECs +
 *             self-evaluation rows
 * evaluate    model + attacked/clean FVECs -> one transfer row
 * export      rows CSV (+ optional overlap CSV) -> analysis records CSV
 */
import * as fs from "fs";
import * as path from "path";

import * as tf from "@tensorflow/tfjs";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { evaluateAttack, fgsmAttack, AttackRole } from "./attack";
import { backboneSpec, extractFeatures, loadBackbone } from "./backbones";
import { readConfig, setting, Config } from "./config";
import { Dataset, parseDatasetSpec } from "./data";
import { matrixFrom2d, readFvec, writeFvec, FeatureMatrix } from "./fvec";
import { attachHead, loadHeadModel, saveHeadModel, trainHead } from "./model";
import {
  ContextRow,
  exportAttackTable,
  readAttackRows,
  readOverlapCsv,
  writeAttackRows,
} from "./export";

function imagesTensor(data: Dataset): tf.Tensor4D {
  return tf.tensor4d(data.images, [data.count, data.side, data.side, 1]);
}

function datasetToMatrix(data: Dataset): FeatureMatrix {
  return {
    rows: data.count,
    cols: data.side * data.side,
    values: data.images,
    labels: Uint32Array.from(data.labels),
  };
}

function matrixToImages(m: FeatureMatrix): { tensor: tf.Tensor4D; labels: Int32Array } {
  const side = Math.round(Math.sqrt(m.cols));
  if (side * side !== m.cols) {
    throw new Error(`matrix width ${m.cols} is not a square image`);
  }
  if (!m.labels) throw new Error("image FVEC must carry labels");
  return {
    tensor: tf.tensor4d(m.values, [m.rows, side, side, 1]),
    labels: Int32Array.from(m.labels),
  };
}

function loadConfigSection(configPath: string | undefined, section: string) {
  if (!configPath) return undefined;
  const config: Config = readConfig(configPath);
  return config[section];
}

async function cmdExtract(argv: any): Promise<void> {
  const section = loadConfigSection(argv.config, "extract");
  const slug = setting<string>(argv.backbone, section, "backbone", String, "toycnn");
  const spec = setting<string>(argv.dataset, section, "dataset", String, "synthetic:200:7");
  const seed = setting<number>(argv.seed, section, "seed", Number, 1);
  const data = parseDatasetSpec(spec);
  const backbone = await loadBackbone(slug, seed);
  const images = imagesTensor(data);
  const features = extractFeatures(backbone, images);
  images.dispose();
  const dim = backboneSpec(slug).featureDim;
  writeFvec(
    {
      rows: data.count,
      cols: dim,
      values: features,
      labels: Uint32Array.from(data.labels),
    },
    argv.out
  );
  console.log(
    JSON.stringify({ command: "extract", backbone: slug, rows: data.count, cols: dim, out: argv.out })
  );
}

async function cmdTrainHead(argv: any): Promise<void> {
  const section = loadConfigSection(argv.config, "train-head");
  const slug = setting<string>(argv.backbone, section, "backbone", String, "toycnn");
  const spec = setting<string>(argv.dataset, section, "dataset", String, "synthetic:400:7");
  const seed = setting<number>(argv.seed, section, "seed", Number, 1);
  const maxEpochs = setting<number>(argv.maxEpochs, section, "max_epochs", Number, 80);
  const dropout = setting<number>(argv.dropout, section, "dropout", Number, 0.3);
  const data = parseDatasetSpec(spec);
  const backbone = await loadBackbone(slug, seed);
  const head = attachHead(backbone, slug, { seed, dropoutRate: dropout });
  const images = imagesTensor(data);
  const result = await trainHead(head, images, data.labels, { maxEpochs });
  images.dispose();
  saveHeadModel(head, argv.out);
  console.log(
    JSON.stringify({
      command: "train-head",
      backbone: slug,
      epochs: result.epochs,
      loss: result.finalLoss,
      val_loss: result.finalValLoss,
      out: argv.out,
    })
  );
}

async function cmdAttack(argv: any): Promise<void> {
  const section = loadConfigSection(argv.config, "attack");
  const spec = setting<string>(argv.dataset, section, "dataset", String, "synthetic:200:9");
  const epsilons = String(
    setting<string>(argv.epsilons, section, "epsilons", String, "0,0.01,0.03,0.1")
  )
    .split(",")
    .map((e) => parseFloat(e));
  const surrogate = setting<string>(argv.surrogate, section, "surrogate", String, "toycnn");
  const datasetName = setting<string>(
    argv.datasetName, section, "dataset_name", String, "synthetic"
  );
  const head = loadHeadModel(argv.model);
  const data = parseDatasetSpec(spec);
  const clean = imagesTensor(data);
  fs.mkdirSync(argv.outDir, { recursive: true });
  writeFvec(datasetToMatrix(data), path.join(argv.outDir, "clean.fvec"));

  const rows: ContextRow[] = [];
  for (const epsilon of epsilons) {
    const attacked = fgsmAttack(head.model, clean, data.labels, epsilon);
    const row = evaluateAttack(
      head.model, attacked, data.labels, clean, epsilon, "surrogate_self"
    );
    rows.push({ ...row, target: surrogate, surrogate, dataset: datasetName });
    const tag = epsilon.toString().replace(".", "p");
    writeFvec(
      {
        rows: data.count,
        cols: data.side * data.side,
        values: attacked.dataSync() as Float32Array,
        labels: Uint32Array.from(data.labels),
      },
      path.join(argv.outDir, `attacked_eps${tag}.fvec`)
    );
    attacked.dispose();
  }
  clean.dispose();
  writeAttackRows(rows, argv.rows);
  console.log(
    JSON.stringify({
      command: "attack",
      epsilons,
      rows: argv.rows,
      out_dir: argv.outDir,
      self_AA: rows.map((r) => [r.epsilon, r.AA]),
    })
  );
}

async function cmdEvaluate(argv: any): Promise<void> {
  const head = loadHeadModel(argv.model);
  const attackedMatrix = readFvec(argv.images);
  const cleanMatrix = readFvec(argv.clean);
  const attacked = matrixToImages(attackedMatrix);
  const clean = matrixToImages(cleanMatrix);
  const row = evaluateAttack(
    head.model,
    attacked.tensor,
    attacked.labels,
    clean.tensor,
    argv.epsilon,
    argv.role as AttackRole
  );
  const context: ContextRow = {
    ...row,
    target: argv.target,
    surrogate: argv.surrogate,
    dataset: argv.datasetName,
  };
  const existing = fs.existsSync(argv.rows) ? readAttackRows(argv.rows) : [];
  existing.push(context);
  writeAttackRows(existing, argv.rows);
  attacked.tensor.dispose();
  clean.tensor.dispose();
  console.log(JSON.stringify({ command: "evaluate", ...context }));
}

async function cmdExport(argv: any): Promise<void> {
  const rows = readAttackRows(argv.rows);
  const overlaps = argv.overlaps ? readOverlapCsv(argv.overlaps) : undefined;
  const count = exportAttackTable(rows, argv.out, overlaps);
  console.log(JSON.stringify({ command: "export", records: count, out: argv.out }));
}

export async function main(args: string[]): Promise<number> {
  try {
    await yargs(args)
      .scriptName("tba-harness")
      .strict()
      .demandCommand(1)
      .option("config", { type: "string", describe: "key = value config file" })
      .command(
        "extract",
        "extract backbone features to an FVEC file",
        (y) =>
          y
            .option("backbone", { type: "string" })
            .option("dataset", { type: "string" })
            .option("seed", { type: "number" })
            .option("out", { type: "string", demandOption: true }),
        cmdExtract
      )
      .command(
        "train-head",
        "train a classification head on a frozen backbone",
        (y) =>
          y
            .option("backbone", { type: "string" })
            .option("dataset", { type: "string" })
            .option("seed", { type: "number" })
            .option("max-epochs", { type: "number" })
            .option("dropout", { type: "number" })
            .option("out", { type: "string", demandOption: true }),
        cmdTrainHead
      )
      .command(
        "attack",
        "run FGSM attacks over an epsilon grid",
        (y) =>
          y
            .option("model", { type: "string", demandOption: true })
            .option("dataset", { type: "string" })
            .option("epsilons", { type: "string" })
            .option("surrogate", { type: "string" })
            .option("dataset-name", { type: "string" })
            .option("out-dir", { type: "string", demandOption: true })
            .option("rows", { type: "string", demandOption: true }),
        cmdAttack
      )
      .command(
        "evaluate",
        "evaluate attacked images against a (target) model",
        (y) =>
          y
            .option("model", { type: "string", demandOption: true })
            .option("images", { type: "string", demandOption: true })
            .option("clean", { type: "string", demandOption: true })
            .option("epsilon", { type: "number", demandOption: true })
            .option("role", {
              type: "string",
              choices: ["surrogate_self", "transfer"],
              default: "transfer",
            })
            .option("target", { type: "string", demandOption: true })
            .option("surrogate", { type: "string", demandOption: true })
            .option("dataset-name", { type: "string", default: "synthetic" })
            .option("rows", { type: "string", demandOption: true }),
        cmdEvaluate
      )
      .command(
        "export",
        "export analysis records CSV from attack rows",
        (y) =>
          y
            .option("rows", { type: "string", demandOption: true })
            .option("overlaps", { type: "string" })
            .option("out", { type: "string", demandOption: true }),
        cmdExport
      )
      .fail((msg, err) => {
        throw err ?? new Error(msg);
      })
      .parseAsync();
    return 0;
  } catch (err) {
    console.error(`tba-harness: ${(err as Error).message}`);
    return 1;
  }
}

if (require.main === module) {
  main(hideBin(process.argv)).then((code) => {
    process.exitCode = code;
  });
}
