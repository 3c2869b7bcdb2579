/** Classification heads over frozen backbones.
 *
 * The head is a dropout layer followed by one dense layer producing
 * logits; only the head trains, the backbone weights stay frozen.
 * Training runs until the training and validation losses stop
 * improving (early stopping on validation loss).
 */
import * as fs from "fs";

import * as tf from "@tensorflow/tfjs";

import { backboneSpec, buildToyBackbone } from "./backbones";
import { NUM_CLASSES } from "./data";

export interface HeadModel {
  model: tf.LayersModel;
  backbone: string;
  seed: number;
  dropoutRate: number;
  numClasses: number;
}

export function attachHead(
  backboneModel: tf.LayersModel,
  backbone: string,
  options: { numClasses?: number; seed?: number; dropoutRate?: number } = {}
): HeadModel {
  const numClasses = options.numClasses ?? NUM_CLASSES;
  const seed = options.seed ?? 1;
  const dropoutRate = options.dropoutRate ?? 0.3;
  backboneModel.trainable = false;

  const shape = backboneModel.inputs[0].shape.slice(1) as number[];
  const input = tf.input({ shape });
  const features = backboneModel.apply(input) as tf.SymbolicTensor;
  const dropped = tf.layers
    .dropout({ rate: dropoutRate, seed })
    .apply(features) as tf.SymbolicTensor;
  const logits = tf.layers
    .dense({
      units: numClasses,
      name: "head_logits",
      kernelInitializer: tf.initializers.glorotUniform({ seed: seed + 7 }),
    })
    .apply(dropped) as tf.SymbolicTensor;
  const model = tf.model({ inputs: input, outputs: logits });
  return { model, backbone, seed, dropoutRate, numClasses };
}

export interface TrainResult {
  epochs: number;
  finalLoss: number;
  finalValLoss: number;
}

export async function trainHead(
  head: HeadModel,
  images: tf.Tensor4D,
  labels: Int32Array,
  options: { maxEpochs?: number; patience?: number; learningRate?: number } = {}
): Promise<TrainResult> {
  const maxEpochs = options.maxEpochs ?? 80;
  const patience = options.patience ?? 6;
  const lr = options.learningRate ?? 0.02;
  head.model.compile({
    optimizer: tf.train.adam(lr),
    loss: (t, p) => tf.losses.softmaxCrossEntropy(t, p),
  });
  const oneHot = tf.oneHot(tf.tensor1d(labels, "int32"), head.numClasses);
  const history = await head.model.fit(images, oneHot, {
    epochs: maxEpochs,
    batchSize: 32,
    validationSplit: 0.25,
    shuffle: false,
    verbose: 0,
    callbacks: tf.callbacks.earlyStopping({
      monitor: "val_loss",
      patience,
    }),
  });
  oneHot.dispose();
  const losses = history.history["loss"] as number[];
  const valLosses = history.history["val_loss"] as number[];
  return {
    epochs: losses.length,
    finalLoss: losses[losses.length - 1],
    finalValLoss: valLosses[valLosses.length - 1],
  };
}

interface SavedModel {
  backbone: string;
  seed: number;
  dropoutRate: number;
  numClasses: number;
  weights: { shape: number[]; data: number[] }[];
}

export function saveHeadModel(head: HeadModel, path: string): void {
  const weights = head.model.getWeights().map((w) => ({
    shape: w.shape.slice(),
    data: Array.from(w.dataSync()),
  }));
  const payload: SavedModel = {
    backbone: head.backbone,
    seed: head.seed,
    dropoutRate: head.dropoutRate,
    numClasses: head.numClasses,
    weights,
  };
  fs.writeFileSync(path, JSON.stringify(payload));
}

export function loadHeadModel(path: string): HeadModel {
  const payload = JSON.parse(fs.readFileSync(path, "utf-8")) as SavedModel;
  const spec = backboneSpec(payload.backbone);
  if (spec.source !== "builtin") {
    throw new Error(
      `saved model uses hub backbone ${payload.backbone}, unavailable offline`
    );
  }
  const head = attachHead(buildToyBackbone(payload.seed), payload.backbone, {
    numClasses: payload.numClasses,
    seed: payload.seed,
    dropoutRate: payload.dropoutRate,
  });
  head.model.setWeights(
    payload.weights.map((w) => tf.tensor(w.data, w.shape as number[]))
  );
  return head;
}
