/** Fast gradient sign attacks and their evaluation.
 *
 * The adversarial image is x* = clip(x + eps * sign(grad_x loss), 0, 1),
 * so per pixel |x* - x| never exceeds eps, with equality wherever the
 * gradient is nonzero and the clip is inactive. Evaluation reports the
 * average accuracy (AA) of the attacked model, the macro F1 score, and
 * the mean SSIM of attacked versus clean images.
 */
import * as tf from "@tensorflow/tfjs";

import { meanSsim } from "./ssim";

export const EVAL_THRESHOLD = 8 / 255; // ~0.03

export type AttackRole = "surrogate_self" | "transfer";

export interface AttackResultRow {
  epsilon: number;
  AA: number;
  F1: number;
  meanSsim: number;
  role: AttackRole;
}

export function fgsmAttack(
  model: tf.LayersModel,
  images: tf.Tensor4D,
  labels: Int32Array,
  epsilon: number,
  options: { clip?: boolean; numClasses?: number } = {}
): tf.Tensor4D {
  if (epsilon < 0) throw new Error(`epsilon must be >= 0, got ${epsilon}`);
  if (images.shape[0] !== labels.length) {
    throw new Error(
      `image count ${images.shape[0]} != label count ${labels.length}`
    );
  }
  const clip = options.clip ?? true;
  const numClasses = options.numClasses ?? (model.outputs[0].shape[1] as number);
  return tf.tidy(() => {
    const oneHot = tf.oneHot(tf.tensor1d(labels, "int32"), numClasses);
    const lossOf = (x: tf.Tensor) =>
      tf.losses.softmaxCrossEntropy(
        oneHot,
        model.apply(x, { training: false }) as tf.Tensor
      ) as tf.Tensor;
    const grads = tf.grad(lossOf)(images);
    const perturbed = images.add(grads.sign().mul(epsilon)) as tf.Tensor4D;
    return (clip ? perturbed.clipByValue(0, 1) : perturbed) as tf.Tensor4D;
  });
}

export function evaluateAttack(
  model: tf.LayersModel,
  attacked: tf.Tensor4D,
  labels: Int32Array,
  clean: tf.Tensor4D,
  epsilon: number,
  role: AttackRole
): AttackResultRow {
  if (attacked.shape[0] !== labels.length) {
    throw new Error(
      `image count ${attacked.shape[0]} != label count ${labels.length}`
    );
  }
  const numClasses = model.outputs[0].shape[1] as number;
  const predictions = tf.tidy(() => {
    const logits = model.predict(attacked, { batchSize: 64 }) as tf.Tensor;
    return logits.argMax(-1).dataSync() as Int32Array;
  });

  let correct = 0;
  const tp = new Array(numClasses).fill(0);
  const fp = new Array(numClasses).fill(0);
  const fn = new Array(numClasses).fill(0);
  for (let i = 0; i < labels.length; i++) {
    if (predictions[i] === labels[i]) {
      correct++;
      tp[labels[i]]++;
    } else {
      fp[predictions[i]]++;
      fn[labels[i]]++;
    }
  }
  let f1Total = 0;
  for (let c = 0; c < numClasses; c++) {
    const denom = 2 * tp[c] + fp[c] + fn[c];
    f1Total += denom === 0 ? 0 : (2 * tp[c]) / denom;
  }

  const side = attacked.shape[1] as number;
  const ssimValue = meanSsim(
    attacked.dataSync() as Float32Array,
    clean.dataSync() as Float32Array,
    labels.length,
    side
  );

  return {
    epsilon,
    AA: correct / labels.length,
    F1: f1Total / numClasses,
    meanSsim: ssimValue,
    role,
  };
}
