/** Feature-extraction backbones.
 *
 * The five study backbones are registered with their published feature
 * widths and are loaded from TensorFlow Hub when the environment has
 * network access. The built-in `toycnn` backbone needs no downloads
 * and is what tests and desk-scale runs use.
 */
import * as tf from "@tensorflow/tfjs";

import { IMAGE_SIDE } from "./data";

export interface BackboneSpec {
  slug: string;
  featureDim: number;
  inputSize: number;
  channels: number;
  source: "builtin" | "tfhub";
  hubUrl?: string;
}

export const BACKBONES: Record<string, BackboneSpec> = {
  resnetv2_50: {
    slug: "resnetv2_50",
    featureDim: 2048,
    inputSize: 224,
    channels: 3,
    source: "tfhub",
    hubUrl: "https://tfhub.dev/google/imagenet/resnet_v2_50/feature_vector/5",
  },
  mobilenetv3_large: {
    slug: "mobilenetv3_large",
    featureDim: 1280,
    inputSize: 224,
    channels: 3,
    source: "tfhub",
    hubUrl:
      "https://tfhub.dev/google/imagenet/mobilenet_v3_large_100_224/feature_vector/5",
  },
  efficientnet_b0: {
    slug: "efficientnet_b0",
    featureDim: 1280,
    inputSize: 224,
    channels: 3,
    source: "tfhub",
    hubUrl: "https://tfhub.dev/tensorflow/efficientnet/b0/feature-vector/1",
  },
  inception_v3: {
    slug: "inception_v3",
    featureDim: 2048,
    inputSize: 299,
    channels: 3,
    source: "tfhub",
    hubUrl: "https://tfhub.dev/google/imagenet/inception_v3/feature_vector/5",
  },
  inception_resnet_v2: {
    slug: "inception_resnet_v2",
    featureDim: 1536,
    inputSize: 299,
    channels: 3,
    source: "tfhub",
    hubUrl:
      "https://tfhub.dev/google/imagenet/inception_resnet_v2/feature_vector/5",
  },
  toycnn: {
    slug: "toycnn",
    featureDim: 32,
    inputSize: IMAGE_SIDE,
    channels: 1,
    source: "builtin",
  },
};

export function backboneSpec(slug: string): BackboneSpec {
  const spec = BACKBONES[slug];
  if (!spec) {
    throw new Error(
      `unknown backbone ${slug}; known: ${Object.keys(BACKBONES).join(", ")}`
    );
  }
  return spec;
}

/** Small deterministic convnet ending in a feature vector. */
export function buildToyBackbone(seed = 1): tf.LayersModel {
  const spec = BACKBONES.toycnn;
  const model = tf.sequential({ name: "toycnn_backbone" });
  model.add(
    tf.layers.conv2d({
      inputShape: [spec.inputSize, spec.inputSize, spec.channels],
      filters: 8,
      kernelSize: 3,
      padding: "same",
      activation: "relu",
      kernelInitializer: tf.initializers.glorotUniform({ seed }),
    })
  );
  model.add(tf.layers.maxPooling2d({ poolSize: 2 }));
  model.add(
    tf.layers.conv2d({
      filters: 16,
      kernelSize: 3,
      padding: "same",
      activation: "relu",
      kernelInitializer: tf.initializers.glorotUniform({ seed: seed + 1 }),
    })
  );
  model.add(tf.layers.maxPooling2d({ poolSize: 2 }));
  model.add(tf.layers.flatten());
  model.add(
    tf.layers.dense({
      units: spec.featureDim,
      activation: "relu",
      kernelInitializer: tf.initializers.glorotUniform({ seed: seed + 2 }),
    })
  );
  return model;
}

export async function loadBackbone(
  slug: string,
  seed = 1
): Promise<tf.LayersModel> {
  const spec = backboneSpec(slug);
  if (spec.source === "builtin") {
    return buildToyBackbone(seed);
  }
  throw new Error(
    `backbone ${slug} is loaded from ${spec.hubUrl}; pretrained hub models ` +
      "are unavailable in this offline environment, use toycnn instead"
  );
}

/** Run images through a backbone and return the pooled feature rows. */
export function extractFeatures(
  backbone: tf.LayersModel,
  images: tf.Tensor4D
): Float32Array {
  return tf.tidy(() => {
    const features = backbone.predict(images, { batchSize: 64 }) as tf.Tensor;
    return features.dataSync() as Float32Array;
  });
}
