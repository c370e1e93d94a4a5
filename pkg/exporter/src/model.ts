/**
 * Scalar-output classifiers: sign(f(x)) is the predicted class.
 *
 * The image model is a four-layer convolutional network with ReLU
 * activations (two strided convolutions, two dense layers) ending in a
 * single linear logit; training minimizes the sigmoid cross-entropy of that
 * logit. Initializer seeds and fixed-order balanced batches make runs
 * reproducible up to framework arithmetic.
 */

import * as tf from "@tensorflow/tfjs";

import { BinaryDataset } from "./data";

export interface ScalarModel {
    net: tf.LayersModel;
    /** shape one example is reshaped to before `net.apply` (no batch dim) */
    inputShape: number[];
    dim: number;
}

export function buildConvNet(imageSize: number, seed: number): ScalarModel {
    const net = tf.sequential();
    net.add(
        tf.layers.conv2d({
            inputShape: [imageSize, imageSize, 1],
            filters: 8,
            kernelSize: 5,
            strides: 2,
            activation: "relu",
            kernelInitializer: tf.initializers.glorotUniform({ seed }),
        }),
    );
    net.add(
        tf.layers.conv2d({
            filters: 16,
            kernelSize: 3,
            strides: 2,
            activation: "relu",
            kernelInitializer: tf.initializers.glorotUniform({ seed: seed + 1 }),
        }),
    );
    net.add(tf.layers.flatten());
    net.add(
        tf.layers.dense({
            units: 32,
            activation: "relu",
            kernelInitializer: tf.initializers.glorotUniform({ seed: seed + 2 }),
        }),
    );
    net.add(
        tf.layers.dense({
            units: 1,
            kernelInitializer: tf.initializers.glorotUniform({ seed: seed + 3 }),
        }),
    );
    return { net, inputShape: [imageSize, imageSize, 1], dim: imageSize * imageSize };
}

/** Small dense net on flat features; used by the fast test suite. */
export function buildDenseNet(dim: number, seed: number): ScalarModel {
    const net = tf.sequential();
    net.add(
        tf.layers.dense({
            inputShape: [dim],
            units: 16,
            activation: "relu",
            kernelInitializer: tf.initializers.glorotUniform({ seed }),
        }),
    );
    net.add(
        tf.layers.dense({
            units: 1,
            kernelInitializer: tf.initializers.glorotUniform({ seed: seed + 1 }),
        }),
    );
    return { net, inputShape: [dim], dim };
}

export async function trainModel(
    sm: ScalarModel,
    data: BinaryDataset,
    opts: { epochs: number; batchSize?: number; learningRate?: number },
): Promise<number[]> {
    const { epochs, batchSize = 64, learningRate = 3e-3 } = opts;
    const X = tf.tensor2d(data.xs).reshape([data.xs.length, ...sm.inputShape]);
    const Y = tf.tensor2d(data.labels.map((l) => [l > 0 ? 1 : 0]));
    const loss = (yTrue: tf.Tensor, yPred: tf.Tensor) =>
        tf.losses.sigmoidCrossEntropy(yTrue, yPred);
    sm.net.compile({ optimizer: tf.train.adam(learningRate), loss });
    const history = await sm.net.fit(X, Y, {
        epochs,
        batchSize,
        shuffle: false, // data is pre-interleaved; fixed order keeps runs reproducible
        verbose: 0,
    });
    X.dispose();
    Y.dispose();
    return (history.history.loss as number[]).map(Number);
}

export function logits(sm: ScalarModel, xs: number[][]): number[] {
    return tf.tidy(() => {
        const X = tf.tensor2d(xs).reshape([xs.length, ...sm.inputShape]);
        const out = sm.net.apply(X) as tf.Tensor;
        return Array.from(out.dataSync());
    });
}

export function accuracy(sm: ScalarModel, data: BinaryDataset): number {
    const f = logits(sm, data.xs);
    let correct = 0;
    for (let i = 0; i < f.length; i++) {
        if ((f[i] > 0 ? 1 : -1) === data.labels[i]) correct++;
    }
    return correct / f.length;
}

/** Scalar score and its input gradient at one point, by backpropagation. */
export function logitAndGradient(
    sm: ScalarModel,
    x: number[],
): { f: number; grad: number[] } {
    return tf.tidy(() => {
        const fn = (t: tf.Tensor) =>
            (sm.net.apply(t.reshape([1, ...sm.inputShape])) as tf.Tensor).reshape([]);
        const { value, grad } = tf.valueAndGrad(fn)(tf.tensor1d(x));
        return { f: value.dataSync()[0], grad: Array.from(grad.dataSync()) };
    });
}

/**
 * Perturbation radius from the margin distribution: the q-quantile of
 * |f| / ||grad f|| over a sample, i.e. the distance within which a fraction
 * q of the points can be pushed across the linearized boundary.
 */
export function epsilonFromMargins(margins: number[], quantile: number): number {
    const sorted = [...margins].sort((a, b) => a - b);
    const idx = Math.min(
        sorted.length - 1,
        Math.max(0, Math.floor(quantile * sorted.length)),
    );
    return sorted[idx];
}
