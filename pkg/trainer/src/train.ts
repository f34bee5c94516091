/**
 * Training pipeline: minibatch Adam on softmax cross-entropy, fixed number
 * of epochs, accuracy reported against a held-out split.
 */
import { Prng } from "./prng.js";
import { Dataset, loadMnistSplit, splitDataset, syntheticDataset } from "./data.js";
import { Mlp, accuracy, adamStep, backward, createAdam, createMlp, forward } from "./mlp.js";
import { exportNetwork } from "./export.js";

export interface TrainSpec {
  dims: number[];
  epochs: number;
  seed: number;
  lr: number;
  batchSize: number;
  targetAccuracy: number;
  dataDir?: string;
  synthetic: boolean;
  syntheticSamples: number;
}

export const DEFAULT_SPEC: Omit<TrainSpec, "dims"> = {
  epochs: 10,
  seed: 0,
  lr: 1e-3,
  batchSize: 128,
  targetAccuracy: 0.93,
  synthetic: false,
  syntheticSamples: 6000,
};

export interface TrainReport {
  dims: number[];
  epochs: number;
  seed: number;
  source: string;
  trainSamples: number;
  testSamples: number;
  testAccuracy: number;
  targetAccuracy: number;
  lossTrace: number[];
  warning?: string;
}

export function validateSpec(spec: TrainSpec): void {
  if (spec.dims.length < 2) throw new Error("dims must list at least input and output sizes");
  if (spec.dims[0] !== 784 || spec.dims[spec.dims.length - 1] !== 10) {
    throw new Error("dims must start at 784 and end at 10 for MNIST-shaped training");
  }
  if (spec.epochs < 1) throw new Error("epochs must be >= 1");
  if (spec.batchSize < 1) throw new Error("batch size must be >= 1");
}

function loadData(spec: TrainSpec): { train: Dataset; test: Dataset } {
  if (spec.synthetic) {
    const all = syntheticDataset(spec.seed, spec.syntheticSamples, spec.dims[0]);
    return splitDataset(all, 0.2, spec.seed + 1);
  }
  const dir = spec.dataDir ?? "./data";
  return { train: loadMnistSplit(dir, "train"), test: loadMnistSplit(dir, "test") };
}

export function trainMlp(spec: TrainSpec): { mlp: Mlp; report: TrainReport } {
  validateSpec(spec);
  const { train, test } = loadData(spec);
  const rng = new Prng(spec.seed);
  const mlp = createMlp(spec.dims, rng);
  const opt = createAdam(mlp, spec.lr);
  const order = new Int32Array(train.n);
  for (let i = 0; i < train.n; i++) order[i] = i;
  const dim = train.dim;
  const lossTrace: number[] = [];
  for (let epoch = 0; epoch < spec.epochs; epoch++) {
    rng.shuffle(order);
    let epochLoss = 0;
    let batches = 0;
    for (let start = 0; start < train.n; start += spec.batchSize) {
      const size = Math.min(spec.batchSize, train.n - start);
      const xb = new Float64Array(size * dim);
      const yb = new Int32Array(size);
      for (let s = 0; s < size; s++) {
        const src = order[start + s];
        xb.set(train.images.subarray(src * dim, (src + 1) * dim), s * dim);
        yb[s] = train.labels[src];
      }
      const acts = forward(mlp, xb, size);
      const grads = backward(mlp, acts, yb, size);
      adamStep(mlp, grads, opt);
      epochLoss += grads.loss;
      batches += 1;
    }
    lossTrace.push(epochLoss / Math.max(1, batches));
  }
  const testAccuracy = accuracy(mlp, test.images, test.labels, test.n);
  const report: TrainReport = {
    dims: [...spec.dims],
    epochs: spec.epochs,
    seed: spec.seed,
    source: train.source,
    trainSamples: train.n,
    testSamples: test.n,
    testAccuracy,
    targetAccuracy: spec.targetAccuracy,
    lossTrace,
  };
  if (testAccuracy < spec.targetAccuracy) {
    report.warning = `test accuracy ${testAccuracy.toFixed(4)} below target ${spec.targetAccuracy}`;
  }
  return { mlp, report };
}

export function trainAndExport(spec: TrainSpec, outPath: string): TrainReport {
  const { mlp, report } = trainMlp(spec);
  exportNetwork(mlp, outPath, {
    trained_on: report.source,
    seed: String(spec.seed),
    epochs: String(spec.epochs),
    optimizer: "adam",
    test_accuracy: report.testAccuracy.toFixed(6),
  });
  return report;
}
