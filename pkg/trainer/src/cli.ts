/**
 * CLI: train an MNIST-shaped MLP and export it as a hiqlip-net-v1 file.
 *
 *   node dist/cli.js --dims 784,16,10 --epochs 10 --seed 0 --out net.json \
 *       [--data-dir ./data | --synthetic] [--lr 0.001] [--batch-size 128]
 */
import { parseArgs } from "node:util";
import { DEFAULT_SPEC, TrainSpec, trainAndExport } from "./train.js";

function parseDims(text: string): number[] {
  const dims = text.split(",").map((t) => Number.parseInt(t.trim(), 10));
  if (dims.some((d) => !Number.isInteger(d) || d < 1)) {
    throw new Error(`--dims expects comma-separated positive integers, got ${text}`);
  }
  return dims;
}

export function main(argv: string[]): number {
  const { values } = parseArgs({
    args: argv,
    options: {
      dims: { type: "string", default: "784,16,10" },
      epochs: { type: "string", default: String(DEFAULT_SPEC.epochs) },
      seed: { type: "string", default: String(DEFAULT_SPEC.seed) },
      lr: { type: "string", default: String(DEFAULT_SPEC.lr) },
      "batch-size": { type: "string", default: String(DEFAULT_SPEC.batchSize) },
      "target-accuracy": { type: "string", default: String(DEFAULT_SPEC.targetAccuracy) },
      "data-dir": { type: "string" },
      synthetic: { type: "boolean", default: false },
      "synthetic-samples": { type: "string", default: String(DEFAULT_SPEC.syntheticSamples) },
      out: { type: "string" },
    },
  });
  if (!values.out) {
    console.error("error: --out PATH is required");
    return 2;
  }
  const spec: TrainSpec = {
    dims: parseDims(values.dims as string),
    epochs: Number.parseInt(values.epochs as string, 10),
    seed: Number.parseInt(values.seed as string, 10),
    lr: Number.parseFloat(values.lr as string),
    batchSize: Number.parseInt(values["batch-size"] as string, 10),
    targetAccuracy: Number.parseFloat(values["target-accuracy"] as string),
    dataDir: values["data-dir"] as string | undefined,
    synthetic: Boolean(values.synthetic),
    syntheticSamples: Number.parseInt(values["synthetic-samples"] as string, 10),
  };
  try {
    const report = trainAndExport(spec, values.out as string);
    console.log(JSON.stringify({ out: values.out, ...report }));
    if (report.warning) console.error(`warning: ${report.warning}`);
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

const invokedDirectly = process.argv[1]?.endsWith("cli.js");
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
