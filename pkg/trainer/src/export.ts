/**
 * hiqlip-net-v1 serialization: the cross-language contract consumed by the
 * estimator package. Biases are exported even though the estimators ignore
 * them, keeping files faithful to the trained model.
 */
import { writeFileSync } from "node:fs";
import type { Mlp } from "./mlp.js";

export const FORMAT_NAME = "hiqlip-net-v1";

export interface NetFileLayer {
  out: number;
  in: number;
  weights: number[][];
  bias?: number[];
}

export interface NetFile {
  format: string;
  activation: "relu";
  layers: NetFileLayer[];
  metadata: Record<string, string>;
}

export function toNetFile(mlp: Mlp, metadata: Record<string, string> = {}): NetFile {
  const layers: NetFileLayer[] = mlp.layers.map((layer) => {
    const weights: number[][] = [];
    for (let i = 0; i < layer.out; i++) {
      weights.push(Array.from(layer.w.subarray(i * layer.in, (i + 1) * layer.in)));
    }
    return { out: layer.out, in: layer.in, weights, bias: Array.from(layer.b) };
  });
  return { format: FORMAT_NAME, activation: "relu", layers, metadata };
}

/** Structural checks mirroring the estimator-side loader. */
export function validateNetFile(file: NetFile): void {
  if (file.format !== FORMAT_NAME) throw new Error(`format must be ${FORMAT_NAME}`);
  if (file.activation !== "relu") throw new Error("activation must be relu");
  if (!file.layers.length) throw new Error("at least one layer required");
  file.layers.forEach((layer, k) => {
    if (layer.weights.length !== layer.out) {
      throw new Error(`layer ${k + 1}: ${layer.weights.length} rows, declared out=${layer.out}`);
    }
    for (const row of layer.weights) {
      if (row.length !== layer.in) throw new Error(`layer ${k + 1}: ragged row`);
      for (const v of row) {
        if (!Number.isFinite(v)) throw new Error(`layer ${k + 1}: non-finite weight`);
      }
    }
    if (layer.bias && layer.bias.length !== layer.out) {
      throw new Error(`layer ${k + 1}: bias length mismatch`);
    }
    if (k > 0 && file.layers[k - 1].out !== layer.in) {
      throw new Error(`layer ${k + 1}: input dim ${layer.in} != layer ${k} output ${file.layers[k - 1].out}`);
    }
  });
}

export function exportNetwork(mlp: Mlp, path: string, metadata: Record<string, string> = {}): void {
  const file = toNetFile(mlp, metadata);
  validateNetFile(file);
  writeFileSync(path, JSON.stringify(file));
}
