/**
 * Dataset loading: MNIST IDX files from disk, or a deterministic synthetic
 * stand-in for offline runs and tests.
 */
import { existsSync, readFileSync } from "node:fs";
import { join } from "node:path";
import { gunzipSync } from "node:zlib";
import { Prng } from "./prng.js";

export interface Dataset {
  images: Float64Array; // [n, dim] row-major, values in [0, 1]
  labels: Int32Array;
  n: number;
  dim: number;
  source: string;
}

const IDX_IMAGES_MAGIC = 0x00000803;
const IDX_LABELS_MAGIC = 0x00000801;

function readMaybeGz(path: string): Buffer {
  const raw = readFileSync(path);
  if (raw.length >= 2 && raw[0] === 0x1f && raw[1] === 0x8b) return gunzipSync(raw);
  return raw;
}

export function parseIdxImages(buf: Buffer): { data: Float64Array; n: number; dim: number } {
  if (buf.readUInt32BE(0) !== IDX_IMAGES_MAGIC) {
    throw new Error("not an IDX image file (bad magic)");
  }
  const n = buf.readUInt32BE(4);
  const rows = buf.readUInt32BE(8);
  const cols = buf.readUInt32BE(12);
  const dim = rows * cols;
  if (buf.length < 16 + n * dim) throw new Error("IDX image file truncated");
  const data = new Float64Array(n * dim);
  for (let i = 0; i < n * dim; i++) data[i] = buf[16 + i] / 255.0;
  return { data, n, dim };
}

export function parseIdxLabels(buf: Buffer): Int32Array {
  if (buf.readUInt32BE(0) !== IDX_LABELS_MAGIC) {
    throw new Error("not an IDX label file (bad magic)");
  }
  const n = buf.readUInt32BE(4);
  if (buf.length < 8 + n) throw new Error("IDX label file truncated");
  const labels = new Int32Array(n);
  for (let i = 0; i < n; i++) labels[i] = buf[8 + i];
  return labels;
}

function findFile(dir: string, stems: string[]): string | null {
  for (const stem of stems) {
    for (const name of [stem, `${stem}.gz`]) {
      const path = join(dir, name);
      if (existsSync(path)) return path;
    }
  }
  return null;
}

export function loadMnistSplit(dataDir: string, split: "train" | "test"): Dataset {
  const stems =
    split === "train"
      ? { images: ["train-images-idx3-ubyte", "train-images.idx3-ubyte"], labels: ["train-labels-idx1-ubyte", "train-labels.idx1-ubyte"] }
      : { images: ["t10k-images-idx3-ubyte", "t10k-images.idx3-ubyte"], labels: ["t10k-labels-idx1-ubyte", "t10k-labels.idx1-ubyte"] };
  const imgPath = findFile(dataDir, stems.images);
  const lblPath = findFile(dataDir, stems.labels);
  if (!imgPath || !lblPath) {
    throw new Error(
      `dataset unavailable: MNIST ${split} IDX files not found under ${dataDir} ` +
        `(expected e.g. ${stems.images[0]}[.gz]); pass --synthetic to train on generated data`,
    );
  }
  const { data, n, dim } = parseIdxImages(readMaybeGz(imgPath));
  const labels = parseIdxLabels(readMaybeGz(lblPath));
  if (labels.length !== n) throw new Error("MNIST image/label counts disagree");
  return { images: data, labels, n, dim, source: `mnist:${imgPath}` };
}

/**
 * Deterministic 10-class surrogate in MNIST shape: each class is a blob
 * around a random template in [0,1]^dim. Learnable to high accuracy in a
 * couple of epochs, which keeps format-level tests fast and offline.
 */
export function syntheticDataset(seed: number, n: number, dim = 784, classes = 10): Dataset {
  const rng = new Prng(seed);
  const templates = new Float64Array(classes * dim);
  for (let i = 0; i < templates.length; i++) templates[i] = rng.next();
  const images = new Float64Array(n * dim);
  const labels = new Int32Array(n);
  for (let s = 0; s < n; s++) {
    const cls = rng.int(classes);
    labels[s] = cls;
    const tOff = cls * dim;
    const iOff = s * dim;
    for (let j = 0; j < dim; j++) {
      const v = templates[tOff + j] + 0.35 * rng.normal();
      images[iOff + j] = Math.min(1, Math.max(0, v));
    }
  }
  return { images, labels, n, dim, source: `synthetic:seed=${seed}` };
}

/** Deterministic train/test split of one dataset. */
export function splitDataset(ds: Dataset, testFraction: number, seed: number): { train: Dataset; test: Dataset } {
  const idx = new Int32Array(ds.n);
  for (let i = 0; i < ds.n; i++) idx[i] = i;
  new Prng(seed).shuffle(idx);
  const nTest = Math.max(1, Math.floor(ds.n * testFraction));
  const take = (ids: Int32Array, source: string): Dataset => {
    const images = new Float64Array(ids.length * ds.dim);
    const labels = new Int32Array(ids.length);
    for (let k = 0; k < ids.length; k++) {
      images.set(ds.images.subarray(ids[k] * ds.dim, (ids[k] + 1) * ds.dim), k * ds.dim);
      labels[k] = ds.labels[ids[k]];
    }
    return { images, labels, n: ids.length, dim: ds.dim, source };
  };
  return {
    train: take(idx.subarray(nTest), `${ds.source}(train)`),
    test: take(idx.subarray(0, nTest), `${ds.source}(test)`),
  };
}
