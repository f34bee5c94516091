import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { gzipSync } from "node:zlib";
import { describe, expect, it } from "vitest";
import { loadMnistSplit, parseIdxImages, parseIdxLabels, splitDataset, syntheticDataset } from "../src/data.js";

function idxImages(n: number, rows: number, cols: number, pixels: number[]): Buffer {
  const buf = Buffer.alloc(16 + pixels.length);
  buf.writeUInt32BE(0x00000803, 0);
  buf.writeUInt32BE(n, 4);
  buf.writeUInt32BE(rows, 8);
  buf.writeUInt32BE(cols, 12);
  Buffer.from(pixels).copy(buf, 16);
  return buf;
}

function idxLabels(labels: number[]): Buffer {
  const buf = Buffer.alloc(8 + labels.length);
  buf.writeUInt32BE(0x00000801, 0);
  buf.writeUInt32BE(labels.length, 4);
  Buffer.from(labels).copy(buf, 8);
  return buf;
}

describe("idx parsing", () => {
  it("decodes crafted image bytes", () => {
    const parsed = parseIdxImages(idxImages(2, 2, 2, [0, 255, 128, 0, 255, 0, 0, 64]));
    expect(parsed.n).toBe(2);
    expect(parsed.dim).toBe(4);
    expect(parsed.data[1]).toBeCloseTo(1.0, 12);
    expect(parsed.data[2]).toBeCloseTo(128 / 255, 12);
  });

  it("decodes labels and rejects bad magic", () => {
    expect(Array.from(parseIdxLabels(idxLabels([3, 1, 4])))).toEqual([3, 1, 4]);
    expect(() => parseIdxImages(idxLabels([1]))).toThrow(/magic/);
  });

  it("loads gzipped files from a directory", () => {
    const dir = mkdtempSync(join(tmpdir(), "mnist-"));
    writeFileSync(join(dir, "train-images-idx3-ubyte.gz"), gzipSync(idxImages(2, 1, 2, [1, 2, 3, 4])));
    writeFileSync(join(dir, "train-labels-idx1-ubyte.gz"), gzipSync(idxLabels([7, 2])));
    const ds = loadMnistSplit(dir, "train");
    expect(ds.n).toBe(2);
    expect(ds.dim).toBe(2);
    expect(Array.from(ds.labels)).toEqual([7, 2]);
  });

  it("reports unavailable dataset with guidance", () => {
    const dir = mkdtempSync(join(tmpdir(), "empty-"));
    expect(() => loadMnistSplit(dir, "train")).toThrow(/dataset unavailable/);
  });
});

describe("synthetic dataset", () => {
  it("is deterministic per seed", () => {
    const a = syntheticDataset(5, 20, 16);
    const b = syntheticDataset(5, 20, 16);
    expect(Array.from(a.images)).toEqual(Array.from(b.images));
    expect(Array.from(a.labels)).toEqual(Array.from(b.labels));
    const c = syntheticDataset(6, 20, 16);
    expect(Array.from(c.images)).not.toEqual(Array.from(a.images));
  });

  it("keeps pixels in the unit box", () => {
    const ds = syntheticDataset(1, 50, 8);
    for (const v of ds.images) {
      expect(v).toBeGreaterThanOrEqual(0);
      expect(v).toBeLessThanOrEqual(1);
    }
  });

  it("splits without overlap", () => {
    const ds = syntheticDataset(2, 40, 4);
    const { train, test } = splitDataset(ds, 0.25, 0);
    expect(train.n + test.n).toBe(40);
    expect(test.n).toBe(10);
  });
});
