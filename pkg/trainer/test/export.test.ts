import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";
import { Prng } from "../src/prng.js";
import { createMlp } from "../src/mlp.js";
import { FORMAT_NAME, exportNetwork, toNetFile, validateNetFile } from "../src/export.js";

describe("hiqlip-net-v1 export", () => {
  it("writes format, activation, shapes, and biases", () => {
    const mlp = createMlp([4, 3, 2], new Prng(0));
    const dir = mkdtempSync(join(tmpdir(), "export-"));
    const path = join(dir, "net.json");
    exportNetwork(mlp, path, { note: "test" });
    const file = JSON.parse(readFileSync(path, "utf-8"));
    expect(file.format).toBe(FORMAT_NAME);
    expect(file.activation).toBe("relu");
    expect(file.layers).toHaveLength(2);
    expect(file.layers[0].out).toBe(3);
    expect(file.layers[0].in).toBe(4);
    expect(file.layers[0].weights).toHaveLength(3);
    expect(file.layers[0].weights[0]).toHaveLength(4);
    expect(file.layers[0].bias).toHaveLength(3);
    expect(file.metadata.note).toBe("test");
  });

  it("round-trips weight values exactly", () => {
    const mlp = createMlp([3, 2], new Prng(9));
    const dir = mkdtempSync(join(tmpdir(), "export-"));
    const path = join(dir, "net.json");
    exportNetwork(mlp, path);
    const file = JSON.parse(readFileSync(path, "utf-8"));
    for (let i = 0; i < 2; i++) {
      for (let j = 0; j < 3; j++) {
        expect(file.layers[0].weights[i][j]).toBe(mlp.layers[0].w[i * 3 + j]);
      }
    }
  });

  it("validator rejects broken chains and non-finite weights", () => {
    const good = toNetFile(createMlp([3, 2, 2], new Prng(1)));
    validateNetFile(good);
    const badChain = toNetFile(createMlp([3, 2, 2], new Prng(1)));
    badChain.layers[1].in = 5;
    badChain.layers[1].weights = [[1, 2, 3, 4, 5], [1, 2, 3, 4, 5]];
    expect(() => validateNetFile(badChain)).toThrow(/layer 2/);
    const badValue = toNetFile(createMlp([3, 2], new Prng(1)));
    badValue.layers[0].weights[0][0] = Number.NaN;
    expect(() => validateNetFile(badValue)).toThrow(/non-finite/);
  });
});
