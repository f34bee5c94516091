/**
 * Minimal dense ReLU MLP with softmax cross-entropy loss and the Adam
 * optimizer. Weights live in row-major Float64Array matrices shaped
 * [out, in], matching the hiqlip-net-v1 storage convention, so export is a
 * straight copy.
 */
import { Prng } from "./prng.js";

export interface Layer {
  out: number;
  in: number;
  w: Float64Array; // row-major [out, in]
  b: Float64Array; // [out]
}

export interface Mlp {
  dims: number[];
  layers: Layer[];
}

export interface AdamState {
  lr: number;
  beta1: number;
  beta2: number;
  eps: number;
  step: number;
  mW: Float64Array[];
  vW: Float64Array[];
  mB: Float64Array[];
  vB: Float64Array[];
}

export function createMlp(dims: number[], rng: Prng): Mlp {
  if (dims.length < 2) throw new Error("dims must list at least input and output sizes");
  const layers: Layer[] = [];
  for (let k = 0; k + 1 < dims.length; k++) {
    const fanIn = dims[k];
    const fanOut = dims[k + 1];
    const bound = Math.sqrt(6.0 / fanIn); // uniform He-style init
    const w = new Float64Array(fanOut * fanIn);
    for (let i = 0; i < w.length; i++) w[i] = rng.uniform(-bound, bound);
    layers.push({ out: fanOut, in: fanIn, w, b: new Float64Array(fanOut) });
  }
  return { dims: [...dims], layers };
}

/** Forward pass for one batch; returns activations per layer (post-ReLU). */
export function forward(mlp: Mlp, x: Float64Array, batch: number): Float64Array[] {
  const acts: Float64Array[] = [x];
  let a = x;
  let aDim = mlp.dims[0];
  for (let k = 0; k < mlp.layers.length; k++) {
    const { out, in: inDim, w, b } = mlp.layers[k];
    const z = new Float64Array(batch * out);
    for (let s = 0; s < batch; s++) {
      const aOff = s * aDim;
      const zOff = s * out;
      for (let i = 0; i < out; i++) {
        let acc = b[i];
        const wOff = i * inDim;
        for (let j = 0; j < inDim; j++) acc += w[wOff + j] * a[aOff + j];
        // hidden layers get ReLU, the output layer stays linear (logits)
        z[zOff + i] = k < mlp.layers.length - 1 ? Math.max(0, acc) : acc;
      }
    }
    acts.push(z);
    a = z;
    aDim = out;
  }
  return acts;
}

export interface Gradients {
  dW: Float64Array[];
  dB: Float64Array[];
  loss: number;
}

/** Softmax cross-entropy loss and gradients for one batch. */
export function backward(mlp: Mlp, acts: Float64Array[], labels: Int32Array, batch: number): Gradients {
  const L = mlp.layers.length;
  const outDim = mlp.dims[mlp.dims.length - 1];
  const logits = acts[L];
  // softmax + CE gradient wrt logits
  let loss = 0;
  const delta = new Float64Array(batch * outDim);
  for (let s = 0; s < batch; s++) {
    const off = s * outDim;
    let maxv = -Infinity;
    for (let i = 0; i < outDim; i++) maxv = Math.max(maxv, logits[off + i]);
    let sum = 0;
    for (let i = 0; i < outDim; i++) sum += Math.exp(logits[off + i] - maxv);
    const logZ = Math.log(sum) + maxv;
    loss += logZ - logits[off + labels[s]];
    for (let i = 0; i < outDim; i++) {
      const p = Math.exp(logits[off + i] - logZ);
      delta[off + i] = (p - (i === labels[s] ? 1 : 0)) / batch;
    }
  }
  loss /= batch;

  const dW: Float64Array[] = [];
  const dB: Float64Array[] = [];
  let grad = delta;
  for (let k = L - 1; k >= 0; k--) {
    const { out, in: inDim, w } = mlp.layers[k];
    const below = acts[k];
    const gW = new Float64Array(out * inDim);
    const gB = new Float64Array(out);
    for (let s = 0; s < batch; s++) {
      const gOff = s * out;
      const aOff = s * inDim;
      for (let i = 0; i < out; i++) {
        const g = grad[gOff + i];
        if (g === 0) continue;
        gB[i] += g;
        const wOff = i * inDim;
        for (let j = 0; j < inDim; j++) gW[wOff + j] += g * below[aOff + j];
      }
    }
    dW.unshift(gW);
    dB.unshift(gB);
    if (k > 0) {
      // propagate through W then the ReLU of the layer below
      const next = new Float64Array(batch * inDim);
      for (let s = 0; s < batch; s++) {
        const gOff = s * out;
        const nOff = s * inDim;
        for (let i = 0; i < out; i++) {
          const g = grad[gOff + i];
          if (g === 0) continue;
          const wOff = i * inDim;
          for (let j = 0; j < inDim; j++) next[nOff + j] += g * w[wOff + j];
        }
        for (let j = 0; j < inDim; j++) {
          if (below[nOff + j] <= 0) next[nOff + j] = 0;
        }
      }
      grad = next;
    }
  }
  return { dW, dB, loss };
}

export function createAdam(mlp: Mlp, lr = 1e-3): AdamState {
  return {
    lr,
    beta1: 0.9,
    beta2: 0.999,
    eps: 1e-8,
    step: 0,
    mW: mlp.layers.map((l) => new Float64Array(l.w.length)),
    vW: mlp.layers.map((l) => new Float64Array(l.w.length)),
    mB: mlp.layers.map((l) => new Float64Array(l.b.length)),
    vB: mlp.layers.map((l) => new Float64Array(l.b.length)),
  };
}

export function adamStep(mlp: Mlp, grads: Gradients, opt: AdamState): void {
  opt.step += 1;
  const c1 = 1 - Math.pow(opt.beta1, opt.step);
  const c2 = 1 - Math.pow(opt.beta2, opt.step);
  for (let k = 0; k < mlp.layers.length; k++) {
    const apply = (param: Float64Array, grad: Float64Array, m: Float64Array, v: Float64Array) => {
      for (let i = 0; i < param.length; i++) {
        m[i] = opt.beta1 * m[i] + (1 - opt.beta1) * grad[i];
        v[i] = opt.beta2 * v[i] + (1 - opt.beta2) * grad[i] * grad[i];
        param[i] -= (opt.lr * (m[i] / c1)) / (Math.sqrt(v[i] / c2) + opt.eps);
      }
    };
    apply(mlp.layers[k].w, grads.dW[k], opt.mW[k], opt.vW[k]);
    apply(mlp.layers[k].b, grads.dB[k], opt.mB[k], opt.vB[k]);
  }
}

/** Fraction of samples whose argmax logit matches the label. */
export function accuracy(mlp: Mlp, x: Float64Array, labels: Int32Array, n: number): number {
  const outDim = mlp.dims[mlp.dims.length - 1];
  const acts = forward(mlp, x, n);
  const logits = acts[acts.length - 1];
  let hits = 0;
  for (let s = 0; s < n; s++) {
    const off = s * outDim;
    let best = 0;
    for (let i = 1; i < outDim; i++) {
      if (logits[off + i] > logits[off + best]) best = i;
    }
    if (best === labels[s]) hits += 1;
  }
  return hits / n;
}
