"""Reference estimators: norm-product upper bound, gradient sampling lower
bound, and exact brute force over activation patterns."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .errors import CapError
from .estimate import Estimate, config_digest
from .netio import Network

BF_DEFAULT_CAP = 22


def _class_row(net: Network, class_index: int) -> np.ndarray:
    if not 0 <= class_index < net.output_dim:
        raise ValueError(f"class index {class_index} out of range for {net.output_dim} outputs")
    return np.array(net.layers[-1][class_index], dtype=np.float64)


def mp_bound(net: Network, class_index: int) -> Estimate:
    """||u||_1 times the product of per-layer max absolute row sums.

    The row-sum norm is the inf->inf operator norm, so the product dominates
    the gradient-norm maximum by sub-multiplicativity with ReLU derivative
    magnitudes at most 1. Loose but instant.
    """
    t0 = time.perf_counter()
    u = _class_row(net, class_index)
    prod = 1.0
    for w in net.layers[:-1]:
        prod *= float(np.abs(w).sum(axis=1).max())
    value = float(np.abs(u).sum() * prod)
    return Estimate(
        method="mp",
        value=value,
        bound_kind="upper",
        wall_time_s=time.perf_counter() - t0,
        solver_stats={"layers": net.depth},
        config_digest=config_digest({"op": "mp_bound"}),
    )


@dataclass(frozen=True)
class SamplingConfig:
    """Budget and input box for gradient sampling."""

    num_samples: int = 200_000
    domain_low: float = 0.0
    domain_high: float = 1.0
    seed: int = 0
    batch: int = 8192

    def __post_init__(self):
        if not self.domain_low < self.domain_high:
            raise ValueError("sampling box needs domain_low < domain_high")
        if self.num_samples < 1:
            raise ValueError("num_samples must be >= 1")


def sampling_lower_bound(net: Network, class_index: int, cfg: SamplingConfig = None) -> Estimate:
    """Max l1 gradient norm over uniformly sampled inputs (a lower bound).

    Pre-activations use the stored biases when present; an exactly-zero
    pre-activation contributes derivative 0. Samples are drawn from one
    PCG64 stream in index order, so the running maximum is non-decreasing in
    num_samples for a fixed seed.
    """
    cfg = cfg or SamplingConfig()
    t0 = time.perf_counter()
    u = _class_row(net, class_index)
    if net.depth == 1:
        value = float(np.abs(u).sum())  # constant gradient
        return Estimate(
            method="sample", value=value, bound_kind="lower",
            wall_time_s=time.perf_counter() - t0,
            solver_stats={"samples": cfg.num_samples},
            config_digest=config_digest({"op": "sampling", "seed": cfg.seed,
                                         "n": cfg.num_samples,
                                         "box": (cfg.domain_low, cfg.domain_high)}),
        )
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    n = net.input_dim
    best = 0.0
    remaining = cfg.num_samples
    while remaining > 0:
        b = min(cfg.batch, remaining)
        remaining -= b
        x = rng.uniform(cfg.domain_low, cfg.domain_high, size=(b, n))
        masks = []
        a = x
        for w, bias in zip(net.layers[:-1], net.biases[:-1]):
            z = a @ w.T
            if bias is not None:
                z = z + bias
            m = z > 0.0
            masks.append(m)
            a = np.where(m, z, 0.0)
        g = np.broadcast_to(u, (b, u.shape[0]))
        for k in range(net.depth - 2, -1, -1):
            g = (g * masks[k]) @ net.layers[k]
        best = max(best, float(np.abs(g).sum(axis=1).max()))
    return Estimate(
        method="sample",
        value=best,
        bound_kind="lower",
        wall_time_s=time.perf_counter() - t0,
        solver_stats={"samples": cfg.num_samples,
                      "box": [cfg.domain_low, cfg.domain_high]},
        config_digest=config_digest({"op": "sampling", "seed": cfg.seed,
                                     "n": cfg.num_samples,
                                     "box": (cfg.domain_low, cfg.domain_high)}),
    )


def _pattern_codes(start: int, stop: int, width: int) -> np.ndarray:
    codes = np.arange(start, stop, dtype=np.int64)
    return ((codes[:, None] >> np.arange(width)) & 1).astype(np.float64)


def _max_over_last_layer(B: np.ndarray) -> float:
    """max over v in {0,1}^h of ||v^T B||_1, enumerated in chunks."""
    h, n = B.shape
    total = 1 << h
    chunk = max(256, min(1 << 14, (1 << 22) // max(n, 1)))
    best = 0.0
    for start in range(0, total, chunk):
        V = _pattern_codes(start, min(start + chunk, total), h)
        best = max(best, float(np.abs(V @ B).sum(axis=1).max()))
    return best


def brute_force_fgl(net: Network, class_index: int, cap: int = BF_DEFAULT_CAP) -> Estimate:
    """Exact activation-pattern maximum by enumerating all 2^H joint patterns.

    H is the total hidden-unit count; the call refuses (CapError, carrying
    the required cap) when H exceeds ``cap``. The innermost hidden layer is
    enumerated vectorized; outer layers loop over their joint codes.
    """
    t0 = time.perf_counter()
    u = _class_row(net, class_index)
    hs = net.hidden_sizes
    H = int(sum(hs))
    if H > cap:
        raise CapError(
            f"brute force needs cap >= {H} (total hidden units), cap is {cap}", required=H
        )
    if net.depth == 1:
        value = float(np.abs(u).sum())
    else:
        outer = hs[:-1]
        outer_bits = int(sum(outer))
        best = 0.0
        for code in range(1 << outer_bits):
            P = net.layers[0]
            off = 0
            for li, width in enumerate(outer):
                mask = np.array([(code >> (off + t)) & 1 for t in range(width)], dtype=np.float64)
                off += width
                P = net.layers[li + 1] @ (mask[:, None] * P)
            best = max(best, _max_over_last_layer(u[:, None] * P))
        value = best
    return Estimate(
        method="bf",
        value=value,
        bound_kind="exact",
        wall_time_s=time.perf_counter() - t0,
        solver_stats={"patterns": 1 << H, "hidden_units": H},
        config_digest=config_digest({"op": "brute_force_fgl", "cap": cap}),
    )
