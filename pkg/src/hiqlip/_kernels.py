"""Numba inner loops for the exhaustive and annealed spin-search backends."""

import numpy as np
from numba import njit


@njit(cache=True)
def exhaustive_best(J, h):
    """Scan all 2^n spin states in Gray-code order, return the argmin code.

    The visited state after k flips is the binary-reflected Gray code of k
    (bit set = spin +1, starting from all -1). Energy is updated
    incrementally via local fields; the caller recomputes the returned
    state's energy exactly.
    """
    n = h.shape[0]
    s = -np.ones(n)
    loc = np.dot(J, s) + h
    e = -0.5 * np.dot(s, np.dot(J, s)) - np.dot(h, s)
    best_e = e
    best_code = np.int64(0)
    total = np.int64(1) << n
    k = np.int64(1)
    while k < total:
        kk = k
        i = 0
        while kk & 1 == 0:
            kk >>= 1
            i += 1
        d = 2.0 * s[i] * loc[i]
        e += d
        old = s[i]
        s[i] = -old
        diff = s[i] - old
        for j in range(n):
            loc[j] += J[j, i] * diff
        if e < best_e:
            best_e = e
            best_code = k
        k += 1
    return best_code


def decode_gray(code: int, n: int) -> np.ndarray:
    """Spin vector for a Gray scan stop index (see exhaustive_best)."""
    g = int(code) ^ (int(code) >> 1)
    bits = (g >> np.arange(n)) & 1
    return (2 * bits - 1).astype(np.float64)


@njit(cache=True)
def anneal_chain(J, h, betas, s, u):
    """One Metropolis chain: sequential single-spin flips, one pass per beta.

    Moves with non-positive energy change are always accepted (ties included,
    to let plateaus be traversed); uphill moves with probability
    exp(-beta * dE). ``u`` holds pre-drawn uniforms, one per (sweep, spin),
    consumed positionally so runs are reproducible. Returns the best state
    seen and its accumulated energy.
    """
    n = s.shape[0]
    loc = np.dot(J, s) + h
    e = -0.5 * np.dot(s, np.dot(J, s)) - np.dot(h, s)
    best_e = e
    best_s = s.copy()
    for t in range(betas.shape[0]):
        b = betas[t]
        for i in range(n):
            d = 2.0 * s[i] * loc[i]
            if d <= 0.0 or u[t, i] < np.exp(-b * d):
                old = s[i]
                s[i] = -old
                e += d
                diff = s[i] - old
                for j in range(n):
                    loc[j] += J[j, i] * diff
                if e < best_e:
                    best_e = e
                    for j in range(n):
                        best_s[j] = s[j]
    return best_s, best_e
