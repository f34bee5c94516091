"""HTTP client for an external Ising solving service (annealer or similar).

Wire protocol: POST {endpoint}/v1/solve with

    {"num_vars": N, "linear": [[i, h_i], ...], "quadratic": [[i, j, J_ij], ...],
     "num_reads": R, "timeout_ms": T}

and expect {"assignments": [[+-1, ...], ...], "energies": [...]}. The client
picks the reported minimum, recomputes its energy locally, and rejects the
response if the reported energy disagrees by more than 1e-6 relative.
"""

from __future__ import annotations

import numpy as np
import requests

from .errors import SolverError

ENERGY_RTOL = 1e-6


def build_payload(J: np.ndarray, h: np.ndarray, num_reads: int, timeout_ms: int) -> dict:
    F = h.shape[0]
    linear = [[int(i), float(h[i])] for i in range(F) if h[i] != 0.0]
    quadratic = [
        [int(i), int(j), float(J[i, j])]
        for i in range(F)
        for j in range(i + 1, F)
        if J[i, j] != 0.0
    ]
    return {
        "num_vars": F,
        "linear": linear,
        "quadratic": quadratic,
        "num_reads": int(num_reads),
        "timeout_ms": int(timeout_ms),
    }


def solve_remote(J: np.ndarray, h: np.ndarray, cfg) -> np.ndarray:
    """Solve the reduced (free-variable) problem via the remote endpoint."""
    if not cfg.remote_endpoint:
        raise SolverError("remote backend selected but no endpoint configured")
    url = cfg.remote_endpoint.rstrip("/") + "/v1/solve"
    payload = build_payload(J, h, cfg.num_reads, cfg.timeout_ms)
    try:
        resp = requests.post(url, json=payload, timeout=max(cfg.timeout_ms, 1000) / 1000.0)
    except requests.RequestException as exc:
        raise SolverError(f"remote solver unreachable at {url}: {exc}") from exc
    if resp.status_code != 200:
        raise SolverError(f"remote solver returned HTTP {resp.status_code}: {resp.text[:200]}")
    try:
        data = resp.json()
    except ValueError as exc:
        raise SolverError(f"remote solver returned non-JSON body: {exc}") from exc

    assignments = data.get("assignments")
    energies = data.get("energies")
    if not assignments or not energies or len(assignments) != len(energies):
        raise SolverError("remote solver response missing assignments/energies")
    k = int(np.argmin(energies))
    s = np.asarray(assignments[k], dtype=np.float64)
    if s.shape != h.shape or not np.all(np.abs(s) == 1):
        raise SolverError("remote solver returned a malformed assignment")
    local = float(-0.5 * s @ (J @ s) - h @ s)
    reported = float(energies[k])
    if abs(local - reported) > ENERGY_RTOL * max(1.0, abs(local)):
        raise SolverError(
            f"remote solver energy mismatch: reported {reported!r}, local recomputation {local!r}"
        )
    return s
