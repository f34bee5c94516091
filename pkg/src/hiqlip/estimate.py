"""Result record shared by every estimator and the CLI."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

BOUND_KINDS = ("upper", "lower", "heuristic", "exact")


def config_digest(parts: dict) -> str:
    """Stable 16-hex-char digest of a configuration mapping.

    Canonical JSON (sorted keys) so re-serialization cannot change the digest.
    """
    blob = json.dumps(parts, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


@dataclass
class Estimate:
    """One estimator run: what method produced which value, and how.

    ``bound_kind`` states the direction of the value relative to the exact
    activation-pattern maximum: "upper"/"lower" for certified-by-intent
    bounds, "exact" for enumeration, "heuristic" for best-effort estimates
    backed by a feasible witness.
    """

    method: str
    value: float
    bound_kind: str
    wall_time_s: float
    solver_stats: dict = field(default_factory=dict)
    config_digest: str = ""
    trace: list = field(default_factory=list)

    def __post_init__(self):
        if self.bound_kind not in BOUND_KINDS:
            raise ValueError(f"bound_kind must be one of {BOUND_KINDS}, got {self.bound_kind!r}")
        if not self.value >= 0.0:
            raise ValueError(f"estimate value must be non-negative, got {self.value!r}")
        if self.wall_time_s < 0.0:
            raise ValueError("wall_time_s must be non-negative")

    def to_record(self, **extra) -> dict:
        """JSON-safe dict matching docs/estimate-schema.json."""
        rec = {
            "method": self.method,
            "value": float(self.value),
            "bound_kind": self.bound_kind,
            "wall_time_s": float(self.wall_time_s),
            "solver_stats": self.solver_stats,
            "config_digest": self.config_digest,
        }
        if self.trace:
            rec["trace"] = self.trace
        rec.update(extra)
        return rec
