"""Feedforward ReLU network loading, validation, and synthesis.

Weight file format "hiqlip-net-v1" (JSON)::

    {"format": "hiqlip-net-v1",
     "activation": "relu",
     "layers": [{"out": m, "in": n, "weights": [[...m rows of n...]], "bias": [...]}, ...],
     "metadata": {...}}

Weights are IEEE-754 doubles serialized as JSON numbers; ``bias`` is optional
per layer. Weights are stored out x in (row = output neuron) everywhere in
this package, so the class-reduction below is the only place a transpose
happens.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import FormatError

FORMAT_NAME = "hiqlip-net-v1"


@dataclass(eq=False)
class Network:
    """Dense feedforward ReLU network.

    ``layers[k]`` maps activations of layer k to pre-activations of layer
    k+1 and has shape (out, in). Biases are parsed and preserved for
    serialization fidelity but ignored by the norm estimators (the
    activation-pattern maximum does not depend on them). Immutable by
    convention after construction; safe to share across estimator runs.
    """

    layers: list
    biases: list = None
    activation: str = "relu"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.layers:
            raise FormatError("shape error: network needs at least one weight matrix")
        if self.activation != "relu":
            raise FormatError(f"value error: unsupported activation {self.activation!r}")
        self.layers = [np.asarray(w, dtype=np.float64) for w in self.layers]
        if self.biases is None:
            self.biases = [None] * len(self.layers)
        if len(self.biases) != len(self.layers):
            raise FormatError("shape error: bias list length differs from layer count")
        self.biases = [None if b is None else np.asarray(b, dtype=np.float64) for b in self.biases]
        for k, w in enumerate(self.layers, start=1):
            if w.ndim != 2 or w.size == 0:
                raise FormatError(f"shape error: layer {k} is not a non-empty matrix")
            if not np.isfinite(w).all():
                raise FormatError(f"value error: non-finite entry in layer {k}")
            b = self.biases[k - 1]
            if b is not None:
                if b.shape != (w.shape[0],):
                    raise FormatError(f"shape error: layer {k} bias length {b.shape} != out dim {w.shape[0]}")
                if not np.isfinite(b).all():
                    raise FormatError(f"value error: non-finite bias entry in layer {k}")
        for k in range(1, len(self.layers)):
            if self.layers[k].shape[1] != self.layers[k - 1].shape[0]:
                raise FormatError(
                    f"shape error: layer {k + 1} expects input dim {self.layers[k].shape[1]} "
                    f"but layer {k} outputs {self.layers[k - 1].shape[0]}"
                )

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def input_dim(self) -> int:
        return self.layers[0].shape[1]

    @property
    def output_dim(self) -> int:
        return self.layers[-1].shape[0]

    @property
    def dims(self) -> list:
        return [self.input_dim] + [w.shape[0] for w in self.layers]

    @property
    def hidden_sizes(self) -> list:
        return [w.shape[0] for w in self.layers[:-1]]


@dataclass(eq=False)
class ClassReduction:
    """Two-layer network reduced to one output class.

    W is the hidden layer (m x n, out x in), u the class row of the output
    layer (length m), and A the n x m coupling matrix with
    A[i, j] = W[j, i] * u[j].
    """

    W: np.ndarray
    u: np.ndarray
    A: np.ndarray


def class_reduction(net: Network, class_index: int) -> ClassReduction:
    """Reduce a depth-2 network to the (W, u, A) triple for one class."""
    if net.depth != 2:
        raise ValueError(f"class reduction requires a depth-2 network, got depth {net.depth}")
    if not 0 <= class_index < net.output_dim:
        raise ValueError(f"class index {class_index} out of range for {net.output_dim} outputs")
    W = net.layers[0]
    u = np.array(net.layers[1][class_index], dtype=np.float64)
    A = np.ascontiguousarray(W.T * u[np.newaxis, :])
    return ClassReduction(W=W, u=u, A=A)


def generate_synthetic(seed: int, dims, scale: float = 1.0) -> Network:
    """Deterministic random network: entries i.i.d. uniform in [-scale, scale].

    Uses numpy's PCG64 generator seeded with ``seed``; layers are drawn in
    input-to-output order, each row-major, so results reproduce bit-for-bit
    across platforms for a given (seed, dims, scale).
    """
    dims = [int(d) for d in dims]
    if len(dims) < 2:
        raise ValueError("dims must list at least an input and an output size")
    if any(d < 1 for d in dims):
        raise ValueError("dims must be positive")
    if not scale > 0:
        raise ValueError("scale must be positive")
    rng = np.random.Generator(np.random.PCG64(seed))
    layers = [rng.uniform(-scale, scale, size=(dims[k + 1], dims[k])) for k in range(len(dims) - 1)]
    meta = {
        "generator": "pcg64-uniform",
        "seed": str(seed),
        "dims": "x".join(str(d) for d in dims),
        "scale": repr(float(scale)),
    }
    return Network(layers=layers, metadata=meta)


def _layer_payload(w: np.ndarray, b) -> dict:
    entry = {"out": int(w.shape[0]), "in": int(w.shape[1]), "weights": w.tolist()}
    if b is not None:
        entry["bias"] = b.tolist()
    return entry


def save_network(net: Network, path) -> None:
    """Write a hiqlip-net-v1 file. Serialization is canonical (sorted keys),
    so identical networks produce byte-identical files."""
    payload = {
        "format": FORMAT_NAME,
        "activation": net.activation,
        "layers": [_layer_payload(w, b) for w, b in zip(net.layers, net.biases)],
        "metadata": dict(net.metadata),
    }
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    Path(path).write_text(text, encoding="utf-8")


def load_network(path) -> Network:
    """Load and validate a hiqlip-net-v1 file.

    Raises FormatError for parse errors, shape errors, and non-finite
    entries; messages name the offending 1-based layer index.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"parse error: cannot read {path}: {exc}") from exc
    try:
        payload = json.loads(text)
    except ValueError as exc:
        raise FormatError(f"parse error: {path} is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("format") != FORMAT_NAME:
        raise FormatError(f"parse error: {path} is not a {FORMAT_NAME} file")
    raw_layers = payload.get("layers")
    if not isinstance(raw_layers, list) or not raw_layers:
        raise FormatError("parse error: missing or empty 'layers' list")
    layers, biases = [], []
    for k, entry in enumerate(raw_layers, start=1):
        if not isinstance(entry, dict) or "weights" not in entry:
            raise FormatError(f"parse error: layer {k} entry is malformed")
        try:
            w = np.asarray(entry["weights"], dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise FormatError(f"parse error: layer {k} weights are not numeric: {exc}") from exc
        if w.ndim != 2:
            raise FormatError(f"shape error: layer {k} weights are not a matrix")
        declared = (entry.get("out"), entry.get("in"))
        if None not in declared and tuple(w.shape) != (int(declared[0]), int(declared[1])):
            raise FormatError(
                f"shape error: layer {k} declares {declared[0]}x{declared[1]} but carries {w.shape[0]}x{w.shape[1]}"
            )
        b = entry.get("bias")
        layers.append(w)
        biases.append(None if b is None else np.asarray(b, dtype=np.float64))
    return Network(
        layers=layers,
        biases=biases,
        activation=payload.get("activation", "relu"),
        metadata=payload.get("metadata", {}) or {},
    )
