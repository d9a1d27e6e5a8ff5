"""Fully-connected networks: construction, forward propagation, JSON I/O."""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .core import ActivationKind, activation
from .errors import (
    DimensionMismatchError,
    IncompatibleSpecsError,
    UnsupportedHeadError,
)


@dataclass(frozen=True)
class LayerSpec:
    input_width: int
    output_width: int
    activation: ActivationKind = ActivationKind.RELU

    def __post_init__(self):
        if self.input_width < 1 or self.output_width < 1:
            raise IncompatibleSpecsError(f"layer widths must be >= 1, got {self}")
        object.__setattr__(self, "activation", ActivationKind(self.activation))


@dataclass
class DenseLayer:
    weights: np.ndarray  # (output_width, input_width)
    biases: np.ndarray  # (output_width,)
    activation: ActivationKind

    def __post_init__(self):
        self.weights = np.array(self.weights, dtype=np.float64, ndmin=2)
        self.biases = np.array(self.biases, dtype=np.float64, ndmin=1)
        self.activation = ActivationKind(self.activation)
        if self.weights.shape[0] != self.biases.shape[0]:
            raise IncompatibleSpecsError(
                f"weights have {self.weights.shape[0]} rows but {self.biases.shape[0]} biases"
            )

    @property
    def input_width(self):
        return self.weights.shape[1]

    @property
    def output_width(self):
        return self.weights.shape[0]


@dataclass
class Network:
    layers: list
    feature_names: list = None

    def __post_init__(self):
        if not self.layers:
            raise IncompatibleSpecsError("a network needs at least one layer")
        for i, (a, b) in enumerate(zip(self.layers, self.layers[1:])):
            if a.output_width != b.input_width:
                raise IncompatibleSpecsError(
                    f"layer {i} outputs {a.output_width} but layer {i + 1} expects {b.input_width}"
                )
        if self.feature_names is not None:
            self.feature_names = list(self.feature_names)
            if len(self.feature_names) != self.input_width:
                raise IncompatibleSpecsError(
                    f"{len(self.feature_names)} feature names for {self.input_width} inputs"
                )

    @property
    def input_width(self):
        return self.layers[0].input_width

    @property
    def output_width(self):
        return self.layers[-1].output_width

    def copy(self):
        return Network(
            [DenseLayer(l.weights.copy(), l.biases.copy(), l.activation) for l in self.layers],
            None if self.feature_names is None else list(self.feature_names),
        )

    def to_dict(self):
        return {
            "layers": [
                {
                    "activation": l.activation.value,
                    "weights": l.weights.tolist(),
                    "biases": l.biases.tolist(),
                }
                for l in self.layers
            ],
            "feature_names": self.feature_names,
        }

    @classmethod
    def from_dict(cls, doc):
        layers = [
            DenseLayer(np.array(l["weights"], dtype=np.float64, ndmin=2), l["biases"], l["activation"])
            for l in doc["layers"]
        ]
        return cls(layers, doc.get("feature_names"))


@dataclass
class ForwardTrace:
    """Everything backprop needs from one forward pass over a single example."""

    input: np.ndarray
    pre_activations: list = field(default_factory=list)
    activations: list = field(default_factory=list)

    @property
    def output(self):
        return self.activations[-1]


def build_network(specs, seed, feature_names=None):
    """Glorot-uniform weights and zero biases, drawn from a PCG64 stream seeded by ``seed``."""
    specs = list(specs)
    if not specs:
        raise IncompatibleSpecsError("no layer specs given")
    for i, (a, b) in enumerate(zip(specs, specs[1:])):
        if a.output_width != b.input_width:
            raise IncompatibleSpecsError(
                f"spec {i} outputs {a.output_width} but spec {i + 1} expects {b.input_width}"
            )
    rng = np.random.default_rng(seed)
    layers = []
    for s in specs:
        limit = math.sqrt(6.0 / (s.input_width + s.output_width))
        w = rng.uniform(-limit, limit, size=(s.output_width, s.input_width))
        layers.append(DenseLayer(w, np.zeros(s.output_width), s.activation))
    return Network(layers, feature_names)


def forward(net, x):
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (net.input_width,):
        raise DimensionMismatchError(f"expected input of length {net.input_width}, got shape {x.shape}")
    trace = ForwardTrace(input=x)
    a = x
    for layer in net.layers:
        f, _ = activation(layer.activation)
        z = layer.weights @ a + layer.biases
        a = f(z)
        trace.pre_activations.append(z)
        trace.activations.append(a)
    return trace


def predict_class(net, x):
    """Binary label from a single sigmoid output: 1 if y_hat >= 0.5 else 0."""
    if net.output_width != 1 or net.layers[-1].activation is not ActivationKind.SIGMOID:
        raise UnsupportedHeadError("predict_class needs a single sigmoid output unit")
    return int(forward(net, x).output[0] >= 0.5)


def save_network(net, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(net.to_dict(), fh, indent=2)
        fh.write("\n")


def load_network(path):
    with open(path, encoding="utf-8") as fh:
        return Network.from_dict(json.load(fh))
