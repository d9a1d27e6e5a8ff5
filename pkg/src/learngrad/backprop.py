"""Per-example backpropagation of the MSE cost and plain SGD updates."""

from dataclasses import dataclass

import numpy as np

from .core import activation
from .errors import EmptyBatchError, ShapeMismatchError, TraceMismatchError


@dataclass
class GradientSet:
    weights: list  # one (out, in) matrix per layer
    biases: list  # one (out,) vector per layer

    def shapes(self):
        return [(w.shape, b.shape) for w, b in zip(self.weights, self.biases)]


def _check_trace(net, trace, target):
    if len(trace.activations) != len(net.layers) or len(trace.pre_activations) != len(net.layers):
        raise TraceMismatchError(
            f"trace has {len(trace.activations)} layers, network has {len(net.layers)}"
        )
    if trace.input.shape != (net.input_width,):
        raise TraceMismatchError(f"trace input shape {trace.input.shape} does not fit the network")
    for i, (layer, z) in enumerate(zip(net.layers, trace.pre_activations)):
        if z.shape != (layer.output_width,):
            raise TraceMismatchError(f"layer {i}: pre-activation shape {z.shape}")
    target = np.asarray(target, dtype=np.float64).reshape(-1)
    if target.shape != (net.output_width,):
        raise TraceMismatchError(
            f"target length {target.shape[0]} does not match output width {net.output_width}"
        )
    return target


def deltas(net, trace, target):
    """Error signal dC/dz for every layer, output layer last.

    The hidden recursion multiplies by the next layer's *weights*; this is
    what the finite-difference check agrees with.
    """
    target = _check_trace(net, trace, target)
    n = len(net.layers)
    out = [None] * n
    _, fp = activation(net.layers[-1].activation)
    out[-1] = (trace.output - target) * fp(trace.pre_activations[-1])
    for l in range(n - 2, -1, -1):
        _, fp = activation(net.layers[l].activation)
        out[l] = fp(trace.pre_activations[l]) * (net.layers[l + 1].weights.T @ out[l + 1])
    return out


def gradients_from_deltas(trace, ds):
    ws, bs = [], []
    for l, d in enumerate(ds):
        prev = trace.input if l == 0 else trace.activations[l - 1]
        ws.append(np.outer(d, prev))
        bs.append(d)
    return GradientSet(ws, bs)


def backprop(net, trace, target):
    """Gradients of the single-example cost with respect to every weight and bias."""
    return gradients_from_deltas(trace, deltas(net, trace, target))


def _check_congruent(net_shapes, grads):
    if grads.shapes() != net_shapes:
        raise ShapeMismatchError(f"gradient shapes {grads.shapes()} vs expected {net_shapes}")


def apply_update(net, grads, learning_rate):
    """In-place SGD step ``p -= learning_rate * dp``; returns ``net``."""
    # 0 is accepted as a no-op step; the CLI still insists on > 0
    if not learning_rate >= 0:
        raise ValueError(f"learning_rate must be non-negative, got {learning_rate}")
    _check_congruent([(l.weights.shape, l.biases.shape) for l in net.layers], grads)
    for layer, dw, db in zip(net.layers, grads.weights, grads.biases):
        layer.weights -= learning_rate * dw
        layer.biases -= learning_rate * db
    return net


def accumulate(grads):
    """Element-wise mean of gradient sets, summed in list order."""
    grads = list(grads)
    if not grads:
        raise EmptyBatchError("cannot accumulate an empty list of gradients")
    first = grads[0]
    shapes = first.shapes()
    ws = [w.copy() for w in first.weights]
    bs = [b.copy() for b in first.biases]
    for g in grads[1:]:
        _check_congruent(shapes, g)
        for i in range(len(ws)):
            ws[i] += g.weights[i]
            bs[i] += g.biases[i]
    m = float(len(grads))
    if m > 1:
        ws = [w / m for w in ws]
        bs = [b / m for b in bs]
    return GradientSet(ws, bs)
