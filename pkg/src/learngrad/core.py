"""Activation functions, their derivatives and the MSE cost.

Every function accepts a scalar or a numpy array and works element-wise in
float64.
"""

import enum

import numpy as np

from .errors import EmptyBatchError, ShapeMismatchError


class ActivationKind(str, enum.Enum):
    SIGMOID = "sigmoid"
    RELU = "relu"


def sigmoid(z):
    """Logistic function 1 / (1 + exp(-z)).

    Evaluated branch-wise so that ``exp`` only ever sees non-positive
    arguments and cannot overflow.
    """
    z = np.asarray(z, dtype=np.float64)
    e = np.exp(-np.abs(z))
    out = np.where(z >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
    return out[()] if out.ndim == 0 else out


def sigmoid_prime(z):
    s = sigmoid(z)
    return s * (1.0 - s)


def relu(z):
    z = np.asarray(z, dtype=np.float64)
    out = np.maximum(z, 0.0)
    return out[()] if out.ndim == 0 else out


def relu_prime(z):
    # derivative at the kink is taken as 0
    z = np.asarray(z, dtype=np.float64)
    out = (z > 0).astype(np.float64)
    return out[()] if out.ndim == 0 else out


_FUNCS = {
    ActivationKind.SIGMOID: (sigmoid, sigmoid_prime),
    ActivationKind.RELU: (relu, relu_prime),
}


def activation(kind):
    """Return ``(f, f_prime)`` for an :class:`ActivationKind`."""
    return _FUNCS[ActivationKind(kind)]


def mse_cost(predictions, targets):
    """Mean squared error with the 1/2 factor: sum((y_hat - y)**2) / (2m).

    ``predictions`` and ``targets`` are m x n (a 1-D input is read as m
    examples with one output each).
    """
    p = np.asarray(predictions, dtype=np.float64)
    t = np.asarray(targets, dtype=np.float64)
    if p.shape != t.shape:
        raise ShapeMismatchError(f"predictions {p.shape} vs targets {t.shape}")
    if p.ndim == 0:
        raise ShapeMismatchError("mse_cost needs at least one example axis")
    m = p.shape[0]
    if m == 0:
        raise EmptyBatchError("mse_cost over zero examples")
    diff = p - t
    return float(np.sum(diff * diff) / (2.0 * m))
