import math
import time

import mpmath
import numpy as np
import pytest

from learngrad.core import ActivationKind
from learngrad.data import load_reference, prepare
from learngrad.network import DenseLayer, Network, build_network
from learngrad.trainer import TrainConfig, train

REFERENCE_SEEDS = list(range(10))
PUBLISHED_TOP5 = {"worst area", "worst texture", "worst radius", "mean perimeter", "mean texture"}


# -- independent oracles: plain Python, no use of learngrad.network.forward --

def _act(kind, z):
    if kind == ActivationKind.SIGMOID:
        return 1.0 / (1.0 + math.exp(-z)) if z >= 0 else math.exp(z) / (1.0 + math.exp(z))
    return z if z > 0 else 0.0


def naive_output(layers, x):
    """Recursive evaluation: y = f(sum_k w_jk * f(...) + b_j), innermost layer first."""
    def unit(l, j):
        layer = layers[l]
        inputs = list(x) if l == 0 else [unit(l - 1, k) for k in range(layers[l - 1].weights.shape[0])]
        z = math.fsum(float(layer.weights[j, k]) * inputs[k] for k in range(len(inputs))) + float(layer.biases[j])
        return _act(layer.activation, z)

    last = len(layers) - 1
    return [unit(last, j) for j in range(layers[last].weights.shape[0])]


def naive_cost(layers, x, y):
    out = naive_output(layers, x)
    return 0.5 * math.fsum((o - t) ** 2 for o, t in zip(out, y))


def _mp_act(kind, z):
    if kind == ActivationKind.SIGMOID:
        return 1 / (1 + mpmath.exp(-z))
    return z if z > 0 else mpmath.mpf(0)


def mp_cost(params, x, y):
    """Single-example cost in 40-digit arithmetic; ``params`` is [(W, b, kind), ...] of mpf lists."""
    a = x
    for w, b, kind in params:
        a = [_mp_act(kind, mpmath.fsum(wj[k] * a[k] for k in range(len(a))) + bj) for wj, bj in zip(w, b)]
    return mpmath.fsum((o - t) ** 2 for o, t in zip(a, y)) / 2


def _mp_params(net):
    return [([[mpmath.mpf(float(v)) for v in row] for row in l.weights],
             [mpmath.mpf(float(v)) for v in l.biases], l.activation) for l in net.layers]


def fd_param_grads(net, x, y, h=1e-5):
    """Central differences (step ``h``) of the single-example cost for every weight and bias.

    The cost is evaluated in 40-digit arithmetic so the only error left is
    the O(h**2) truncation of the difference quotient.
    """
    with mpmath.workdps(40):
        params = _mp_params(net)
        xs = [mpmath.mpf(float(v)) for v in x]
        ys = [mpmath.mpf(float(v)) for v in y]
        hh = mpmath.mpf(h)
        dws, dbs = [], []
        for l, layer in enumerate(net.layers):
            w, b, _ = params[l]
            gw = np.zeros_like(layer.weights)
            for j, k in np.ndindex(layer.weights.shape):
                old = w[j][k]
                w[j][k] = old + hh
                up = mp_cost(params, xs, ys)
                w[j][k] = old - hh
                down = mp_cost(params, xs, ys)
                w[j][k] = old
                gw[j, k] = float((up - down) / (2 * hh))
            gb = np.zeros_like(layer.biases)
            for j in range(len(b)):
                old = b[j]
                b[j] = old + hh
                up = mp_cost(params, xs, ys)
                b[j] = old - hh
                down = mp_cost(params, xs, ys)
                b[j] = old
                gb[j] = float((up - down) / (2 * hh))
            dws.append(gw)
            dbs.append(gb)
    return dws, dbs


def fd_input_grad(net, x, y, h=1e-5):
    """Central differences of the cost with respect to each input, parameters fixed."""
    with mpmath.workdps(40):
        params = _mp_params(net)
        xs = [mpmath.mpf(float(v)) for v in x]
        ys = [mpmath.mpf(float(v)) for v in y]
        hh = mpmath.mpf(h)
        g = np.zeros(len(xs))
        for k in range(len(xs)):
            old = xs[k]
            xs[k] = old + hh
            up = mp_cost(params, xs, ys)
            xs[k] = old - hh
            down = mp_cost(params, xs, ys)
            xs[k] = old
            g[k] = float((up - down) / (2 * hh))
    return g


def grad_close(analytic, numeric, rel=1e-6, abs_small=1e-9, small=1e-6):
    """Relative error below ``rel``; entries with magnitude under ``small`` only need ``abs_small``."""
    a = np.asarray(analytic, dtype=np.float64).ravel()
    n = np.asarray(numeric, dtype=np.float64).ravel()
    for u, v in zip(a, n):
        scale = max(abs(u), abs(v))
        if scale < small:
            if abs(u - v) >= abs_small:
                return False
        elif abs(u - v) / scale >= rel:
            return False
    return True


def random_network(rng, max_input=8, max_depth=4, max_width=6, n_out=None):
    depth = int(rng.integers(1, max_depth + 1))
    widths = [int(rng.integers(1, max_input + 1))]
    widths += [int(rng.integers(1, max_width + 1)) for _ in range(depth - 1)]
    widths.append(int(n_out) if n_out else int(rng.integers(1, max_width + 1)))
    layers = []
    for l, (a, b) in enumerate(zip(widths, widths[1:])):
        last = l == depth - 1
        kind = ActivationKind.SIGMOID if last or rng.random() < 0.5 else ActivationKind.RELU
        layers.append(DenseLayer(rng.uniform(-1, 1, (b, a)), rng.uniform(-0.5, 0.5, b), kind))
    return Network(layers)


def kink_free_input(rng, net, margin=1e-3, tries=1000):
    """Sample x until no ReLU pre-activation lies within ``margin`` of zero."""
    from learngrad.network import forward

    for _ in range(tries):
        x = rng.normal(size=net.input_width)
        trace = forward(net, x)
        if all(
            layer.activation != ActivationKind.RELU or np.all(np.abs(z) > margin)
            for layer, z in zip(net.layers, trace.pre_activations)
        ):
            return x
    raise RuntimeError("could not find a kink-free input")


@pytest.fixture(scope="session")
def reference_data():
    return load_reference()


@pytest.fixture(scope="session")
def reference_split(reference_data):
    return prepare(reference_data, 0.2, 0)


@pytest.fixture(scope="session")
def timed_reference_runs(reference_data):
    """One default-config run per reference seed, plus the wall time of all ten."""
    t0 = time.perf_counter()
    runs = {}
    for seed in REFERENCE_SEEDS:
        tr, te, _ = prepare(reference_data, 0.2, seed)
        runs[seed] = (tr, te, train(tr, te, TrainConfig(seed=seed)))
    return runs, time.perf_counter() - t0


@pytest.fixture(scope="session")
def reference_runs(timed_reference_runs):
    """{seed: (train, test, report)}"""
    return timed_reference_runs[0]


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(RESULTS):
            terminalreporter.write_line(line)
