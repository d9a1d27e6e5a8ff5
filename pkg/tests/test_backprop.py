import numpy as np
import pytest

from learngrad.backprop import GradientSet, accumulate, apply_update, backprop, deltas
from learngrad.core import mse_cost
from learngrad.errors import EmptyBatchError, ShapeMismatchError, TraceMismatchError
from learngrad.network import DenseLayer, Network, forward

from conftest import fd_param_grads, grad_close, kink_free_input, random_network


def single_unit(w=0.0, b=0.0):
    return Network([DenseLayer([[w]], [b], "sigmoid")])


def test_perfect_fit_gives_zero_gradients():
    rng = np.random.default_rng(0)
    net = random_network(rng, n_out=2)
    x = rng.normal(size=net.input_width)
    trace = forward(net, x)
    g = backprop(net, trace, trace.output.copy())
    assert all(np.all(w == 0) for w in g.weights)
    assert all(np.all(b == 0) for b in g.biases)


@pytest.mark.parametrize("x0", [0.0, 1.0, -2.5, 3.0])
def test_single_layer_hand_execution(x0):
    net = single_unit()
    g = backprop(net, forward(net, [x0]), [1.0])
    # y_hat = 0.5, delta = (0.5 - 1) * 0.25
    assert g.biases[0][0] == -0.125
    assert g.weights[0][0, 0] == -0.125 * x0


def test_matches_finite_differences_on_5_4_3_1():
    rng = np.random.default_rng(3)
    net = Network([
        DenseLayer(rng.uniform(-1, 1, (4, 5)), rng.uniform(-0.5, 0.5, 4), "relu"),
        DenseLayer(rng.uniform(-1, 1, (3, 4)), rng.uniform(-0.5, 0.5, 3), "sigmoid"),
        DenseLayer(rng.uniform(-1, 1, (1, 3)), rng.uniform(-0.5, 0.5, 1), "sigmoid"),
    ])
    x = kink_free_input(rng, net)
    y = [1.0]
    g = backprop(net, forward(net, x), y)
    dws, dbs = fd_param_grads(net, x, y)
    for a, n in zip(g.weights + g.biases, dws + dbs):
        assert grad_close(a, n)


def test_gradient_check_property_50_networks():
    rng = np.random.default_rng(2024)
    for _ in range(50):
        net = random_network(rng, max_input=6, max_depth=4, max_width=6)
        x = kink_free_input(rng, net)
        y = rng.random(net.output_width)
        g = backprop(net, forward(net, x), y)
        dws, dbs = fd_param_grads(net, x, y)
        for a, n in zip(g.weights + g.biases, dws + dbs):
            assert grad_close(a, n)


def test_bias_gradient_is_delta_and_pure():
    rng = np.random.default_rng(8)
    net = random_network(rng)
    x = rng.normal(size=net.input_width)
    y = rng.random(net.output_width)
    trace = forward(net, x)
    g1 = backprop(net, trace, y)
    g2 = backprop(net, forward(net, x), y)
    ds = deltas(net, trace, y)
    for b, d in zip(g1.biases, ds):
        assert b.tobytes() == d.tobytes()
    for p, q in zip(g1.weights + g1.biases, g2.weights + g2.biases):
        assert p.tobytes() == q.tobytes()


def test_trace_mismatch():
    rng = np.random.default_rng(1)
    net = random_network(rng, max_depth=3)
    other = Network([DenseLayer(np.ones((1, net.input_width + 1)), [0.0], "sigmoid")])
    with pytest.raises(TraceMismatchError):
        backprop(net, forward(other, np.zeros(net.input_width + 1)), np.zeros(net.output_width))
    with pytest.raises(TraceMismatchError):
        backprop(net, forward(net, np.zeros(net.input_width)), np.zeros(net.output_width + 1))


def _zero_like(net):
    return GradientSet([np.zeros_like(l.weights) for l in net.layers], [np.zeros_like(l.biases) for l in net.layers])


def test_apply_update_zero_is_noop():
    rng = np.random.default_rng(4)
    net = random_network(rng)
    before = net.copy()
    apply_update(net, _zero_like(net), 0.5)
    for a, b in zip(net.layers, before.layers):
        assert np.array_equal(a.weights, b.weights) and np.array_equal(a.biases, b.biases)


def test_apply_update_arithmetic():
    net = single_unit(w=1.0)
    apply_update(net, GradientSet([np.array([[0.5]])], [np.array([0.0])]), 0.1)
    assert net.layers[0].weights[0, 0] == pytest.approx(0.95, abs=1e-16)


def test_apply_update_shape_mismatch():
    net = single_unit()
    with pytest.raises(ShapeMismatchError):
        apply_update(net, GradientSet([np.zeros((1, 2))], [np.zeros(1)]), 0.1)


def test_single_step_does_not_increase_cost():
    rng = np.random.default_rng(99)
    for _ in range(100):
        net = random_network(rng, n_out=1)
        x = rng.normal(size=net.input_width)
        y = rng.random(1)
        before = mse_cost(forward(net, x).output[None, :], y[None, :])
        apply_update(net, backprop(net, forward(net, x), y), 1e-3)
        after = mse_cost(forward(net, x).output[None, :], y[None, :])
        assert after <= before + 1e-15


def _random_set(rng, net):
    return GradientSet([rng.normal(size=l.weights.shape) for l in net.layers],
                       [rng.normal(size=l.biases.shape) for l in net.layers])


def test_accumulate_examples():
    rng = np.random.default_rng(6)
    net = random_network(rng)
    g = _random_set(rng, net)
    one = accumulate([g])
    assert all(np.array_equal(a, b) for a, b in zip(one.weights + one.biases, g.weights + g.biases))
    neg = GradientSet([-w for w in g.weights], [-b for b in g.biases])
    z = accumulate([g, neg])
    assert all(np.all(a == 0) for a in z.weights + z.biases)
    sets = [_random_set(rng, net) for _ in range(3)]
    mean = accumulate(sets)
    for i in range(len(net.layers)):
        brute = (sets[0].weights[i] + sets[1].weights[i] + sets[2].weights[i]) / 3
        assert np.max(np.abs(mean.weights[i] - brute)) < 1e-15
    twice = accumulate([g, g])
    assert all(a.tobytes() == b.tobytes() for a, b in zip(twice.weights + twice.biases, g.weights + g.biases))


def test_accumulate_errors():
    with pytest.raises(EmptyBatchError):
        accumulate([])
    a = GradientSet([np.zeros((1, 2))], [np.zeros(1)])
    b = GradientSet([np.zeros((1, 3))], [np.zeros(1)])
    with pytest.raises(ShapeMismatchError):
        accumulate([a, b])
