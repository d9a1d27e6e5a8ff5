"""Mini-batch SGD with learning-gradient recording."""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .backprop import accumulate, apply_update, deltas, gradients_from_deltas
from .core import ActivationKind, mse_cost
from .errors import DimensionMismatchError, EmptyDatasetError, NonFiniteLossError
from .network import LayerSpec, Network, build_network, forward, predict_class
from .saliency import (
    DegenerateGradientError,
    EvolutionRecorder,
    Granularity,
    aggregate_saliency,
    input_gradient_from_deltas,
    rank_features,
    to_saliency,
)


def default_architecture(n_inputs=30, hidden=(3,)):
    """ReLU hidden layers followed by a single sigmoid output."""
    widths = [n_inputs, *hidden]
    specs = [LayerSpec(a, b, ActivationKind.RELU) for a, b in zip(widths, widths[1:])]
    specs.append(LayerSpec(widths[-1], 1, ActivationKind.SIGMOID))
    return specs


@dataclass
class TrainConfig:
    epochs: int = 40
    batch_size: int = 16
    learning_rate: float = 0.1
    seed: int = 0
    saliency_granularity: Granularity = Granularity.PER_EPOCH
    architecture: list = field(default_factory=default_architecture)

    def __post_init__(self):
        if int(self.epochs) != self.epochs or self.epochs < 1:
            raise ValueError(f"epochs must be a positive integer, got {self.epochs}")
        if int(self.batch_size) != self.batch_size or self.batch_size < 1:
            raise ValueError(f"batch_size must be a positive integer, got {self.batch_size}")
        if not (math.isfinite(self.learning_rate) and self.learning_rate >= 0):
            raise ValueError(f"learning_rate must be finite and non-negative, got {self.learning_rate}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must fit in 64 unsigned bits, got {self.seed}")
        self.saliency_granularity = Granularity.parse(self.saliency_granularity)

    def to_dict(self):
        return {
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "learning_rate": self.learning_rate,
            "seed": self.seed,
            "saliency_granularity": self.saliency_granularity.value,
            "architecture": [
                {"input_width": s.input_width, "output_width": s.output_width, "activation": s.activation.value}
                for s in self.architecture
            ],
        }

    @classmethod
    def from_dict(cls, doc):
        arch = [LayerSpec(a["input_width"], a["output_width"], a["activation"]) for a in doc["architecture"]]
        return cls(doc["epochs"], doc["batch_size"], doc["learning_rate"], doc["seed"],
                   doc["saliency_granularity"], arch)


@dataclass
class RunReport:
    config: TrainConfig
    feature_names: list
    snapshots: list
    final_test_accuracy: float
    final_test_loss: float
    final_train_loss: float
    final_ranking: object
    network: Network
    updates: int = 0
    valid: bool = True

    def to_dict(self):
        return {
            "config": self.config.to_dict(),
            "feature_names": list(self.feature_names),
            "valid": self.valid,
            "updates": self.updates,
            "epochs": [s.epoch for s in self.snapshots],
            "train_loss": [s.train_loss for s in self.snapshots],
            "test_accuracy": [s.test_accuracy for s in self.snapshots],
            "saliency": [s.saliency.tolist() for s in self.snapshots],
            "saliency_detail": [[d.tolist() for d in s.detail] for s in self.snapshots],
            "final_test_accuracy": self.final_test_accuracy,
            "final_test_loss": self.final_test_loss,
            "final_train_loss": self.final_train_loss,
            "final_ranking": [{"feature": n, "relevance": r} for n, r in self.final_ranking],
            "network": self.network.to_dict(),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, doc):
        from .saliency import EpochSnapshot, FeatureRanking

        details = doc.get("saliency_detail") or [[] for _ in doc["epochs"]]
        snaps = [
            EpochSnapshot(e, np.array(s), l, a, [np.array(d) for d in det])
            for e, s, l, a, det in zip(doc["epochs"], doc["saliency"], doc["train_loss"],
                                       doc["test_accuracy"], details)
        ]
        ranking = FeatureRanking([(r["feature"], r["relevance"]) for r in doc["final_ranking"]])
        return cls(
            TrainConfig.from_dict(doc["config"]), doc["feature_names"], snaps,
            doc["final_test_accuracy"], doc["final_test_loss"], doc["final_train_loss"],
            ranking, Network.from_dict(doc["network"]), doc.get("updates", 0), doc.get("valid", True),
        )


def load_report(path):
    with open(path, encoding="utf-8") as fh:
        return RunReport.from_dict(json.load(fh))


def make_batches(n_rows, batch_size, epoch_seed):
    """Shuffle ``range(n_rows)`` with ``epoch_seed`` and cut into chunks of ``batch_size``."""
    if batch_size < 1:
        raise ValueError(f"batch_size must be >= 1, got {batch_size}")
    perm = np.random.default_rng(epoch_seed).permutation(n_rows)
    return [perm[i:i + batch_size] for i in range(0, n_rows, batch_size)]


def evaluate(net, data):
    """Return ``(accuracy, mse)`` of ``net`` over ``data``."""
    if len(data) == 0:
        raise EmptyDatasetError("cannot evaluate on an empty dataset")
    preds = np.empty((len(data), net.output_width))
    correct = 0
    for i, (x, y) in enumerate(zip(data.features, data.labels)):
        preds[i] = forward(net, x).output
        correct += predict_class(net, x) == y
    loss = mse_cost(preds, data.labels.reshape(-1, 1).astype(np.float64))
    return correct / len(data), loss


def _saliency_or_none(fn, arg):
    try:
        return fn(arg)
    except DegenerateGradientError:
        return None


def train(train_set, test_set, config, network=None):
    """Run SGD for ``config.epochs`` epochs and record learning gradients.

    Each epoch reshuffles with ``seed + epoch``.  Within a batch every
    example gets its own forward/backprop pass; the per-example parameter
    gradients are averaged into one update and the input gradients from the
    same passes feed the saliency record.
    """
    arch = config.architecture
    if arch[0].input_width != train_set.n_features or arch[0].input_width != test_set.n_features:
        raise DimensionMismatchError(
            f"architecture expects {arch[0].input_width} inputs, data has {train_set.n_features}"
        )
    net = network if network is not None else build_network(arch, config.seed, train_set.feature_names)
    names = train_set.feature_names
    targets = train_set.labels.astype(np.float64).reshape(-1, 1)
    recorder = EvolutionRecorder()
    updates = 0
    gran = config.saliency_granularity

    def partial_report():
        acc, tloss = evaluate(net, test_set)
        last = recorder.snapshots[-1] if recorder.snapshots else None
        ranking = rank_features(last.saliency, names) if last is not None else rank_features(
            np.full(len(names), 1.0 / len(names)), names)
        return RunReport(config, names, recorder.snapshots, acc, tloss,
                         last.train_loss if last else float("nan"), ranking, net, updates, valid=False)

    for epoch in range(1, config.epochs + 1):
        batch_costs = []
        epoch_raws = []
        detail = []
        for batch in make_batches(len(train_set), config.batch_size, config.seed + epoch):
            grads, outputs, raws = [], [], []
            for i in batch:
                trace = forward(net, train_set.features[i])
                ds = deltas(net, trace, targets[i])
                grads.append(gradients_from_deltas(trace, ds))
                raws.append(input_gradient_from_deltas(net, ds))
                outputs.append(trace.output)
            cost = mse_cost(np.array(outputs), targets[batch])
            if not math.isfinite(cost):
                raise NonFiniteLossError(f"cost became {cost} in epoch {epoch}", partial_report())
            batch_costs.append(cost)
            apply_update(net, accumulate(grads), config.learning_rate)
            updates += 1
            epoch_raws.extend(raws)
            if gran is Granularity.PER_BATCH:
                s = _saliency_or_none(aggregate_saliency, raws)
                if s is not None:
                    detail.append(s)
            elif gran is Granularity.PER_EXAMPLE:
                detail.extend(s for s in map(lambda r: _saliency_or_none(to_saliency, r), raws) if s is not None)
        epoch_saliency = aggregate_saliency(epoch_raws)
        acc, _ = evaluate(net, test_set)
        recorder.record_epoch(epoch, epoch_saliency, float(np.mean(batch_costs)), acc, detail)

    acc, test_loss = evaluate(net, test_set)
    last = recorder.snapshots[-1]
    return RunReport(
        config, names, recorder.snapshots, acc, test_loss, last.train_loss,
        rank_features(last.saliency, names), net, updates,
    )
