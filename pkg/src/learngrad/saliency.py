"""Learning gradients: cost gradients carried back onto the inputs.

The raw input gradient is the backprop delta recursion taken one step past
the first layer.  Its magnitudes, L1-normalized, give a relevance
distribution over input features, which is recorded epoch by epoch while
the network trains.
"""

import csv
import enum
from dataclasses import dataclass, field

import numpy as np

from .backprop import deltas
from .errors import (
    DegenerateGradientError,
    EmptyBatchError,
    LengthMismatchError,
    NonMonotonicEpochError,
)


class Granularity(str, enum.Enum):
    PER_EPOCH = "per_epoch"
    PER_BATCH = "per_batch"
    PER_EXAMPLE = "per_example"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        return cls(str(value).replace("-", "_"))


def input_gradient_from_deltas(net, ds):
    return net.layers[0].weights.T @ ds[0]


def input_gradient(net, trace, target):
    """dC/dx for a single example, signed and unnormalized."""
    return input_gradient_from_deltas(net, deltas(net, trace, target))


def to_saliency(raw):
    """|raw| / sum(|raw|)."""
    mag = np.abs(np.asarray(raw, dtype=np.float64))
    total = mag.sum()
    if total == 0.0:
        raise DegenerateGradientError("input gradient is identically zero")
    return mag / total


def aggregate_saliency(raws):
    """Mean of per-example magnitudes, then L1-normalized.

    All-zero gradients are dropped before averaging.  Magnitudes are taken
    first so that examples pulling in opposite directions do not cancel.
    """
    raws = [np.asarray(r, dtype=np.float64) for r in raws]
    if not raws:
        raise EmptyBatchError("no input gradients to aggregate")
    width = raws[0].shape
    if any(r.shape != width for r in raws):
        raise LengthMismatchError("input gradients differ in length")
    mags = [np.abs(r) for r in raws if np.any(r != 0.0)]
    if not mags:
        raise DegenerateGradientError("every input gradient in the group is zero")
    mean = np.mean(np.stack(mags), axis=0)
    return to_saliency(mean)


@dataclass
class FeatureRanking:
    entries: list  # (feature_name, relevance), descending

    def names(self):
        return [n for n, _ in self.entries]

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


def rank_features(saliency, names, k=None):
    s = np.asarray(saliency, dtype=np.float64)
    names = list(names)
    if len(names) != s.shape[0]:
        raise LengthMismatchError(f"{len(names)} names for {s.shape[0]} relevances")
    k = len(names) if k is None else k
    if not 1 <= k <= len(names):
        raise LengthMismatchError(f"k={k} outside 1..{len(names)}")
    # stable sort on -s keeps ascending index order among ties
    order = np.argsort(-s, kind="stable")[:k]
    return FeatureRanking([(names[i], float(s[i])) for i in order])


@dataclass
class EpochSnapshot:
    epoch: int
    saliency: np.ndarray
    train_loss: float
    test_accuracy: float
    # finer-grained saliency vectors (one per batch or per example) when requested
    detail: list = field(default_factory=list)


class EvolutionRecorder:
    """Append-only list of per-epoch snapshots with 1, 2, 3, ... numbering."""

    def __init__(self):
        self.snapshots = []

    def __len__(self):
        return len(self.snapshots)

    def __iter__(self):
        return iter(self.snapshots)

    def record_epoch(self, epoch, saliency, train_loss, test_accuracy, detail=()):
        expected = self.snapshots[-1].epoch + 1 if self.snapshots else 1
        if epoch != expected:
            raise NonMonotonicEpochError(f"expected epoch {expected}, got {epoch}")
        snap = EpochSnapshot(
            epoch, np.asarray(saliency, dtype=np.float64), float(train_loss), float(test_accuracy), list(detail)
        )
        self.snapshots.append(snap)
        return snap


def _fmt(x):
    return f"{x:.10g}"


def write_evolution_csv(snapshots, names, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["epoch", "feature", "relevance"])
        for snap in snapshots:
            for name, r in zip(names, snap.saliency):
                w.writerow([snap.epoch, name, _fmt(r)])


def read_evolution_csv(path):
    """Return ``(epochs, names, matrix)`` with one matrix row per epoch."""
    rows = {}
    names = []
    with open(path, newline="", encoding="utf-8") as fh:
        for rec in csv.DictReader(fh):
            epoch = int(rec["epoch"])
            if epoch not in rows:
                rows[epoch] = []
            if len(rows) == 1:
                names.append(rec["feature"])
            rows[epoch].append(float(rec["relevance"]))
    epochs = sorted(rows)
    return epochs, names, np.array([rows[e] for e in epochs])


def write_ranking_csv(ranking, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["rank", "feature", "relevance"])
        for i, (name, r) in enumerate(ranking, start=1):
            w.writerow([i, name, _fmt(r)])


def read_ranking_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return FeatureRanking([(rec["feature"], float(rec["relevance"])) for rec in csv.DictReader(fh)])
