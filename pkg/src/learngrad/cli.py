"""Command-line entry point.

    learngrad train      --data wisconsin.csv --out runs/a
    learngrad correlate  --data wisconsin.csv --out runs/a
    learngrad rank       --out runs/a --top 5
    learngrad evolution  --out runs/a --epochs-filter odd

Exit codes: 0 success, 1 runtime or data error, 2 usage error.
"""

import argparse
import json
import sys
from pathlib import Path

from . import plotting
from .data import (
    correlation_matrix,
    load_csv,
    load_reference,
    prepare,
    write_matrix_csv,
)
from .errors import LearnGradError
from .network import save_network
from .saliency import Granularity, rank_features, write_evolution_csv, write_ranking_csv
from .trainer import TrainConfig, default_architecture, load_report, train


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not (v > 0 and v != float("inf")):
        raise argparse.ArgumentTypeError(f"must be a finite number > 0, got {text}")
    return v


def _fraction(text):
    v = _positive_float(text)
    if not v < 1:
        raise argparse.ArgumentTypeError(f"must be in (0, 1), got {text}")
    return v


def _seed(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer seed, got {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be in [0, 2**64)")
    return v


def _widths(text):
    try:
        return tuple(_positive_int(tok) for tok in text.split(","))
    except argparse.ArgumentTypeError as exc:
        raise argparse.ArgumentTypeError(f"--hidden {text!r}: {exc}") from None


def _granularity(text):
    try:
        return Granularity.parse(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected per-epoch, per-batch or per-example") from None


def _epochs_filter(text):
    if text in ("odd", "all"):
        return text
    try:
        vals = [_positive_int(tok) for tok in text.split(",")]
    except argparse.ArgumentTypeError:
        raise argparse.ArgumentTypeError(f"expected odd, all or a list like 1,5,9; got {text!r}") from None
    return ",".join(str(v) for v in vals)


def build_parser():
    parser = argparse.ArgumentParser(prog="learngrad", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def data_out(p):
        p.add_argument("--data", type=Path, default=None, help="CSV with a final 'target' column (default: bundled Wisconsin data)")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")

    p = sub.add_parser("train", help="train a network and record learning gradients")
    data_out(p)
    p.add_argument("--epochs", type=_positive_int, default=40)
    p.add_argument("--batch-size", type=_positive_int, default=16)
    p.add_argument("--lr", type=_positive_float, default=0.1)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--test-fraction", type=_fraction, default=0.2)
    p.add_argument("--granularity", type=_granularity, default=Granularity.PER_EPOCH)
    p.add_argument("--hidden", type=_widths, default=(3,), help="hidden widths, e.g. 3 or 8,4")

    p = sub.add_parser("correlate", help="Pearson correlation matrix and heatmap")
    data_out(p)

    p = sub.add_parser("rank", help="feature ranking from a run report")
    p.add_argument("--report", type=Path, default=None, help="run_report.json (default: OUT/run_report.json)")
    p.add_argument("--out", type=Path, default=Path("."))
    p.add_argument("--top", type=_positive_int, default=5)

    p = sub.add_parser("evolution", help="per-epoch saliency bar panels from a run report")
    p.add_argument("--report", type=Path, default=None, help="run_report.json (default: OUT/run_report.json)")
    p.add_argument("--out", type=Path, default=Path("."))
    p.add_argument("--epochs-filter", type=_epochs_filter, default="odd")
    return parser


def _load_data(path):
    return load_reference() if path is None else load_csv(path)


def cmd_train(args):
    data = _load_data(args.data)
    train_set, test_set, _ = prepare(data, args.test_fraction, args.seed)
    config = TrainConfig(
        epochs=args.epochs,
        batch_size=args.batch_size,
        learning_rate=args.lr,
        seed=args.seed,
        saliency_granularity=args.granularity,
        architecture=default_architecture(data.n_features, args.hidden),
    )
    report = train(train_set, test_set, config)
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    (out / "run_report.json").write_text(report.to_json(), encoding="utf-8")
    write_evolution_csv(report.snapshots, report.feature_names, out / "saliency_evolution.csv")
    write_ranking_csv(report.final_ranking, out / "ranking.csv")
    save_network(report.network, out / "network.json")
    print(f"test accuracy: {report.final_test_accuracy:.4f} ({len(test_set)} rows)")
    print(f"final train loss: {report.final_train_loss:.6f}")
    print("top features:")
    for i, (name, r) in enumerate(list(report.final_ranking)[:5], start=1):
        print(f"  {i}. {name}  {r:.4f}")
    return 0


def cmd_correlate(args):
    data = _load_data(args.data)
    r = correlation_matrix(data)
    args.out.mkdir(parents=True, exist_ok=True)
    write_matrix_csv(r, data.feature_names, args.out / "correlation.csv")
    plotting.correlation_heatmap(r, data.feature_names, args.out / "correlation.svg")
    print(f"wrote {args.out / 'correlation.csv'} and {args.out / 'correlation.svg'}")
    return 0


def _report(args):
    return load_report(args.report if args.report is not None else args.out / "run_report.json")


def cmd_rank(args):
    report = _report(args)
    last = report.snapshots[-1]
    k = min(args.top, len(report.feature_names))
    ranking = rank_features(last.saliency, report.feature_names, k)
    args.out.mkdir(parents=True, exist_ok=True)
    write_ranking_csv(ranking, args.out / "ranking.csv")
    plotting.ranking_bars(ranking, args.out / "ranking.svg")
    for i, (name, r) in enumerate(ranking, start=1):
        print(f"{i}\t{name}\t{r:.4f}")
    return 0


def cmd_evolution(args):
    report = _report(args)
    epochs = [s.epoch for s in report.snapshots]
    selected = plotting.select_epochs(epochs, args.epochs_filter)
    args.out.mkdir(parents=True, exist_ok=True)
    n = plotting.saliency_evolution(
        epochs, [s.saliency for s in report.snapshots], report.feature_names,
        args.out / "evolution.svg", selected,
    )
    print(f"wrote {args.out / 'evolution.svg'} with {n} panels")
    return 0


COMMANDS = {"train": cmd_train, "correlate": cmd_correlate, "rank": cmd_rank, "evolution": cmd_evolution}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (LearnGradError, OSError, KeyError, IndexError, TypeError, ValueError, json.JSONDecodeError) as exc:
        print(f"learngrad {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
