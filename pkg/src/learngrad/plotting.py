"""Static SVG figures: correlation heatmap, per-epoch saliency panels, ranking bars."""

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

RC = {
    "font.size": 8,
    "axes.titlesize": 9,
    "axes.labelsize": 8,
    "xtick.labelsize": 6,
    "ytick.labelsize": 6,
    "axes.spines.top": False,
    "axes.spines.right": False,
    # fixed ids so repeated renders are byte-identical
    "svg.hashsalt": "learngrad",
    "svg.fonttype": "none",
}

SVG_METADATA = {"Date": None, "Creator": None}


def _save(fig, path):
    fig.savefig(path, format="svg", metadata=SVG_METADATA, bbox_inches="tight")
    plt.close(fig)


def correlation_heatmap(matrix, names, path):
    n = len(names)
    with plt.rc_context(RC):
        size = max(4.0, 0.28 * n + 2.0)
        fig, ax = plt.subplots(figsize=(size + 1.0, size))
        im = ax.imshow(matrix, cmap="RdBu_r", vmin=-1.0, vmax=1.0)
        ax.set_xticks(range(n))
        ax.set_yticks(range(n))
        ax.set_xticklabels(names, rotation=90)
        ax.set_yticklabels(names)
        ax.spines[:].set_visible(False)
        fig.colorbar(im, ax=ax, fraction=0.046, pad=0.04, label="Pearson r")
        ax.set_title("Feature correlation")
        _save(fig, path)


def select_epochs(epochs, spec):
    """Resolve an epochs filter: ``"odd"``, ``"all"`` or a comma list like ``"1,5,9"``.

    ``"odd"`` falls back to every epoch when none is odd (cannot happen with
    1-based numbering, but a hand-edited report might start at 2).
    """
    epochs = list(epochs)
    if spec == "all":
        return epochs
    if spec == "odd":
        odd = [e for e in epochs if e % 2 == 1]
        return odd or epochs
    wanted = [int(tok) for tok in str(spec).split(",") if tok.strip()]
    missing = sorted(set(wanted) - set(epochs))
    if missing:
        raise KeyError(f"epochs not present in report: {missing}")
    return wanted


def saliency_evolution(epochs, saliency, names, path, selected=None):
    """One bar panel per selected epoch, all panels on the same y-scale.

    ``saliency`` has one row per entry of ``epochs``.  Returns the number of
    panels drawn.
    """
    saliency = np.asarray(saliency, dtype=np.float64)
    selected = list(epochs) if selected is None else list(selected)
    rows_by_epoch = {e: i for i, e in enumerate(epochs)}
    n_panels = len(selected)
    ncols = min(5, n_panels)
    nrows = math.ceil(n_panels / ncols)
    ymax = max(float(saliency[[rows_by_epoch[e] for e in selected]].max()), 1e-12) * 1.05
    x = np.arange(len(names))
    with plt.rc_context(RC):
        fig, axes = plt.subplots(
            nrows, ncols, figsize=(2.6 * ncols, 1.9 * nrows + 1.2), sharey=True, squeeze=False
        )
        for k, ax in enumerate(axes.flat):
            if k >= n_panels:
                ax.remove()
                continue
            e = selected[k]
            ax.bar(x, saliency[rows_by_epoch[e]], color="#4c72b0", width=0.8)
            ax.set_ylim(0, ymax)
            ax.set_title(f"epoch {e}")
            ax.set_xticks(x)
            # feature names only where there is room: bottom panel of each column
            if k + ncols >= n_panels:
                ax.set_xticklabels(names, rotation=90, fontsize=4)
            else:
                ax.set_xticklabels([])
            if k % ncols == 0:
                ax.set_ylabel("relevance")
        _save(fig, path)
    return n_panels


def ranking_bars(ranking, path):
    names = [n for n, _ in ranking]
    vals = [r for _, r in ranking]
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(4.5, 0.25 * len(names) + 1.0))
        y = np.arange(len(names))
        ax.barh(y, vals, color="#4c72b0")
        ax.set_yticks(y)
        ax.set_yticklabels(names)
        ax.invert_yaxis()
        ax.set_xlabel("relevance")
        _save(fig, path)
