"""Matplotlib report figures (written to files with the Agg backend)."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_PNG_META = {"Software": None}


def _spectrum_panel(ax, grid, title):
    J, T = grid.shape
    im = ax.imshow(grid, aspect="auto", origin="upper", extent=(0, 1, J + 0.5, 0.5), cmap="viridis")
    ax.set_title(title, fontsize=9)
    ax.set_ylabel("scale j")
    ax.set_yticks(range(1, J + 1))
    return im


def _barcode_panel(ax, artifact):
    n = artifact.n_rows
    for i, (_, spans) in enumerate(artifact.rows):
        for s, e in spans:
            ax.add_patch(plt.Rectangle((s / artifact.T, i), (e - s) / artifact.T, 1, color="black", lw=0))
    ax.set_xlim(0, 1)
    ax.set_ylim(n, 0)
    ax.set_yticks(np.arange(n) + 0.5)
    ax.set_yticklabels([label for label, _ in artifact.rows], fontsize=7)
    ax.set_xlabel("rescaled time z")
    ax.set_title(artifact.title or "rejections", fontsize=9)


def report_figure(path, mean1, mean2, artifact, labels=("group 1", "group 2"), suptitle=None):
    """Two group-mean grids and the barcode, stacked vertically."""
    fig, axes = plt.subplots(3, 1, figsize=(7, 9), sharex=True)
    for ax, grid, lab in zip(axes[:2], (mean1, mean2), labels):
        im = _spectrum_panel(ax, np.asarray(grid), f"mean grid, {lab}")
        fig.colorbar(im, ax=ax, fraction=0.04)
    _barcode_panel(axes[2], artifact)
    if suptitle:
        fig.suptitle(suptitle)
    fig.tight_layout()
    fig.savefig(path, dpi=100, metadata=_PNG_META)
    plt.close(fig)


def power_figure(path, reports, title="Empirical rejection rate"):
    """Grouped bars: one group per model, one bar per test and correction."""
    models, cols, vals = [], [], {}
    for r in reports:
        col = f"{r.spec.test} ({'Bon.' if r.spec.correction == 'bonferroni' else 'FDR'})"
        if r.spec.model not in models:
            models.append(r.spec.model)
        if col not in cols:
            cols.append(col)
        vals[(r.spec.model, col)] = r.percent
    fig, ax = plt.subplots(figsize=(max(6, 1.2 * len(models) + 2), 4))
    width = 0.8 / max(len(cols), 1)
    x = np.arange(len(models))
    for i, c in enumerate(cols):
        ax.bar(x + i * width - 0.4 + width / 2, [vals.get((m, c), 0.0) for m in models], width, label=c)
    ax.set_xticks(x)
    ax.set_xticklabels(models)
    ax.set_ylim(0, 100)
    ax.set_ylabel("percent of replicates rejecting")
    ax.set_title(title)
    if cols:
        ax.legend(fontsize=7, ncol=2)
    fig.tight_layout()
    fig.savefig(path, dpi=100, metadata=_PNG_META)
    plt.close(fig)
