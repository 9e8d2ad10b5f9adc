"""Matplotlib renderings of the pipeline outputs, written next to the CSVs."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

RC = {
    "figure.figsize": (7.0, 4.4),
    "figure.dpi": 150,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.labelsize": 10,
    "font.size": 9,
    "legend.fontsize": 8,
}


def _save(fig, path: str | Path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def content_timeseries(rows, path) -> Path:
    """Per-document content score over time, colored by period label."""
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        for label, color in (("normal", "tab:blue"), ("recession", "tab:red")):
            sub = [r for r in rows if r.period == label]
            if sub:
                ax.scatter(
                    [r.date for r in sub], [100 * r.score for r in sub],
                    s=12, alpha=0.7, color=color, label=label,
                )
        ax.set_xlabel("date")
        ax.set_ylabel("glossary content per document (%)")
        ax.legend()
        return _save(fig, path)


def similarity_pdf(all_values, kept_values, path) -> Path:
    """Density of all pairwise cosines next to the surviving ones."""
    with plt.rc_context(RC):
        fig, axes = plt.subplots(1, 2, sharey=False)
        axes[0].hist(all_values, bins=50, density=True, color="tab:gray")
        axes[0].set_title("all pairs")
        if len(kept_values):
            axes[1].hist(kept_values, bins=50, density=True, color="tab:blue")
        axes[1].set_title("significant pairs")
        for ax in axes:
            ax.set_xlabel("cosine similarity")
        axes[0].set_ylabel("pdf")
        return _save(fig, path)


def degree_strength_histograms(degrees, strengths, path) -> Path:
    with plt.rc_context(RC):
        fig, axes = plt.subplots(1, 2)
        axes[0].hist(degrees, bins=30, color="tab:blue")
        axes[0].set_xlabel("degree")
        axes[1].hist(strengths, bins=30, color="tab:orange")
        axes[1].set_xlabel("strength")
        axes[0].set_ylabel("count")
        return _save(fig, path)


def clustering_ccdf(actual, null, path) -> Path:
    """Actual weighted-clustering ccdf against the reshuffled-weight null."""
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        ax.step(actual.values, actual.probabilities, where="post", label="actual")
        ax.step(null.values, null.probabilities, where="post", label="reshuffled weights")
        ax.set_xlabel("weighted local clustering")
        ax.set_ylabel("P(x > X)")
        ax.legend()
        return _save(fig, path)


def attribute_bars(counts: dict[str, int], title: str, path) -> Path:
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        labels = list(counts)
        ax.bar(range(len(labels)), [counts[k] for k in labels], color="tab:blue")
        ax.set_xticks(range(len(labels)))
        ax.set_xticklabels(labels, rotation=90, fontsize=6)
        ax.set_ylabel("count")
        ax.set_title(title)
        return _save(fig, path)


def ari_heatmap(labels, matrix, path) -> Path:
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(5.0, 4.2))
        image = ax.imshow(matrix, vmin=-1, vmax=1, cmap="RdBu_r")
        ax.set_xticks(range(len(labels)))
        ax.set_yticks(range(len(labels)))
        ax.set_xticklabels(labels, rotation=45, ha="right")
        ax.set_yticklabels(labels)
        for i in range(len(labels)):
            for j in range(len(labels)):
                ax.text(j, i, f"{matrix[i, j]:.2f}", ha="center", va="center", fontsize=7)
        fig.colorbar(image, ax=ax, label="adjusted Rand index")
        ax.grid(False)
        return _save(fig, path)


def richclub_curve(curve, path) -> Path:
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        points = curve.defined_points()
        ax.plot(
            [p.threshold for p in points], [p.phi_norm for p in points],
            marker=".", lw=1, label="normalized coefficient",
        )
        ax.axhline(1.0, color="tab:gray", lw=1, ls="--")
        if curve.regime_start is not None:
            ax.axvline(curve.regime_start, color="tab:red", lw=1, ls=":",
                       label=f"regime start ({curve.regime_start:g})")
        ax.set_xlabel(f"{curve.mode} threshold")
        ax.set_ylabel("phi / phi_null")
        ax.legend()
        return _save(fig, path)


def group_term_bars(core_table, periphery_table, path, top: int = 25) -> Path:
    """Top terms per group as horizontal bars (word-cloud data, not clouds)."""
    with plt.rc_context(RC):
        fig, axes = plt.subplots(1, 2, figsize=(9, 5))
        for ax, table in zip(axes, (core_table, periphery_table)):
            rows = table.rows[:top]
            names = [t for t, _ in rows][::-1]
            freqs = [f for _, f in rows][::-1]
            ax.barh(range(len(names)), freqs, color="tab:blue")
            ax.set_yticks(range(len(names)))
            ax.set_yticklabels(names, fontsize=6)
            ax.set_title(table.group + (" (cutoff)" if table.cutoff_applied else ""))
            ax.set_xlabel("frequency")
        return _save(fig, path)
