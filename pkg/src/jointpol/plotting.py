"""Figures for analysis reports, written to files (Agg backend)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .design import OUTCOMES, X_SIGNS, Y_SIGNS  # noqa: E402

PAIR_LABELS = ["(+1,+1)", "(+1,-1)", "(-1,+1)", "(-1,-1)"]


def marginal_pair_probabilities(counts: np.ndarray) -> dict[str, np.ndarray]:
    """Joint probabilities of (s1, s2) for s = x, y and the product x*y.

    Each result is a length-4 array ordered (+,+), (+,-), (-,+), (-,-).
    """
    p = np.asarray(counts, dtype=float)
    p = p / p.sum()
    out = {}
    for name, signs in (("x", X_SIGNS), ("y", Y_SIGNS), ("xy", X_SIGNS * Y_SIGNS)):
        probs = []
        for s1, s2 in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
            mask = np.outer(signs == s1, signs == s2)
            probs.append(p[mask].sum())
        out[name] = np.array(probs)
    return out


def plot_marginals(counts: np.ndarray, path) -> Path:
    """Three-panel bar chart of the x, y and product outcome-pair distributions."""
    marg = marginal_pair_probabilities(counts)
    titles = {"x": r"(a) $s_{HV1}, s_{HV2}$", "y": r"(b) $s_{PM1}, s_{PM2}$",
              "xy": r"(c) $s_{HV1}s_{PM1}, s_{HV2}s_{PM2}$"}
    fig, axes = plt.subplots(1, 3, figsize=(11, 3.4), sharey=True)
    for ax, key in zip(axes, ("x", "y", "xy")):
        colors = ["tab:red", "tab:blue", "tab:blue", "tab:red"]  # equal vs opposite
        ax.bar(PAIR_LABELS, marg[key], color=colors, edgecolor="k")
        ax.set_title(titles[key], fontsize=10)
        ax.tick_params(axis="x", labelsize=8)
    axes[0].set_ylabel("probability")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_count_table(counts: np.ndarray, path) -> Path:
    counts = np.asarray(counts)
    fig, ax = plt.subplots(figsize=(4.8, 4.2))
    im = ax.imshow(counts, cmap="viridis")
    headers = [o.header for o in OUTCOMES]
    ax.set_xticks(range(4), headers, fontsize=8)
    ax.set_yticks(range(4), headers, fontsize=8)
    ax.set_xlabel("outcome 2")
    ax.set_ylabel("outcome 1")
    for i in range(4):
        for j in range(4):
            ax.text(j, i, f"{int(counts[i, j])}", ha="center", va="center",
                    color="w" if counts[i, j] < counts.max() / 2 else "k", fontsize=8)
    fig.colorbar(im, ax=ax, label="coincidences")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_c2_interval(report, path) -> Path:
    """C^2 interval against zero and the ideal value -c_magnitude^2 = -0.25."""
    lo, hi = report.c2_interval
    se_lo, se_hi = report.se_c2_interval
    fig, ax = plt.subplots(figsize=(5.5, 1.9))
    ax.axvline(0.0, color="k", lw=0.8)
    ax.axvline(-0.25, color="tab:green", ls="--", lw=1, label="ideal $-0.25$")
    ax.hlines(0, lo, hi, color="tab:purple", lw=6, label=r"$C^2$ interval")
    ax.errorbar([lo, hi], [0, 0], xerr=[se_lo, se_hi], fmt="o", color="k", capsize=3)
    ax.set_yticks([])
    ax.set_xlabel(r"$C^2$")
    ax.legend(loc="upper right", fontsize=7, frameon=False)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def write_figures(counts: np.ndarray, report, outdir, prefix: str = "") -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = [
        plot_count_table(counts, outdir / f"{prefix}counts.png"),
        plot_marginals(counts, outdir / f"{prefix}marginals.png"),
    ]
    if report is not None:
        paths.append(plot_c2_interval(report, outdir / f"{prefix}c2_interval.png"))
    return paths

