"""Figure rendering for the report path. All figures go straight to PNG
files through the Agg backend; nothing here opens a window."""

import math

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def plot_residuals(checks, path):
    """Bar chart of check residuals against their tolerances on a log axis."""
    names = [check.name for check in checks]
    floor = 1e-17
    residuals = [max(check.residual, floor) for check in checks]
    fig, ax = plt.subplots(figsize=(max(6, 0.55 * len(names)), 4.5))
    xs = np.arange(len(names))
    colors = ["tab:blue" if check.passed else "tab:red" for check in checks]
    ax.bar(xs, residuals, color=colors)
    for x, check in zip(xs, checks):
        if not math.isinf(check.tolerance):
            ax.hlines(max(check.tolerance, floor), x - 0.4, x + 0.4,
                      color="black", linestyle="--", linewidth=1)
    ax.set_yscale("log")
    ax.set_xticks(xs)
    ax.set_xticklabels(names, rotation=45, ha="right", fontsize=7)
    ax.set_ylabel("residual")
    ax.set_title("check residuals (dashes: tolerances)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_convergence(records, path):
    """Log-log residual ladders with a slope-1 reference line."""
    fig, ax = plt.subplots(figsize=(6, 4.5))
    drew_reference = False
    for record in records:
        spacings = np.asarray(record.spacings, dtype=float)
        residuals = np.maximum(np.asarray(record.residuals, dtype=float),
                               1e-17)
        label = record.label
        if not math.isinf(record.fitted_order):
            label += " (order %.2f)" % record.fitted_order
        ax.loglog(spacings, residuals, "o-", label=label)
        if not drew_reference and residuals.max() > 1e-16:
            anchor = residuals[-1]
            ref = anchor * (spacings / spacings[-1])
            ax.loglog(spacings, ref, ":", color="gray", label="slope 1")
            drew_reference = True
    ax.set_xlabel("refinement parameter")
    ax.set_ylabel("weak residual")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_spectrum(result, path, reference=None):
    """Eigenvalue scatter; optional reference levels drawn as lines."""
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.plot(np.arange(result.eigenvalues.size), result.eigenvalues, "o",
            markersize=3, label="computed (%s)" % result.method)
    if reference is not None:
        for level in reference:
            ax.axhline(level, color="gray", linestyle=":", linewidth=1)
    ax.set_xlabel("index")
    ax.set_ylabel("eigenvalue")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_sample_histogram(configurations, box, path, bins=40):
    """Histogram of all sampled positions with the flat intensity line."""
    positions = np.concatenate([np.asarray(c) for c in configurations]) \
        if configurations else np.zeros(0)
    fig, ax = plt.subplots(figsize=(6, 4.5))
    if positions.size:
        ax.hist(positions, bins=bins, range=box, density=True,
                alpha=0.7, label="sampled positions")
        ax.axhline(1.0 / (box[1] - box[0]), color="black", linestyle="--",
                   label="uniform density")
    ax.set_xlabel("position")
    ax.set_ylabel("density")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
