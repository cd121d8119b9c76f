"""Optional figure rendering for CLI reports.

Figures are written straight to files (Agg backend); the delimited output
remains the primary machine-readable artifact.
"""
from __future__ import annotations

from typing import Sequence


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def plot_cdf_comparison(xs, empirical, oracle, diff, out_path: str, title: str = "") -> str:
    plt = _pyplot()
    fig, (ax, axd) = plt.subplots(
        2, 1, figsize=(7, 6), sharex=True, gridspec_kw={"height_ratios": [3, 1]}
    )
    ax.plot(xs, oracle, label="exact CDF", color="black", lw=1.5)
    ax.step(xs, empirical, label="empirical", color="tab:blue", lw=1.0, where="post")
    ax.set_ylabel("F(x)")
    ax.legend(loc="lower right")
    if title:
        ax.set_title(title)
    axd.plot(xs, diff, color="tab:red", lw=0.8)
    axd.axhline(0.0, color="black", lw=0.5)
    axd.set_xlabel("x")
    axd.set_ylabel("empirical - exact")
    fig.tight_layout()
    fig.savefig(out_path, dpi=130)
    plt.close(fig)
    return out_path


def plot_profile_trace(names: Sequence[str], rows: Sequence[Sequence[float]], out_path: str, title: str = "") -> str:
    """Per-vertex level trajectories over the rounds of a move sequence."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 4.5))
    rounds = range(len(rows))
    for j, name in enumerate(names):
        ax.plot(rounds, [row[j] for row in rows], label=str(name), lw=1.2)
    ax.set_xlabel("round")
    ax.set_ylabel("level")
    if len(names) <= 12:
        ax.legend(fontsize=8, ncol=2)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(out_path, dpi=130)
    plt.close(fig)
    return out_path


def plot_halfline_progress(steps, bound_curve, out_path: str, title: str = "") -> str:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ms = [s.index for s in steps]
    ax.plot(ms, [float(s.achieved) for s in steps], marker="o", label="achieved level", lw=1.2)
    ax.plot(ms, bound_curve, marker=".", label="1 - residual product bound", lw=1.0)
    ax.set_xlabel("pendants used")
    ax.set_ylabel("level at target")
    ax.legend()
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(out_path, dpi=130)
    plt.close(fig)
    return out_path
