"""Figure rendering for experiment outputs, written next to the CSV files."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

SCHEME_COLORS = {
    "none": "tab:blue",
    "uniform": "tab:green",
    "per_layer": "tab:red",
    "soft": "tab:purple",
}

COMBO_COLORS = {
    "E-E": "tab:blue",
    "E-H": "tab:cyan",
    "H-E": "tab:orange",
    "H-H": "tab:red",
}


def sweep_figure(agg, path: str | Path) -> None:
    """Best-case and mean+-std success probability versus circuit depth."""
    schemes = sorted({e.scheme for e in agg.entries})
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.6), sharey=True)
    for scheme in schemes:
        entries = sorted(agg.for_scheme(scheme), key=lambda e: e.depth)
        depths = [e.depth for e in entries]
        color = SCHEME_COLORS.get(scheme, None)
        axes[0].plot(depths, [e.best for e in entries], "o-", color=color, label=scheme)
        axes[1].errorbar(
            depths,
            [e.mean for e in entries],
            yerr=[e.std for e in entries],
            fmt="o-",
            color=color,
            capsize=3,
            label=scheme,
        )
    sa = agg.entries[0].sa_rate if agg.entries else float("nan")
    for ax, title in zip(axes, ("best case", "mean over trials")):
        if np.isfinite(sa):
            ax.axhline(sa, color="gray", ls="--", lw=1, label="SA")
        ax.set_xlabel("circuit depth p")
        ax.set_title(title)
        ax.set_ylim(0, 1.05)
    axes[0].set_ylabel("ground-state probability")
    axes[0].legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def crosstest_figure(results: dict, path: str | Path) -> None:
    """Mean success trajectory per circuit/cost combination."""
    fig, ax = plt.subplots(figsize=(5.5, 3.8))
    for combo, trajs in results.items():
        epochs = trajs[0].epochs
        mean = np.mean([t.successes for t in trajs], axis=0)
        ax.plot(epochs, mean, label=combo, color=COMBO_COLORS.get(combo))
    ax.set_xlabel("optimization epoch")
    ax.set_ylabel("ground-state probability")
    ax.set_ylim(0, 1.05)
    ax.legend(title="circuit-cost", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def landscape_figure(entries: Sequence[tuple], path: str | Path) -> None:
    """Normalized shell-minimum curves, one line per retain fraction."""
    fig, ax = plt.subplots(figsize=(5.5, 3.8))
    for fraction, curve in entries:
        y = curve.normalized if curve.normalized is not None else curve.values
        ax.plot(range(curve.n + 1), y, marker=".", label=f"retain {fraction:g}")
    ax.set_xlabel("Hamming distance from ground state")
    ax.set_ylabel("normalized minimum energy")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
