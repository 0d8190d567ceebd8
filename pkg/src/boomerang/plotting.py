"""Render result tables to figures next to the delimited output.

One figure per metric, redundancy budget on the x axis, one line per
scheme, error bars from the per-seed std columns.  The CSV stays the
canonical artifact; these are quick-look companions.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .sweep import ResultTable

_METRICS = (
    ("throughput", "throughput_mean", "throughput_std", "successful funds / (s * node)"),
    ("ttc", "ttc_mean", "ttc_std", "time to completion (s)"),
    ("volume", "volume_mean", "volume_std", "mean successful amount"),
)


def render_figures(table: ResultTable, out_dir: str, stem: str = "results") -> list:
    """Write one PNG per metric; returns the created file paths."""
    os.makedirs(out_dir, exist_ok=True)
    schemes = []
    for row in table.rows:
        if row.scheme not in schemes:
            schemes.append(row.scheme)
    paths = []
    for name, mean_attr, std_attr, ylabel in _METRICS:
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        for scheme in schemes:
            rows = sorted(
                (r for r in table.rows if r.scheme == scheme), key=lambda r: r.u
            )
            ax.errorbar(
                [r.u for r in rows],
                [getattr(r, mean_attr) for r in rows],
                yerr=[getattr(r, std_attr) for r in rows],
                marker="o",
                capsize=3,
                label=scheme,
            )
        ax.set_xlabel("redundancy budget u")
        ax.set_ylabel(ylabel)
        ax.grid(True, alpha=0.3)
        ax.legend()
        fig.tight_layout()
        path = os.path.join(out_dir, f"{stem}_{name}.png")
        fig.savefig(path, dpi=150)
        plt.close(fig)
        paths.append(path)
    return paths
