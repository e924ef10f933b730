"""Delimited report writers and optional figure rendering.

Every report is TSV on stdout so runs diff cleanly; when a figure directory
is given, the same data is also rendered to PNG files alongside.
"""

from __future__ import annotations

import os

import numpy as np


def matrix_tsv(names: list[str], matrix: np.ndarray) -> str:
    lines = ["\t".join([""] + names)]
    for name, row in zip(names, matrix):
        lines.append("\t".join([name] + [f"{v:.6f}" for v in row]))
    return "\n".join(lines) + "\n"


def bench_tsv(rows: list[dict]) -> str:
    lines = ["chunk_size\tpairs\tseconds_per_pair\tcache_entries\tcache_hits\tcache_misses\thit_rate"]
    for r in rows:
        lines.append(
            f"{r['chunk_size']}\t{r['pairs']}\t{r['seconds_per_pair']:.9f}"
            f"\t{r['entries']}\t{r['hits']}\t{r['misses']}\t{r['hit_rate']:.6f}"
        )
    return "\n".join(lines) + "\n"


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_matrix_heatmap(names: list[str], matrix: np.ndarray, path: str) -> str:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(max(4, len(names) * 0.5), max(3.5, len(names) * 0.45)))
    im = ax.imshow(matrix, vmin=0.0, vmax=1.0, cmap="viridis")
    show_ticks = len(names) <= 40
    if show_ticks:
        ax.set_xticks(range(len(names)), names, rotation=90, fontsize=7)
        ax.set_yticks(range(len(names)), names, fontsize=7)
    ax.set_title("pairwise similarity")
    fig.colorbar(im, ax=ax, shrink=0.8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_property_figure(rows, path: str) -> str:
    plt = _pyplot()
    names = [r.name for r in rows]
    violations = [r.violations for r in rows]
    trials = [r.trials for r in rows]
    fig, ax = plt.subplots(figsize=(8, 4))
    bars = ax.bar(range(len(names)), trials, color="#9ecae1", label="trials")
    ax.bar(range(len(names)), violations, color="#de2d26", label="violations")
    ax.set_xticks(range(len(names)), names, rotation=45, ha="right", fontsize=7)
    ax.set_ylabel("count")
    ax.set_title("similarity property trials")
    ax.legend()
    for bar, v in zip(bars, violations):
        if v:
            ax.text(bar.get_x() + bar.get_width() / 2, v, str(v), ha="center")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_bench_figure(rows: list[dict], path: str) -> str:
    plt = _pyplot()
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
    chunks = [r["chunk_size"] for r in rows]
    ax1.plot(chunks, [r["seconds_per_pair"] * 1e6 for r in rows], marker="o")
    ax1.set_xscale("log", base=2)
    ax1.set_xlabel("chunk size")
    ax1.set_ylabel("microseconds per pair")
    ax1.set_title("pair cost")
    ax2.bar([str(c) for c in chunks], [r["hit_rate"] for r in rows], color="#74c476")
    ax2.set_xlabel("chunk size")
    ax2.set_ylabel("cache hit rate")
    ax2.set_ylim(0, 1)
    ax2.set_title("caching")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def figure_path(fig_dir: str, name: str) -> str:
    os.makedirs(fig_dir, exist_ok=True)
    return os.path.join(fig_dir, name)
