"""Figures for run reports, written to image files."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def degree_distribution_figure(degrees: np.ndarray, path: str | Path, *, gamma: float | None = None,
                               gamma_hat: float | None = None, d_min: float | None = None) -> Path:
    """Complementary CDF of the degree sequence on log-log axes."""
    path = Path(path)
    d = np.sort(np.asarray(degrees))
    d = d[d > 0]
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    if len(d):
        ccdf = 1.0 - np.arange(len(d)) / len(d)
        ax.loglog(d, ccdf, ".", ms=2, label="observed")
        if gamma is not None and d_min is not None:
            x = np.geomspace(d_min, d[-1], 50)
            p_tail = (d >= d_min).mean()
            ax.loglog(x, p_tail * (x / d_min) ** (1.0 - gamma), "--", label=f"slope of gamma={gamma:g}")
    ax.set_xlabel("degree")
    ax.set_ylabel("P(D >= d)")
    title = "degree distribution"
    if gamma_hat is not None and np.isfinite(gamma_hat):
        title += f" (fitted gamma {gamma_hat:.3f})"
    ax.set_title(title)
    ax.legend(loc="lower left")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def annulus_work_figure(per_annulus: list[dict], path: str | Path) -> Path:
    """Distance computations per edge for every streaming annulus."""
    path = Path(path)
    rows = [r for r in per_annulus if r.get("overestimation_ratio") not in ("", None)]
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    if rows:
        idx = [r["annulus"] for r in rows]
        ax.bar(idx, [r["overestimation_ratio"] for r in rows], color="tab:blue")
    ax.axhline(np.sqrt(np.e), color="tab:red", ls="--", lw=1, label="sqrt(e)")
    ax.set_xlabel("annulus")
    ax.set_ylabel("distance computations / edge")
    ax.set_title("candidate overestimation per annulus")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def throughput_figure(rows: list[dict], path: str | Path) -> Path:
    """Edges per second against average degree, one line per exponent."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    for gamma in sorted({r["gamma"] for r in rows}):
        sel = sorted((r for r in rows if r["gamma"] == gamma), key=lambda r: r["avg_degree"])
        ax.plot([r["avg_degree"] for r in sel], [r["edges_per_sec"] for r in sel], "o-", label=f"gamma={gamma:g}")
    ax.set_xscale("log", base=2)
    ax.set_xlabel("target average degree")
    ax.set_ylabel("edges / second")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
