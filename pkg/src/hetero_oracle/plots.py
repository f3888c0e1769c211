"""Figure rendering for the report path.

Figures are written next to the delimited output with a fixed size, dpi,
and stripped metadata, so reruns with the same config and seed are
byte-identical.  The Agg backend is forced before pyplot loads; nothing
here ever opens a window.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_SAVE_KW = {"dpi": 150, "metadata": {"Software": None}}


def _finalize(fig, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
    return path


def save_fit_figure(path, x, s_true, s_hat, design_x=None, design_y=None, title=""):
    """Truth vs adaptive estimate, with the observed sample overlaid."""
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    if design_x is not None:
        ax.plot(design_x, design_y, ".", ms=3, color="0.6", alpha=0.6, label="observations")
    ax.plot(x, s_true, lw=1.6, color="tab:blue", label="truth")
    ax.plot(x, s_hat, lw=1.4, color="tab:red", ls="--", label="adaptive estimate")
    ax.set_xlabel("x")
    ax.set_ylabel("value")
    ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return _finalize(fig, path)


def save_risk_figure(path, n_values, lhs, rhs, oracle, title=""):
    """Adaptive risk against the certified envelope across sample sizes."""
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    ax.plot(n_values, lhs, "o-", color="tab:red", label="adaptive risk")
    ax.plot(n_values, oracle, "s-", color="tab:blue", label="oracle risk")
    ax.plot(n_values, rhs, "^--", color="0.4", label="envelope")
    ax.set_xlabel("n")
    ax.set_ylabel("mean squared error")
    ax.set_yscale("log")
    ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return _finalize(fig, path)


def save_margin_figure(path, labels, margins, title=""):
    """Bar chart of inequality margins (bound minus attained value)."""
    fig, ax = plt.subplots(figsize=(7.0, 0.5 + 0.35 * max(6, len(labels))))
    pos = np.arange(len(labels))
    colors = ["tab:green" if m >= 0 else "tab:red" for m in margins]
    ax.barh(pos, margins, color=colors)
    ax.set_yticks(pos)
    ax.set_yticklabels(labels, fontsize=7)
    ax.axvline(0.0, color="k", lw=0.8)
    ax.set_xlabel("margin (bound - value)")
    ax.set_title(title)
    fig.tight_layout()
    return _finalize(fig, path)


def save_ratio_figure(path, n_values, base_ratio, sobolev_ratio, delta, title=""):
    """Remainder growth normalized by n^delta along the sample-size sweep."""
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    ax.plot(n_values, base_ratio, "o-", label="base remainder / n^delta")
    ax.plot(n_values, sobolev_ratio, "s--", label="smoothness remainder / n^delta")
    ax.set_xlabel("n")
    ax.set_ylabel(f"remainder / n^{delta:g}")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return _finalize(fig, path)


def save_weights_figure(path, family, title=""):
    """Weight profiles of every family member on the coefficient index."""
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    mat = family.matrix
    support = int(max(np.flatnonzero(np.any(mat != 0.0, axis=0)), default=0)) + 2
    idx = np.arange(1, min(support + 5, mat.shape[1]) + 1)
    for row in mat:
        ax.plot(idx, row[: idx.size], lw=0.8, alpha=0.6)
    ax.set_xlabel("coefficient index")
    ax.set_ylabel("weight")
    ax.set_ylim(-0.05, 1.05)
    ax.set_title(title)
    fig.tight_layout()
    return _finalize(fig, path)
