"""Matplotlib renderers for the report-producing commands.

Figures are written next to the delimited output.  Rendering is deterministic:
the Agg backend, a fixed style, a fixed dpi, and fixed PNG metadata, so that
re-running a command reproduces the image bytes exactly.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_STYLE = {
    "figure.figsize": (6.4, 4.0),
    "figure.dpi": 110,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 10,
    "axes.titlesize": 11,
    "legend.fontsize": 9,
    "savefig.dpi": 110,
}

_PNG_METADATA = {"Software": "qgainlab"}


def _save(fig, path: str | Path) -> None:
    fig.savefig(Path(path), format="png", metadata=_PNG_METADATA)
    plt.close(fig)


def flatness_figure(report, path: str | Path) -> None:
    """Information gain across the probability grid, with the spread annotated."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        m = report.grid.shape[1]
        if m == 2:
            ax.plot(report.grid[:, 0], report.gains, "o-", label="measured gain")
            ax.set_xlabel("true P1")
        else:
            ax.plot(np.arange(len(report.gains)), report.gains, "o-", label="measured gain")
            ax.set_xlabel("grid point index")
        ax.axhline(report.fitted_constant, color="k", lw=0.8, ls="--", label="mean")
        ax.set_ylabel("information gain (nats)")
        ax.set_title(
            f"{report.prior_kind} prior, n={report.n}: spread {report.spread:.4f} nats"
        )
        ax.legend()
        _save(fig, path)


def malus_figure(lams: np.ndarray, values: np.ndarray, a: float, b: float, path: str | Path) -> None:
    """Integrated probability law against the closed cosine-squared form."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        analytic = np.cos(a * lams + b) ** 2
        ax.plot(lams, values, lw=1.5, label="integrated")
        ax.plot(lams, analytic, "k--", lw=1.0, label="cos^2(a x + b)")
        ax.set_xlabel("parameter")
        ax.set_ylabel("P1")
        ax.set_title(f"probability law, a={a:g}, b={b:g}; max gap {np.max(np.abs(values - analytic)):.2e}")
        ax.legend()
        _save(fig, path)


def runlog_figure(counts: np.ndarray, predicted: np.ndarray, path: str | Path) -> None:
    """Empirical outcome frequencies against the predicted distribution."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        idx = np.arange(counts.size)
        total = counts.sum()
        ax.bar(idx - 0.2, counts / total, width=0.4, label="empirical")
        ax.bar(idx + 0.2, predicted, width=0.4, label="predicted")
        ax.set_xlabel("outcome")
        ax.set_ylabel("frequency")
        ax.set_xticks(idx)
        ax.set_title(f"{int(total)} runs")
        ax.legend()
        _save(fig, path)


def inferred_state_figure(result, path: str | Path) -> None:
    """Reconstructed amplitudes and phases with the posterior width."""
    with plt.rc_context(_STYLE):
        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8.0, 4.0))
        state = result.map_state
        idx = np.arange(state.n)
        ax1.bar(idx, state.probs)
        ax1.set_xlabel("outcome")
        ax1.set_ylabel("probability")
        ax1.set_xticks(idx)
        ax1.set_title(f"amplitudes (width {result.sigma:.2e})")
        ax2.bar(idx, np.mod(state.phases, 2.0 * np.pi))
        ax2.set_xlabel("outcome")
        ax2.set_ylabel("phase mod 2 pi")
        ax2.set_xticks(idx)
        ax2.set_title("phases")
        fig.tight_layout()
        _save(fig, path)


def consistency_figure(ns: np.ndarray, distances: np.ndarray, path: str | Path) -> None:
    """Commuting-diagram statistic against the 1/sqrt(n) reference decay."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        ax.loglog(ns, distances, "o-", label="statistic")
        ref = distances[0] * np.sqrt(ns[0] / np.asarray(ns, dtype=float))
        ax.loglog(ns, ref, "k--", lw=1.0, label="1/sqrt(n) reference")
        ax.set_xlabel("runs")
        ax.set_ylabel("arc distance")
        ax.set_title("transform/inference consistency")
        ax.legend()
        _save(fig, path)
