"""Figures written next to the CSV reports.

Two views: the archive re-plotted in objective space for every scenario
(infeasible members as crosses), and the (I_RS, I_RL) robustness plane with
the robust-Pareto subset highlighted.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.ticker import MaxNLocator  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 9,
    "legend.fontsize": 7,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "savefig.dpi": 120,
    "figure.dpi": 120,
}

# no timestamps or version strings in the files
_PNG_METADATA = {"Software": None}

ANNOTATE_MAX = 25


@contextmanager
def report_style():
    with plt.rc_context(STYLE):
        yield


def _grid(n: int) -> tuple[int, int]:
    cols = min(n, 3)
    return int(math.ceil(n / cols)), cols


def _save(fig, path: Path) -> Path:
    fig.savefig(path, format="png", metadata=_PNG_METADATA)
    plt.close(fig)
    return path


def plot_scenario_fronts(path, objective_names: Sequence[str], scenario_labels: Sequence[str],
                         F_per_scenario: Sequence[np.ndarray], feasible: np.ndarray,
                         ranks: np.ndarray) -> Path:
    """One panel per scenario: the archive in objective space.

    ``feasible`` and ``ranks`` are (k, N) arrays; rank 0 marks a failed model.
    """
    path = Path(path)
    n_sc = len(F_per_scenario)
    rows, cols = _grid(n_sc)
    with report_style():
        fig, axes = plt.subplots(rows, cols, figsize=(3.2 * cols, 2.7 * rows), squeeze=False)
        for j, ax in enumerate(axes.flat):
            if j >= n_sc:
                ax.set_visible(False)
                continue
            F = np.asarray(F_per_scenario[j])
            feas = feasible[:, j]
            top = feas & (ranks[:, j] == 1)
            rest = feas & (ranks[:, j] > 1)
            bad = ~feas & (ranks[:, j] > 0)
            ax.scatter(F[rest, 0], F[rest, 1], s=10, c="0.55", label="dominated")
            ax.scatter(F[top, 0], F[top, 1], s=12, c="tab:blue", label="rank 1")
            ax.scatter(F[bad, 0], F[bad, 1], s=14, c="tab:red", marker="x", label="infeasible")
            ax.xaxis.set_major_locator(MaxNLocator(5))
            ax.set_title(scenario_labels[j])
            ax.set_xlabel(objective_names[0])
            ax.set_ylabel(objective_names[1])
        axes.flat[0].legend(loc="best")
        fig.tight_layout()
        return _save(fig, path)


def plot_rf_space(path, ids: Sequence, i_rs: Sequence[float], i_rl: Sequence[float], robust: set) -> Path:
    path = Path(path)
    i_rs = np.asarray(i_rs, dtype=float)
    i_rl = np.asarray(i_rl, dtype=float)
    mask = np.array([i in robust for i in ids], dtype=bool)
    with report_style():
        fig, ax = plt.subplots(figsize=(4.2, 3.4))
        ax.scatter(i_rs[~mask], i_rl[~mask], s=14, c="0.55", label="alternative solutions")
        order = np.argsort(i_rs[mask])
        ax.plot(i_rs[mask][order], i_rl[mask][order], "o-", ms=5, c="tab:orange", lw=1,
                label="robust-Pareto subset")
        if len(ids) <= ANNOTATE_MAX:
            for sid, x, y in zip(ids, i_rs, i_rl):
                if np.isfinite(x) and np.isfinite(y):
                    ax.annotate(str(sid), (x, y), textcoords="offset points", xytext=(4, 3), fontsize=7)
        ax.set_xlabel("$I_{RS}$")
        ax.set_ylabel("$I_{RL}$")
        ax.set_ylim(-0.05, 1.05)
        ax.legend(loc="best")
        fig.tight_layout()
        return _save(fig, path)
