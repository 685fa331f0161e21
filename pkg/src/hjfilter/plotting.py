"""Figures written next to the CSV output when ``--plot`` is given.

Uses the non-interactive Agg backend, so nothing here needs a display.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Iterable, Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .analysis import ErrorReport  # noqa: E402

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _figure(width: float = 6.0, ncols: int = 1):
    fig, ax = plt.subplots(1, ncols, figsize=(width * ncols, width * GOLDEN))
    return fig, ax


def _save(fig, path: Path) -> Path:
    # no software/version stamp, so reruns give identical files
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
    return path


def plot_solution(x: np.ndarray, u: np.ndarray, reference: np.ndarray, path: Path,
                  title: str = "", y: Optional[np.ndarray] = None) -> Path:
    """Numerical solution against the reference. 2D data is drawn as the
    solution surface and the pointwise error side by side."""
    if y is None:
        fig, ax = _figure()
        if np.all(np.isfinite(reference)):
            ax.plot(x, reference, "k-", lw=1.0, label="reference")
        ax.plot(x, u, "o", ms=3, mfc="none", label="numerical")
        ax.set_xlabel("x")
        ax.set_ylabel("u")
        ax.legend(frameon=False)
    else:
        fig, (left, right) = _figure(ncols=2)
        extent = (y[0], y[-1], x[0], x[-1])
        im = left.imshow(u, origin="lower", extent=extent, aspect="auto")
        fig.colorbar(im, ax=left)
        left.set_title("u")
        im = right.imshow(np.abs(u - reference), origin="lower", extent=extent, aspect="auto")
        fig.colorbar(im, ax=right)
        right.set_title("|u - reference|")
        for ax in (left, right):
            ax.set_xlabel("y")
            ax.set_ylabel("x")
        ax = left
    if title:
        fig.suptitle(title)
    return _save(fig, path)


def plot_activity(x: np.ndarray, activity: np.ndarray, times: np.ndarray, path: Path,
                  title: str = "") -> Path:
    """Space-time map of the nodes where the monotone update was taken."""
    fig, ax = _figure()
    mono = 1 - np.asarray(activity)
    ax.pcolormesh(x, times, mono, cmap="Greys", shading="nearest", vmin=0, vmax=1)
    ax.set_xlabel("x")
    ax.set_ylabel("t")
    ax.set_title(title or "monotone update active (dark)")
    return _save(fig, path)


def plot_convergence(reports: Iterable[ErrorReport], path: Path, title: str = "") -> Path:
    fig, (a_inf, a_one) = _figure(ncols=2)
    for rep in reports:
        n = [r.n_x for r in rep.rows]
        a_inf.loglog(n, [r.linf for r in rep.rows], "o-", label=rep.scheme)
        a_one.loglog(n, [r.l1 for r in rep.rows], "o-", label=rep.scheme)
    for ax, name in ((a_inf, "L-infinity error"), (a_one, "L1 error")):
        ax.set_xlabel("N_x")
        ax.set_ylabel(name)
        ax.legend(frameon=False, fontsize=8)
    if title:
        fig.suptitle(title)
    return _save(fig, path)
