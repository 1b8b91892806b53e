"""Deterministic static SVG figures."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_RC = {"svg.hashsalt": "cornerscatter", "svg.fonttype": "path"}


def _save(fig, path):
    with matplotlib.rc_context(_RC):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def sweep_svg(table, path) -> None:
    """Far-field norm against wavenumber on a log scale."""
    rows = table.ok_rows
    fig, ax = plt.subplots(figsize=(6, 4))
    if rows:
        ax.semilogy([r.k for r in rows], [r.farfield_l2 for r in rows], "o-", ms=3)
    ax.set_xlabel("k")
    ax.set_ylabel("far-field L2 norm")
    ax.grid(True, which="both", alpha=0.3)
    _save(fig, path)


def farfield_svg(ff, path) -> None:
    """Polar plot of ``|u_inf(theta)|``."""
    fig = plt.figure(figsize=(5, 5))
    ax = fig.add_subplot(projection="polar")
    theta = np.append(ff.theta, ff.theta[:1])
    ax.plot(theta, np.abs(np.append(ff.values, ff.values[:1])))
    ax.set_title("|u_inf|")
    _save(fig, path)
