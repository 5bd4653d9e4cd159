"""PNG figures next to CSV outputs (non-interactive Agg backend)."""

from __future__ import annotations

import io
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "figure.figsize": (6.0, 4.0),
    "figure.dpi": 120,
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "legend.frameon": False,
}


def png_path(csv_path) -> Path:
    return Path(csv_path).with_suffix(".png")


def render(x, series, xlabel, ylabel, title="", logx=False, logy=False, steps=None) -> bytes:
    """Line plot of ``series`` (label -> y) against x, returned as PNG bytes.

    ``steps`` optionally draws a histogram given as (edges, heights) underneath.
    """
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        if steps is not None:
            edges, heights = steps
            ax.stairs(heights, edges, color="0.6", fill=True, alpha=0.5, label="simulation")
        for label, y in series.items():
            ax.plot(x, y, lw=1.4, label=label)
        if logx:
            ax.set_xscale("log")
        if logy:
            ax.set_yscale("log")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        if steps is not None or len(series) > 1:
            ax.legend()
        fig.tight_layout()
        buf = io.BytesIO()
        fig.savefig(buf, format="png", metadata={"Software": None})
        plt.close(fig)
    return buf.getvalue()
