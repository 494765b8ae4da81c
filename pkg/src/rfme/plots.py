"""Headless figure rendering for the report path.

Every figure is also exported as CSV by the pipeline; the PNGs exist so
a run is inspectable without loading the data anywhere.
"""

from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .clustering import ElbowCurve  # noqa: E402

_SEGMENT_COLORS = {
    "HighValue": "tab:green",
    "Promising": "tab:blue",
    "NeedsAttention": "tab:orange",
    "NeedsActivation": "tab:red",
}
_FALLBACK_CYCLE = ("tab:purple", "tab:brown", "tab:pink", "tab:gray", "tab:olive", "tab:cyan")


def _color_map(names: Sequence[str]) -> dict[str, str]:
    mapping = {}
    cycle = iter(_FALLBACK_CYCLE * 4)
    for name in sorted(set(names)):
        mapping[name] = _SEGMENT_COLORS.get(name) or next(cycle)
    return mapping


def render_elbow(curve: ElbowCurve, path) -> None:
    ks = [k for k, _ in curve.points]
    ws = [w for _, w in curve.points]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ks, ws, marker="o", color="tab:blue")
    ax.axvline(curve.selected_k, color="tab:red", linestyle="--", linewidth=1,
               label=f"selected k = {curve.selected_k}")
    ax.set_xlabel("k")
    ax.set_ylabel("WCSS")
    ax.set_title("Elbow curve")
    ax.set_xticks(ks)
    ax.legend()
    fig.savefig(path, dpi=150, bbox_inches="tight", metadata={"Software": None})
    plt.close(fig)


def render_scatter(
    rows: Sequence[tuple[float, float, str]],
    xlabel: str,
    ylabel: str,
    title: str,
    path,
    max_points: int = 20000,
) -> None:
    """Scatter of (x, y, segment) rows, one color per segment. Rows past
    max_points are dropped with a fixed stride to keep files small."""
    if len(rows) > max_points:
        stride = -(-len(rows) // max_points)
        rows = rows[::stride]
    colors = _color_map([seg for _, _, seg in rows])
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for name, color in colors.items():
        xs = [x for x, _, seg in rows if seg == name]
        ys = [y for _, y, seg in rows if seg == name]
        ax.scatter(xs, ys, s=8, alpha=0.5, label=name, color=color, linewidths=0)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.legend(markerscale=2)
    fig.savefig(path, dpi=150, bbox_inches="tight", metadata={"Software": None})
    plt.close(fig)
