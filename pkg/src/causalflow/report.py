"""Figure rendering for the report path.

Small, dependency-light matplotlib helpers: inferred graphs as circular node
diagrams, rate tables as grouped bars, horizon sweeps as line plots.  Figures
are written to files next to the delimited output, never shown interactively.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .model import CausalGraph  # noqa: E402


def _node_positions(nodes):
    count = len(nodes)
    pos = {}
    for i, node in enumerate(nodes):
        angle = math.pi / 2 - 2 * math.pi * i / count
        pos[node] = (math.cos(angle), math.sin(angle))
    return pos


def _draw_graph(ax, graph: CausalGraph, title: str) -> None:
    pos = _node_positions(graph.nodes)
    for node, (x, y) in pos.items():
        ax.add_patch(plt.Circle((x, y), 0.14, color="#dbe9f6", ec="#2b5d8a", zorder=3))
        ax.text(x, y, node, ha="center", va="center", zorder=4, fontsize=11)
    for src, dst, w in graph.dynamic_edges:
        x0, y0 = pos[src]
        x1, y1 = pos[dst]
        ax.annotate("", xy=(x1, y1), xytext=(x0, y0),
                    arrowprops=dict(arrowstyle="-|>", color="#2b5d8a", lw=1.6,
                                    shrinkA=16, shrinkB=16,
                                    connectionstyle="arc3,rad=0.12"))
        ax.text((x0 + x1) / 2, (y0 + y1) / 2, f"{w:.3g}", fontsize=8,
                color="#2b5d8a", ha="center")
    for a, b, w in graph.instantaneous_edges:
        x0, y0 = pos[a]
        x1, y1 = pos[b]
        ax.annotate("", xy=(x1, y1), xytext=(x0, y0),
                    arrowprops=dict(arrowstyle="-", color="#b0612f", lw=1.4,
                                    linestyle="--", shrinkA=16, shrinkB=16))
    ax.set_title(title)
    ax.set_xlim(-1.45, 1.45)
    ax.set_ylim(-1.45, 1.45)
    ax.set_aspect("equal")
    ax.axis("off")


def render_graph_figure(graphs: "dict[str, CausalGraph]", path) -> None:
    fig, axes = plt.subplots(1, len(graphs), figsize=(4.2 * len(graphs), 4.2))
    if len(graphs) == 1:
        axes = [axes]
    for ax, (title, graph) in zip(axes, graphs.items()):
        _draw_graph(ax, graph, title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_rate_bars(rows: "list[dict]", path) -> None:
    """Grouped bars of the pairwise rates; one group per ordered pair."""
    labels = [f"{r['source']}->{r['target']}" for r in rows]
    series = [("di_rate", "#2b5d8a"), ("te_rate", "#4d8a5f"), ("iie_rate", "#b0612f")]
    width = 0.26
    fig, ax = plt.subplots(figsize=(max(5.0, 1.1 * len(rows)), 3.6))
    for k, (key, color) in enumerate(series):
        xs = [i + (k - 1) * width for i in range(len(rows))]
        ax.bar(xs, [r[key] for r in rows], width=width, label=key, color=color)
    ax.set_xticks(range(len(rows)))
    ax.set_xticklabels(labels, rotation=30, ha="right")
    ax.set_ylabel("nats per step")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_horizon_curves(horizons, curves: "dict[str, list[float]]", path,
                          ylabel: str = "nats") -> None:
    fig, ax = plt.subplots(figsize=(5.4, 3.6))
    for label, values in curves.items():
        ax.plot(horizons, values, marker="o", ms=3.5, label=label)
    ax.set_xlabel("horizon")
    ax.set_ylabel(ylabel)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
