"""Figure rendering for the report paths.

Every plot is written to a file next to the delimited output; nothing is
ever shown interactively, so the Agg backend is forced before pyplot loads.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

_MARKERS = {2: "o", 3: "^", 4: "s", 5: "p"}
_COLORS = {2: "#2c3e86", 3: "#8c2d2d", 4: "#2d6e2d", 5: "#b26b1f"}


def render_fig1(rows, path) -> None:
    """Two panels of share versus agent count, one line per action count.

    `rows` are (panel, actions, agents, successes, replications) tuples as
    produced by montecarlo.fig1_suite.
    """
    panels = {"a": {}, "b": {}}
    for panel, actions, agents, successes, reps in rows:
        panels[panel].setdefault(actions, []).append((agents, 100.0 * successes / reps))

    fig, axes = plt.subplots(1, 2, figsize=(9.0, 3.6), sharey=True)
    titles = {"a": "pure Nash equilibrium",
              "b": "pure eps-equilibrium (eps = 0.05)"}
    for ax, panel in zip(axes, ("a", "b")):
        for actions in sorted(panels[panel]):
            pts = sorted(panels[panel][actions])
            ax.plot([p[0] for p in pts], [p[1] for p in pts],
                    marker=_MARKERS.get(actions, "."), markersize=4,
                    color=_COLORS.get(actions), linewidth=1.0,
                    label=f"{actions} actions")
        ax.set_xlabel("number of agents")
        ax.set_title(titles[panel], fontsize=10)
        ax.set_ylim(45, 105)
        ax.grid(axis="y", linestyle="--", alpha=0.5)
    axes[0].set_ylabel("percentage")
    axes[0].legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_convergence(rows, path) -> None:
    """Large-action convergence: k q(eps, k) scaled by k against the hazard
    prediction, log-scaled action axis.  `rows` are (k, lhs, rhs, ratio)."""
    ks = [r[0] for r in rows]
    lhs = [r[1] for r in rows]
    rhs = [r[2] for r in rows]
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    ax.semilogx(ks, lhs, marker="o", markersize=4, linewidth=1.0,
                label="k q(eps, k)")
    ax.semilogx(ks, rhs, marker="x", markersize=5, linewidth=1.0,
                linestyle="--", label="exp(eps h(x_k))")
    ax.set_xlabel("actions per agent k")
    ax.grid(linestyle="--", alpha=0.5)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
