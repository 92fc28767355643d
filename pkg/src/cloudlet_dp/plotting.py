"""Figures written next to the CSV reports."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

POLICY_COLORS = {"demccm": "#1b7837", "direct": "#b2182b"}
STATE_COLORS = {
    "searching": "#d6604d",
    "idle": "#bababa",
    "transmitting": "#4393c3",
    "receiving": "#92c5de",
    "computing": "#f4a582",
}


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)


def plot_frontier(rows, path, title="Pareto frontier by time budget"):
    """Energy against performance, one marker series per budget ``t``."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    budgets = sorted({r.t for r in rows})
    cmap = plt.get_cmap("viridis")
    for i, t in enumerate(budgets):
        pts = sorted((r.perf, r.energy) for r in rows if r.t == t)
        color = cmap(i / max(1, len(budgets) - 1))
        ax.step([p for p, _ in pts], [e for _, e in pts], where="post", color=color, lw=0.8, alpha=0.6)
        ax.scatter([p for p, _ in pts], [e for _, e in pts], s=12, color=color,
                   label=f"t={t}" if i in (0, len(budgets) - 1) else None)
    ax.set_xlabel("route performance (completion probability)")
    ax.set_ylabel("route energy")
    ax.set_title(title)
    if budgets:
        ax.legend(frameon=False, fontsize=8)
    _finish(fig, path)


def plot_comparison(metrics, path):
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.8))
    for policy in ("demccm", "direct"):
        ms = [m for m in metrics if m.policy == policy]
        if not ms:
            continue
        seeds = [m.seed for m in ms]
        ax1.plot(seeds, [m.total_energy for m in ms], "o-", ms=3, color=POLICY_COLORS[policy], label=policy)
        ax1.plot(seeds, [m.total_search_energy for m in ms], "--", lw=0.8, color=POLICY_COLORS[policy],
                 label=f"{policy} (searching)")
    ax1.set_xlabel("seed")
    ax1.set_ylabel("total device energy")
    ax1.legend(frameon=False, fontsize=8)

    data, labels = [], []
    for policy in ("demccm", "direct"):
        lat = [lat for m in metrics if m.policy == policy for _, lat in m.latencies]
        if lat:
            data.append(lat)
            labels.append(policy)
    if data:
        ax2.boxplot(data, showfliers=False)
        ax2.set_xticks(np.arange(1, len(labels) + 1), labels)
    ax2.set_ylabel("request latency (ticks)")
    fig.suptitle("Simulated policy comparison (model property)", fontsize=10)
    _finish(fig, path)


def plot_energy_breakdown(trace, path):
    """Stacked per-device energy by radio state, from the trace's energy segments."""
    devices: list[str] = []
    totals: dict[tuple[str, str], float] = {}
    for rec in trace:
        if rec["type"] != "energy":
            continue
        d = rec["device"]
        if d not in devices:
            devices.append(d)
        totals[(d, rec["state"])] = totals.get((d, rec["state"]), 0.0) + rec["energy"]
    fig, ax = plt.subplots(figsize=(6.4, 3.8))
    bottom = np.zeros(len(devices))
    for state, color in STATE_COLORS.items():
        vals = np.array([totals.get((d, state), 0.0) for d in devices])
        if vals.any():
            ax.bar(devices, vals, bottom=bottom, color=color, label=state)
            bottom += vals
    ax.set_ylabel("device energy")
    if devices:
        ax.legend(frameon=False, fontsize=8)
    _finish(fig, path)
