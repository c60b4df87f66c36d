"""Run reports: delimited output plus rendered figures.

Commands emit a versioned JSON report on stdout; this module adds the
tabular view (CSV) and matplotlib renderings written next to it, so a
scaling run leaves both machine-readable rows and pictures behind.
"""

from __future__ import annotations

import csv
import json
import os
import time
from typing import Optional

REPORT_VERSION = 1


def run_report(command: str, seed, metrics: dict, started: float) -> dict:
    return {
        "version": REPORT_VERSION,
        "command": command,
        "seed": seed,
        "wall_ms": round(1000 * (time.time() - started), 3),
        "metrics": metrics,
    }


def write_csv(rows: list[dict], path: str) -> None:
    if not rows:
        raise ValueError("no rows to write")
    fields: list[str] = []
    for row in rows:
        for key in row:
            if key not in fields:
                fields.append(key)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_adversary_figure(rows: list[dict], path: str) -> None:
    """ChooseAny counts by board size, one line per strategy."""
    plt = _pyplot()
    by_alice: dict[str, dict[int, list[int]]] = {}
    for row in rows:
        by_alice.setdefault(row["alice"], {}).setdefault(int(row["n"]), []).append(
            int(row["t"])
        )
    fig, ax = plt.subplots(figsize=(6, 4))
    for alice in sorted(by_alice):
        ns = sorted(by_alice[alice])
        mins = [min(by_alice[alice][n]) for n in ns]
        ax.plot(ns, mins, marker="o", label=f"{alice} (min t)")
    ax.set_xlabel("board side n")
    ax.set_ylabel("ChooseAny answers before the game ends")
    ax.set_title("Adversary lower-bound behaviour")
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_dnc_figure(rows: list[dict], path: str) -> None:
    """Conflict-search query counts against the linear budget."""
    plt = _pyplot()
    by_n: dict[int, list[int]] = {}
    for row in rows:
        by_n.setdefault(int(row["n"]), []).append(int(row["queries"]))
    ns = sorted(by_n)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ns, [max(by_n[n]) for n in ns], marker="o", label="max queries")
    ax.plot(ns, [sum(by_n[n]) / len(by_n[n]) for n in ns], marker=".", label="mean")
    ax.plot(ns, [6 * n for n in ns], linestyle="--", label="6n budget")
    ax.set_xscale("log", base=2)
    ax.set_yscale("log", base=2)
    ax.set_xlabel("board side n")
    ax.set_ylabel("oracle queries")
    ax.set_title("Divide-and-conquer conflict search")
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_solve_figure(rows: list[dict], path: str) -> None:
    """Tree size by instance for solver runs."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    labels = [str(row.get("label", i)) for i, row in enumerate(rows)]
    leaves = [int(row["leaves"]) for row in rows]
    ax.bar(labels, leaves)
    ax.set_ylabel("search tree leaves")
    ax.set_yscale("log", base=2)
    ax.set_title("DPLL contradiction search trees")
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def emit(report: dict, rows: Optional[list[dict]] = None, csv_path: Optional[str] = None,
         figures_dir: Optional[str] = None, figure_kind: Optional[str] = None,
         figure_name: Optional[str] = None) -> None:
    """Write the delimited and figure outputs a report was asked for."""
    if rows and csv_path:
        write_csv(rows, csv_path)
    if rows and figures_dir and figure_kind:
        os.makedirs(figures_dir, exist_ok=True)
        path = os.path.join(figures_dir, figure_name or f"{figure_kind}.png")
        if figure_kind == "adversary":
            render_adversary_figure(rows, path)
        elif figure_kind == "dnc":
            render_dnc_figure(rows, path)
        elif figure_kind == "solve":
            render_solve_figure(rows, path)
    print(json.dumps(report, sort_keys=True))
