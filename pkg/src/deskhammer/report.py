"""File reports for verification and probe runs: tab-delimited tables plus
rendered figures next to them.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from . import tptp
from .analysis import ProbeWarning
from .service import VerifyReport

STATUS_COLORS = {
    tptp.STATUS_THEOREM: "#2a7e43",
    tptp.STATUS_COUNTERSAT: "#b26a00",
    tptp.STATUS_TIMEOUT: "#aa3333",
    tptp.STATUS_RESOURCEOUT: "#aa3333",
    tptp.STATUS_GAVEUP: "#888888",
    tptp.STATUS_ERROR: "#6a1b9a",
}


def write_verify_report(report: VerifyReport, outdir: str | Path) -> dict[str, Path]:
    """Write verify_<article>.tsv and a per-inference timing figure."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    tsv_path = outdir / f"verify_{report.article}.tsv"
    with open(tsv_path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, delimiter="\t")
        writer.writerow(["label", "status", "elapsed_ms", "used", "by_clause"])
        for r in report.rows:
            writer.writerow(
                [r.label, r.status, f"{r.elapsed_ms:.1f}", " ".join(r.used), r.by_clause]
            )
        for label in report.assumed:
            writer.writerow([label, "Assumed", "", "", ""])
        for label in report.unjustified:
            writer.writerow([label, "Unjustified", "", "", ""])

    fig_path = outdir / f"verify_{report.article}.png"
    _verify_figure(report, fig_path)
    return {"tsv": tsv_path, "figure": fig_path}


def _verify_figure(report: VerifyReport, path: Path) -> None:
    rows = list(report.rows)
    height = max(2.0, 0.28 * len(rows) + 1.2)
    fig, ax = plt.subplots(figsize=(8, height))
    if rows:
        labels = [r.label for r in rows]
        times = [max(r.elapsed_ms, 0.1) for r in rows]
        colors = [STATUS_COLORS.get(r.status, "#555555") for r in rows]
        y = range(len(rows))
        ax.barh(y, times, color=colors)
        ax.set_yticks(list(y))
        ax.set_yticklabels(labels, fontsize=7)
        ax.invert_yaxis()
        ax.set_xscale("log")
        ax.set_xlabel("solve time (ms, log scale)")
    solved = sum(1 for r in rows if r.status == tptp.STATUS_THEOREM)
    ax.set_title(
        f"{report.article}: {solved}/{len(rows)} inferences closed"
        f" in {report.elapsed_ms / 1000:.1f}s"
    )
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_probe_report(article: str, warnings: Sequence[ProbeWarning],
                       outdir: str | Path) -> dict[str, Path]:
    """Write probe_<article>.tsv and a one-panel status figure."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    tsv_path = outdir / f"probe_{article}.tsv"
    with open(tsv_path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, delimiter="\t")
        writer.writerow(["article", "before_label", "used", "assumed_used"])
        for w in warnings:
            writer.writerow(
                [w.article, w.before_label, " ".join(w.used), " ".join(w.assumed_used)]
            )

    fig_path = outdir / f"probe_{article}.png"
    fig, ax = plt.subplots(figsize=(6, 2.2))
    ax.axis("off")
    if warnings:
        lines = [f"INCONSISTENT before {w.before_label}" for w in warnings]
        text = f"{article}: " + "; ".join(lines)
        color = "#aa3333"
    else:
        text = f"{article}: no contradiction found"
        color = "#2a7e43"
    ax.text(0.5, 0.5, text, ha="center", va="center", fontsize=11, color=color, wrap=True)
    fig.tight_layout()
    fig.savefig(fig_path, dpi=120)
    plt.close(fig)
    return {"tsv": tsv_path, "figure": fig_path}
