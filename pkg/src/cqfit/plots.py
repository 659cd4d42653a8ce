"""Figure rendering for experiment reports.

Uses the Agg backend unconditionally; these figures go to files, never to
a screen.  One report maps to one figure: per-trial exact error against
the epsilon threshold, with the distinct-support count on a twin axis to
show that the error stays put while samples accumulate.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .pac import ExperimentReport

__all__ = ["render_report_figure"]


def render_report_figure(report: ExperimentReport, path: str, dpi: int = 150) -> None:
    """Write the report's summary figure to ``path`` (format by extension)."""
    trials = [r.trial for r in report.records]
    errors = [float(r.error) for r in report.records]
    seen = [r.seen_support for r in report.records]
    fig, ax = plt.subplots(figsize=(8, 4.5))
    try:
        ax.plot(trials, errors, "o", markersize=4, color="#1f77b4", label="exact error")
        ax.axhline(
            float(report.epsilon),
            color="#d62728",
            linestyle="--",
            linewidth=1,
            label=f"epsilon = {report.epsilon}",
        )
        ax.set_xlabel("trial")
        ax.set_ylabel("exact error")
        ax.set_ylim(-0.05, 1.05)
        ax2 = ax.twinx()
        ax2.plot(trials, seen, "s", markersize=3, color="#7f7f7f", alpha=0.6)
        ax2.set_ylabel("distinct support points seen", color="#7f7f7f")
        title = f"{report.scenario} (n={report.n}, m={report.m}, fitter {report.fitter})"
        if report.base:
            title = f"{report.scenario} on {report.base} (n={report.n}, m={report.m})"
        ax.set_title(title)
        ax.legend(loc="center right", fontsize=8)
        fig.tight_layout()
        fig.savefig(path, dpi=dpi)
    finally:
        plt.close(fig)
