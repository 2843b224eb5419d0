"""Render grid reports as per-scenario figures (PNG files).

Each scenario gets one figure with two panels: stacked per-link message
counts on the left, stacked phase durations on the right.  Rendering is
file-based only (headless backend); the data behind the panels is also
available as CSV via :func:`leoran.metrics.plot_data_csv`.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .metrics import LINK_KINDS, MetricsReport

_LINK_COLORS = {"SL": "#4c72b0", "FL": "#dd8452", "ISL": "#55a868", "IGSL": "#c44e52"}
_PHASE_COLORS = {"setup": "#8172b3", "buffer": "#ccb974", "execution": "#64b5cd"}


def _cell_label(cell) -> str:
    split = {"LLS": "LLS", "CU_DU": "CU-DU", "GNB": "gNB"}[cell.split]
    return f"{cell.variant}\n{split}"


def render_scenario_figure(report: MetricsReport, scenario: str, path: Path) -> Path:
    """Write one scenario's two-panel figure to ``path``."""
    cells = [c for c in report.cells if c.scenario == scenario]
    if not cells:
        raise ValueError(f"report has no cells for scenario {scenario!r}")
    labels = [_cell_label(c) for c in cells]
    x = range(len(cells))

    fig, (ax_counts, ax_durations) = plt.subplots(1, 2, figsize=(9.0, 3.6))

    bottom = [0.0] * len(cells)
    for kind in LINK_KINDS:
        values = [c.counts[kind] for c in cells]
        ax_counts.bar(x, values, bottom=bottom, label=kind,
                      color=_LINK_COLORS[kind], width=0.6)
        bottom = [b + v for b, v in zip(bottom, values)]
    ax_counts.set_xticks(list(x), labels)
    ax_counts.set_ylabel("messages per link")
    ax_counts.set_title(f"Scenario {scenario}: control traffic")
    ax_counts.legend(fontsize=8)

    bottom = [0.0] * len(cells)
    for phase in ("setup", "buffer", "execution"):
        values = [getattr(c, f"{phase}_ms") for c in cells]
        ax_durations.bar(x, values, bottom=bottom, label=phase,
                         color=_PHASE_COLORS[phase], width=0.6)
        bottom = [b + v for b, v in zip(bottom, values)]
    ax_durations.set_xticks(list(x), labels)
    ax_durations.set_ylabel("duration [ms]")
    ax_durations.set_title(f"Scenario {scenario}: procedure timeline")
    ax_durations.legend(fontsize=8)

    fig.tight_layout()
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_report_figures(report: MetricsReport, out_dir: Path,
                          prefix: str = "cho") -> list[Path]:
    """Render every scenario present in the report; returns written paths."""
    out_dir = Path(out_dir)
    scenarios = []
    for c in report.cells:
        if c.scenario not in scenarios:
            scenarios.append(c.scenario)
    return [render_scenario_figure(report, s, out_dir / f"{prefix}_scenario_{s}.png")
            for s in scenarios]
