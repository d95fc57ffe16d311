"""Figure rendering for sweep and reference-comparison reports.

Uses the Agg backend so report runs work headless; every figure lands next
to its CSV as a PNG.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .golden import FIG3_SERIES, FIG4_SERIES, FIG5_SERIES, GoldenReport

_STYLE = {
    "figure.figsize": (6.0, 4.2),
    "figure.dpi": 130,
    "axes.grid": True,
    "grid.alpha": 0.35,
    "grid.linestyle": "--",
    "lines.linewidth": 1.4,
    "legend.fontsize": 8,
    "axes.labelsize": 10,
}

_FIGURE_AXES = {
    3: ("simultaneously served users M", "coverage probability"),
    4: ("number of satellites N_S", "coverage probability"),
    5: ("number of satellites N_S", "data rate [Mbps]"),
}


def render_sweep(rows, spec, path: str):
    """One panel per requested output, computed curves per engine."""
    with plt.rc_context(_STYLE):
        n = len(spec.outputs)
        fig, axes = plt.subplots(1, n, figsize=(4.2 * n, 3.6), squeeze=False)
        for ax, name in zip(axes[0], spec.outputs):
            for engine in spec.engines:
                xs, ys, es = [], [], []
                for row in rows:
                    if row.engine != engine or name not in row.outputs:
                        continue
                    xs.append(row.value)
                    ys.append(row.outputs[name][0])
                    es.append(row.outputs[name][1])
                if not xs:
                    continue
                if engine == "montecarlo":
                    ax.errorbar(xs, ys, yerr=es, fmt="x", ms=4, capsize=2, label="monte carlo")
                else:
                    ax.plot(xs, ys, "-", label="analytic")
            ax.set_xlabel(spec.parameter)
            ax.set_ylabel(name)
            ax.legend()
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)


def render_golden(report: GoldenReport, path: str):
    """Computed points against the bundled reference series."""
    series_names = {
        3: list(FIG3_SERIES),
        4: list(FIG4_SERIES),
        5: list(FIG5_SERIES),
    }[report.figure]
    xlabel, ylabel = _FIGURE_AXES[report.figure]
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
        for name, color in zip(series_names, colors):
            pts = [p for p in report.points if p.point.series == name]
            xs = [p.point.x for p in pts]
            ax.plot(xs, [p.point.expected for p in pts], "-", color=color,
                    alpha=0.8, label=f"{name} (reference)")
            ax.plot(xs, [p.computed for p in pts], "x", ms=4, color=color,
                    label=f"{name} (computed)")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        title = f"figure {report.figure} reproduction"
        if report.calibration:
            title += f" ({report.calibration} = {report.fitted_value:.4g})"
        ax.set_title(title, fontsize=10)
        ax.legend()
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
