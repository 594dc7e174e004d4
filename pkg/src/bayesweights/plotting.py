"""Figure rendering for the report paths.

Each CSV artifact has a companion PNG so results can be eyeballed without an
external plotting step. Rendering is headless (Agg) and byte-deterministic:
a fixed Software tag replaces the version-dependent default metadata.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

_PNG_METADATA = {"Software": "bayesweights"}
_FREQ_COLOR = "tab:green"
_BAYES_COLOR = "tab:red"
_SERIES_COLORS = {"freq": _FREQ_COLOR, "bayes": _BAYES_COLOR}
_SERIES_NAMES = {"freq": "frequentist", "bayes": "bayesian"}


def _save(fig, path) -> None:
    fig.savefig(path, dpi=120, metadata=_PNG_METADATA)
    plt.close(fig)


def save_gain_curve_plot(result, path) -> None:
    """Relative gain in efficiency versus sample size (simulation sweep)."""
    sizes = [s.sample_size for s in result.per_size]
    gains = [s.mean_gain for s in result.per_size]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(sizes, gains, marker="o", color="tab:blue")
    ax.set_xlabel("sample size")
    ax.set_ylabel("relative gain in efficiency")
    ax.set_title("Empirical gain of Bayesian over frequentist weights")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    _save(fig, path)


def save_report_gains_plot(reports, path) -> None:
    """Plug-in aggregate gain per comparison row versus sample size."""
    rows = sorted(reports, key=lambda r: r.counts.total)
    sizes = [r.counts.total for r in rows]
    gains = [r.gain_aggregate for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(sizes, gains, marker="s", linestyle="--", color="tab:purple")
    ax.set_xlabel("sample size")
    ax.set_ylabel("gain in efficiency")
    ax.set_title("Plug-in gain in efficiency vs sample size")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    _save(fig, path)


def save_generation_trace_plot(traces: dict, path, slot_label: str | None = None) -> None:
    """Best fitness per generation (first run) for each weighting."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, trace in traces.items():
        y = trace.runs[0].best_per_generation
        ax.plot(range(1, len(y) + 1), y,
                label=_SERIES_NAMES.get(label, label),
                color=_SERIES_COLORS.get(label))
    ax.set_xlabel("generation")
    ax.set_ylabel("fitness")
    title = "Fitness vs generations"
    if slot_label:
        title += " (%s)" % slot_label
    ax.set_title(title)
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    _save(fig, path)


def save_run_trace_plot(traces: dict, path, slot_label: str | None = None) -> None:
    """Final best fitness across independent executions for each weighting."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, trace in traces.items():
        y = trace.final_fitnesses
        ax.plot(range(1, len(y) + 1), y, marker="o",
                label=_SERIES_NAMES.get(label, label),
                color=_SERIES_COLORS.get(label))
    ax.set_xlabel("run")
    ax.set_ylabel("final fitness")
    title = "Fitness across executions"
    if slot_label:
        title += " (%s)" % slot_label
    ax.set_title(title)
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    _save(fig, path)
