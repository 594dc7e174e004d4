"""Command-line front end for survey ingestion, weight estimation, estimator
comparison, Monte-Carlo sweeps, and the GA route demo.

Every command is deterministic given its flags: all randomness flows from
--seed. Printed numbers use 6 significant figures; CSV and JSON artifacts
carry full double precision so they round-trip exactly. Failures exit
nonzero with a single ``error: ...`` line on stderr.
"""

from __future__ import annotations

import csv
import functools
import json
import sys
from pathlib import Path

import click
import numpy as np

from . import estimators, simulation
from .core import PreferenceCounts, WeightVector, validate_counts
from .dirichlet import RngSeed
from .empirical_bayes import DIRECT_SEARCH, FIXED_POINT, FitConfig, bayesian_weights, fit_alpha
from .route_ga import (
    GaConfig,
    SLOT_LABELS,
    compare_weightings,
    demo_problem,
    evolve,
    load_problem,
    summary_rows,
    write_generation_trace_csv,
    write_run_trace_csv,
    write_summary_csv,
)
from .simulation import SimulationPlan, run_simulation, write_gain_curve_csv


def fmt(x: float) -> str:
    return "%.6g" % x


def fmt_vec(vec) -> str:
    return ", ".join(fmt(float(x)) for x in vec)


class CliError(click.ClickException):
    def show(self, file=None):
        print("error: %s" % self.format_message(), file=sys.stderr)


def _fail_on_value_error(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ValueError, OSError) as exc:
            raise CliError(str(exc))
    return wrapper


def _parse_counts(text: str) -> PreferenceCounts:
    try:
        values = [int(tok) for tok in text.split(",")]
    except ValueError:
        raise ValueError("counts must be a comma-separated list of integers: %r" % text)
    return validate_counts(values)


def _parse_weights(text: str) -> WeightVector:
    try:
        values = np.array([float(tok) for tok in text.split(",")], dtype=float)
    except ValueError:
        raise ValueError("weights must be a comma-separated list of reals: %r" % text)
    if values.size < 2 or np.any(values <= 0):
        raise ValueError("weights must be at least two strictly positive values")
    if abs(values.sum() - 1.0) > 1e-6:
        raise ValueError("weights are not on the simplex (sum %.8f)" % values.sum())
    return WeightVector(weights=values / values.sum())


def _parse_sizes(text: str) -> tuple:
    try:
        sizes = tuple(int(tok) for tok in text.split(","))
    except ValueError:
        raise ValueError("sizes must be a comma-separated list of integers: %r" % text)
    return sizes


def _fit_config(alpha_init, max_iter, tol, alpha0_cap, optimizer) -> FitConfig:
    kwargs = {}
    if alpha_init is not None:
        from .core import DirichletParams

        values = [float(tok) for tok in alpha_init.split(",")]
        kwargs["alpha_init"] = DirichletParams(alpha=np.array(values))
    if max_iter is not None:
        kwargs["max_iterations"] = max_iter
    if tol is not None:
        kwargs["convergence_tol"] = tol
    if alpha0_cap is not None:
        kwargs["alpha0_cap"] = alpha0_cap
    if optimizer is not None:
        kwargs["optimizer"] = optimizer
    return FitConfig(**kwargs)


@click.group()
def main():
    """Survey-driven weight estimation for weighted-sum route optimization."""


@main.group()
def survey():
    """Pilot-survey utilities."""


@survey.command("ingest")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--categories", default=None,
              help="Comma-separated category order; rejects votes outside the list.")
@_fail_on_value_error
def survey_ingest(path, categories):
    """Count single-vote survey rows (CSV: respondent_id,category)."""
    explicit = categories.split(",") if categories else None
    counts = ingest_survey(path, explicit)
    order = explicit if explicit else _category_order(path)
    for name, c in zip(order, counts.counts):
        click.echo("%s: %d" % (name, int(c)))
    click.echo("total: %d" % counts.total)
    click.echo("counts: %s" % ",".join(str(int(c)) for c in counts.counts))


def _survey_rows(path):
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        rows = [row for row in reader if row and any(cell.strip() for cell in row)]
    if not rows:
        raise ValueError("survey file is empty")
    header = [cell.strip().lower() for cell in rows[0]]
    if header[:2] == ["respondent_id", "category"]:
        rows = rows[1:]
    if not rows:
        raise ValueError("survey file has a header but no rows")
    out = []
    for i, row in enumerate(rows, start=1):
        if len(row) < 2:
            raise ValueError("survey row %d needs respondent_id and category" % i)
        out.append((row[0].strip(), row[1].strip()))
    return out


def _category_order(path) -> list:
    seen = []
    for _, cat in _survey_rows(path):
        if cat not in seen:
            seen.append(cat)
    return seen


def ingest_survey(path, categories: list | None = None) -> PreferenceCounts:
    """Tally one vote per respondent into category counts."""
    rows = _survey_rows(path)
    respondents = set()
    order = list(categories) if categories else []
    tally = {c: 0 for c in order}
    for rid, cat in rows:
        if rid in respondents:
            raise ValueError("duplicate respondent id %r" % rid)
        respondents.add(rid)
        if cat not in tally:
            if categories is not None:
                raise ValueError("unknown category %r (expected one of %s)"
                                 % (cat, ", ".join(categories)))
            order.append(cat)
            tally[cat] = 0
        tally[cat] += 1
    return validate_counts([tally[c] for c in order])


_FIT_OPTIONS = [
    click.option("--alpha-init", default=None, help="Comma-separated initial concentrations."),
    click.option("--max-iter", type=int, default=None, help="Optimizer iteration limit."),
    click.option("--tol", type=float, default=None, help="Convergence tolerance on alpha."),
    click.option("--alpha0-cap", type=float, default=None,
                 help="Upper bound on the total prior concentration."),
    click.option("--optimizer", type=click.Choice([FIXED_POINT, DIRECT_SEARCH]), default=None),
]


def fit_options(fn):
    for opt in reversed(_FIT_OPTIONS):
        fn = opt(fn)
    return fn


@main.command()
@click.option("--counts", "counts_text", required=True, help="Comma-separated survey counts.")
@click.option("--method", type=click.Choice(["freq", "bayes", "both"]), default="both")
@fit_options
@click.option("--json", "json_path", type=click.Path(dir_okay=False), default=None,
              help="Also write the full-precision result as a JSON document.")
@_fail_on_value_error
def estimate(counts_text, method, alpha_init, max_iter, tol, alpha0_cap, optimizer, json_path):
    """Estimate objective weights from survey counts."""
    counts = _parse_counts(counts_text)
    doc = {"counts": [int(c) for c in counts.counts], "total": counts.total, "method": method}
    click.echo("counts: %s (total %d)" % (",".join(str(int(c)) for c in counts.counts),
                                          counts.total))
    if method in ("freq", "both"):
        fw = estimators.frequentist_weights(counts)
        fv = estimators.frequentist_variance(fw, counts.total)
        click.echo("frequentist weights: %s" % fmt_vec(fw.weights))
        click.echo("frequentist variance: %s" % fmt_vec(fv))
        doc["frequentist"] = {"weights": list(map(float, fw.weights)),
                              "variance": list(map(float, fv))}
    if method in ("bayes", "both"):
        config = _fit_config(alpha_init, max_iter, tol, alpha0_cap, optimizer)
        fit = fit_alpha(counts, config)
        summary = estimators.posterior_summary(counts, fit)
        click.echo("bayesian weights: %s" % fmt_vec(summary.mean.weights))
        click.echo("alpha_hat: %s (alpha0 %s)" % (fmt_vec(fit.alpha_hat.alpha),
                                                  fmt(fit.alpha_hat.alpha0)))
        click.echo("bayesian variance (as published): %s" % fmt_vec(summary.variance_paper))
        click.echo("bayesian variance (exact Dirichlet): %s" % fmt_vec(summary.variance_exact))
        click.echo("log marginal likelihood: %s" % fmt(fit.log_marginal))
        click.echo("converged: %s  hit_cap: %s  iterations: %d"
                   % (fit.converged, fit.hit_cap, fit.iterations))
        doc["bayesian"] = {
            "weights": list(map(float, summary.mean.weights)),
            "alpha_hat": list(map(float, fit.alpha_hat.alpha)),
            "posterior_alpha": list(map(float, summary.posterior.alpha)),
            "variance_paper": list(map(float, summary.variance_paper)),
            "variance_exact": list(map(float, summary.variance_exact)),
            "log_marginal": float(fit.log_marginal),
            "iterations": fit.iterations,
            "converged": fit.converged,
            "hit_cap": fit.hit_cap,
        }
    if json_path:
        with open(json_path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
        click.echo("wrote %s" % json_path)


@main.command()
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False),
              required=True, help="CSV of count rows with columns n1..nl.")
@click.option("--output", "output_path", type=click.Path(dir_okay=False), default=None,
              help="Report CSV destination (stdout when omitted).")
@fit_options
@click.option("--plot/--no-plot", default=True, help="Render the gain figure next to the CSV.")
@_fail_on_value_error
def compare(input_path, output_path, alpha_init, max_iter, tol, alpha0_cap, optimizer, plot):
    """Build a comparison report row per input count row."""
    config = _fit_config(alpha_init, max_iter, tol, alpha0_cap, optimizer)
    rows = _read_count_rows(input_path)
    reports = []
    width = None
    for lineno, values in rows:
        try:
            counts = validate_counts(values)
            if width is None:
                width = len(counts)
            elif len(counts) != width:
                raise ValueError("expected %d categories" % width)
            reports.append(estimators.build_report(counts, config))
        except ValueError as exc:
            print("error: line %d: %s" % (lineno, exc), file=sys.stderr)
    l = width if width is not None else 3
    lines = [estimators.report_csv_header(l)]
    lines += [estimators.report_csv_row(r) for r in reports]
    if output_path:
        with open(output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write("\n".join(lines) + "\n")
        click.echo("wrote %s (%d rows)" % (output_path, len(reports)))
        if plot and reports:
            from . import plotting

            figure_path = str(Path(output_path).with_suffix(".png"))
            plotting.save_report_gains_plot(reports, figure_path)
            click.echo("wrote %s" % figure_path)
    else:
        click.echo("\n".join(lines))


def _read_count_rows(path):
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        raw = list(reader)
    rows = []
    start = 0
    if raw and raw[0] and not _is_int(raw[0][0]):
        start = 1  # header row (n1,n2,...)
    for idx in range(start, len(raw)):
        row = [cell.strip() for cell in raw[idx] if cell.strip()]
        if not row:
            continue
        try:
            rows.append((idx + 1, [int(cell) for cell in row]))
        except ValueError:
            print("error: line %d: non-integer cell" % (idx + 1), file=sys.stderr)
    return rows


def _is_int(text: str) -> bool:
    try:
        int(text.strip())
        return True
    except ValueError:
        return False


@main.command()
@click.option("--true-weights", "weights_text", required=True,
              help="Comma-separated true weights (must sum to 1).")
@click.option("--sizes", "sizes_text", required=True,
              help="Comma-separated ascending sample sizes.")
@click.option("--reps", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--alpha0-cap", type=float, default=None,
              help="Override the simulation's tight default concentration cap.")
@click.option("--output", "output_path", type=click.Path(dir_okay=False),
              default="gain_curve.csv", show_default=True)
@click.option("--plot/--no-plot", default=True, help="Render the curve next to the CSV.")
@_fail_on_value_error
def simulate(weights_text, sizes_text, reps, seed, alpha0_cap, output_path, plot):
    """Monte-Carlo gain curve over sample sizes."""
    tw = _parse_weights(weights_text)
    fit_config = None if alpha0_cap is None else FitConfig(alpha0_cap=alpha0_cap)
    plan = SimulationPlan(true_weights=tw, sample_sizes=_parse_sizes(sizes_text),
                          replications=reps, seed=RngSeed(seed), fit_config=fit_config)
    result = run_simulation(plan)
    write_gain_curve_csv(result, output_path)
    for s in result.per_size:
        click.echo("n=%d mean_gain=%s mse_freq=[%s] mse_bayes=[%s]"
                   % (s.sample_size, fmt(s.mean_gain),
                      fmt_vec(s.empirical_mse_freq), fmt_vec(s.empirical_mse_bayes)))
    click.echo("wrote %s" % output_path)
    if plot:
        from . import plotting

        figure_path = str(Path(output_path).with_suffix(".png"))
        plotting.save_gain_curve_plot(result, figure_path)
        click.echo("wrote %s" % figure_path)


@main.command()
@click.option("--graph", "graph_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Graph document; the bundled demo graph when omitted.")
@click.option("--slot", type=int, default=0, show_default=True)
@click.option("--counts", "counts_text", default=None,
              help="Survey counts; weights are estimated from them.")
@click.option("--weights", "weights_text", default=None,
              help="Explicit weight vector used directly.")
@click.option("--weighting", type=click.Choice(["freq", "bayes", "both"]), default="both",
              show_default=True)
@click.option("--population", type=int, default=50, show_default=True)
@click.option("--generations", type=int, default=30, show_default=True)
@click.option("--runs", type=int, default=30, show_default=True)
@click.option("--tournament-size", type=int, default=3, show_default=True)
@click.option("--crossover-rate", type=float, default=0.9, show_default=True)
@click.option("--mutation-rate", type=float, default=0.1, show_default=True)
@click.option("--elitism", type=int, default=1, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--alpha0-cap", type=float, default=None,
              help="Concentration cap for the Bayesian fit (defaults to the "
                   "category count so the two weightings stay distinct).")
@click.option("--output-dir", type=click.Path(file_okay=False), default=".", show_default=True)
@click.option("--plot/--no-plot", default=True, help="Render trace figures next to the CSVs.")
@_fail_on_value_error
def optimize(graph_path, slot, counts_text, weights_text, weighting, population, generations,
             runs, tournament_size, crossover_rate, mutation_rate, elitism, seed,
             alpha0_cap, output_dir, plot):
    """Optimize parking routes under frequentist and/or Bayesian weights."""
    if (counts_text is None) == (weights_text is None):
        raise ValueError("exactly one of --counts or --weights is required")
    problem = load_problem(graph_path) if graph_path else demo_problem()
    if not (0 <= slot < problem.slots):
        raise ValueError("slot %d out of range (graph has %d slots)" % (slot, problem.slots))

    if counts_text is not None:
        counts = _parse_counts(counts_text)
        cap = alpha0_cap if alpha0_cap is not None else float(len(counts))
        fit = fit_alpha(counts, FitConfig(alpha0_cap=cap))
        freq_w = estimators.frequentist_weights(counts)
        if freq_w.has_zeros:
            raise ValueError("zero-count categories cannot be scalarization weights")
        bayes_w = bayesian_weights(counts, fit)
        click.echo("frequentist weights: %s" % fmt_vec(freq_w.weights))
        click.echo("bayesian weights: %s" % fmt_vec(bayes_w.weights))
    else:
        freq_w = bayes_w = _parse_weights(weights_text)
        click.echo("weights: %s" % fmt_vec(freq_w.weights))

    config = GaConfig(population=population, generations=generations,
                      tournament_size=tournament_size, crossover_rate=crossover_rate,
                      mutation_rate=mutation_rate, elitism=elitism,
                      seed=RngSeed(seed), runs=runs)
    try:
        if weighting == "both":
            paired = compare_weightings(problem, freq_w, bayes_w, slot, config)
            traces = paired.as_dict()
        elif weighting == "freq":
            traces = {"freq": evolve(problem, freq_w, slot, config)}
        else:
            traces = {"bayes": evolve(problem, bayes_w, slot, config)}
    except Exception as exc:
        raise CliError(str(exc))

    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    gen_csv = out / ("generation_trace_slot%d.csv" % slot)
    run_csv = out / ("run_trace_slot%d.csv" % slot)
    summary_csv = out / ("summary_slot%d.csv" % slot)
    write_generation_trace_csv(traces, gen_csv)
    write_run_trace_csv(traces, run_csv)
    write_summary_csv(traces, summary_csv)
    label = SLOT_LABELS[slot] if problem.slots == len(SLOT_LABELS) else "slot %d" % slot
    click.echo("slot %d (%s)" % (slot, label))
    click.echo("method mean worst best")
    for method, mean, worst, best in summary_rows(traces):
        click.echo("%s %s %s %s" % (method, fmt(mean), fmt(worst), fmt(best)))
    for p in (gen_csv, run_csv, summary_csv):
        click.echo("wrote %s" % p)
    if plot:
        from . import plotting

        gen_png = gen_csv.with_suffix(".png")
        run_png = run_csv.with_suffix(".png")
        plotting.save_generation_trace_plot(traces, gen_png, slot_label=label)
        plotting.save_run_trace_plot(traces, run_png, slot_label=label)
        click.echo("wrote %s" % gen_png)
        click.echo("wrote %s" % run_png)


if __name__ == "__main__":
    main()
