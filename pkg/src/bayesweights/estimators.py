"""Frequentist baseline, posterior variances, and estimator comparison reports.

Two Bayesian variances are carried side by side. ``bayes_variance_paper``
implements the published posterior-variance expression verbatim,

    n * W*(1 - W*) / (sum_j(alpha_j + n))^2

whose denominator sums ``alpha_j + n`` over categories, i.e. equals
``(alpha0 + l*n)^2``. That expression cannot be reconciled with the standard
Dirichlet posterior variance m(1-m)/(a0+1), so the exact moment is reported
alongside it as ``bayes_variance_exact``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DirichletParams, PosteriorSummary, PreferenceCounts, WeightVector
from .dirichlet import posterior_update
from .empirical_bayes import FitConfig, FitResult, bayesian_weights, fit_alpha


def frequentist_weights(counts: PreferenceCounts) -> WeightVector:
    """Sample proportions n_i / n. Zero counts yield zero weights, so the
    relaxed WeightVector variant is returned and flagged via ``has_zeros``."""
    return WeightVector.proportions(counts)


def frequentist_variance(weights: WeightVector, n: int) -> np.ndarray:
    """Binomial error variance of each proportion: w(1-w)/n."""
    if n < 1:
        raise ValueError("n must be at least 1")
    w = weights.weights
    return w * (1.0 - w) / float(n)


def bayesian_variance_paper(bayes_weights: WeightVector, alpha_hat: DirichletParams, n: int) -> np.ndarray:
    """Published posterior-variance expression, implemented as printed."""
    w = bayes_weights.weights
    if len(w) != len(alpha_hat):
        raise ValueError("weights and alpha must have equal length")
    denom = float(np.sum(alpha_hat.alpha + n)) ** 2
    return n * w * (1.0 - w) / denom


def bayesian_variance_exact(posterior: DirichletParams) -> np.ndarray:
    """Standard Dirichlet variance of each component: m(1-m)/(a0+1)."""
    a0 = posterior.alpha0
    m = posterior.alpha / a0
    return m * (1.0 - m) / (a0 + 1.0)


def efficiency(v1: float, v2: float) -> float:
    """Variance ratio v1/v2; infinite when the second variance is zero."""
    if v2 < 0 or v1 < 0:
        raise ValueError("variances must be non-negative")
    if v2 == 0.0:
        return math.inf
    return v1 / v2


def relative_gain(v1: float, v2: float) -> float:
    """Relative gain in efficiency (v1 - v2)/v1; zero means equally efficient."""
    if v1 <= 0.0:
        raise ValueError("gain is undefined for a zero reference variance")
    return (v1 - v2) / v1


@dataclass(frozen=True)
class EstimatorReport:
    """One comparison row: both weight estimates with their error variances."""

    counts: PreferenceCounts
    freq_weights: WeightVector
    bayes_weights: WeightVector
    freq_variance: np.ndarray
    bayes_variance_paper: np.ndarray
    bayes_variance_exact: np.ndarray
    efficiency: np.ndarray
    gain: np.ndarray
    gain_aggregate: float
    fit: FitResult
    freq_has_zeros: bool

    @property
    def variance_difference(self) -> np.ndarray:
        return self.freq_variance - self.bayes_variance_paper


def posterior_summary(counts: PreferenceCounts, fit: FitResult) -> PosteriorSummary:
    """Posterior Dirichlet and its moments for the fitted prior."""
    post = posterior_update(fit.alpha_hat, counts)
    mean = bayesian_weights(counts, fit)
    return PosteriorSummary(
        posterior=post,
        mean=mean,
        variance_paper=bayesian_variance_paper(mean, fit.alpha_hat, counts.total),
        variance_exact=bayesian_variance_exact(post),
        source_counts=counts,
        fitted_alpha=fit.alpha_hat,
    )


def build_report(counts: PreferenceCounts, config: FitConfig = FitConfig()) -> EstimatorReport:
    """Fit the prior and assemble the full comparison row.

    Per-component gains use the published variance expression; components
    with a zero frequentist variance (degenerate proportions) get NaN gains
    and are excluded from the aggregate. Fit non-convergence is carried on
    the report, never raised.
    """
    fit = fit_alpha(counts, config)
    fw = frequentist_weights(counts)
    bw = bayesian_weights(counts, fit)
    evd = frequentist_variance(fw, counts.total)
    evs = bayesian_variance_paper(bw, fit.alpha_hat, counts.total)
    post = posterior_update(fit.alpha_hat, counts)

    with np.errstate(divide="ignore", invalid="ignore"):
        eff = np.where(evs > 0.0, evd / evs, np.inf)
        gain = np.where(evd > 0.0, (evd - evs) / evd, np.nan)
    finite = np.isfinite(gain)
    gain_aggregate = float(gain[finite].mean()) if finite.any() else math.nan

    return EstimatorReport(
        counts=counts,
        freq_weights=fw,
        bayes_weights=bw,
        freq_variance=evd,
        bayes_variance_paper=evs,
        bayes_variance_exact=bayesian_variance_exact(post),
        efficiency=eff,
        gain=gain,
        gain_aggregate=gain_aggregate,
        fit=fit,
        freq_has_zeros=fw.has_zeros,
    )


def report_csv_header(l: int = 3) -> str:
    """Column header for comparison CSVs; the l=3 form matches the published
    table layout and longer vectors extend each group positionally."""
    cols = ["n"]
    cols += ["n%d" % i for i in range(1, l + 1)]
    cols += ["w%d" % i for i in range(1, l + 1)]
    cols += ["w%db" % i for i in range(1, l + 1)]
    cols += ["evd%d" % i for i in range(1, l + 1)]
    cols += ["evs%d" % i for i in range(1, l + 1)]
    cols += ["d%d" % i for i in range(1, l + 1)]
    cols.append("gain")
    return ",".join(cols)


def report_csv_row(report: EstimatorReport) -> str:
    """Serialize one report at full double precision."""
    fields = [str(report.counts.total)]
    fields += [str(int(c)) for c in report.counts.counts]
    for vec in (
        report.freq_weights.weights,
        report.bayes_weights.weights,
        report.freq_variance,
        report.bayes_variance_paper,
        report.variance_difference,
    ):
        fields += [repr(float(x)) for x in vec]
    fields.append(repr(float(report.gain_aggregate)))
    return ",".join(fields)


def write_reports_csv(reports, path) -> None:
    if not reports:
        raise ValueError("no reports to write")
    lines = [report_csv_header(len(reports[0].counts))]
    lines += [report_csv_row(r) for r in reports]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
