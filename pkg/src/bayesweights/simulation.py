"""Monte-Carlo comparison of the two weight estimators across sample sizes.

For each sample size, survey counts are drawn repeatedly under known true
weights, both estimators are computed, and their empirical mean squared
errors against the truth give a relative-gain curve over sample size. The
gain here is an estimator-quality ground truth: it is computed from the
empirical MSEs, not from either plug-in variance formula.

The default fit configuration caps the total prior concentration at the
number of categories (the uniform prior's mass). A single survey shows no
overdispersion, so an uncapped empirical-Bayes fit inflates the prior until
the Bayesian weights coincide with the sample proportions and both
estimators become indistinguishable; the tight cap preserves the prior's
genuine small-sample stabilization, which is what the sweep measures.

Every replication draws from its own substream keyed by (sample size,
replication index), so results are independent of evaluation order and
identical across repeated runs with the same plan.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import WeightVector
from .dirichlet import RngSeed, multinomial_sample
from .empirical_bayes import FitConfig, fit_alpha_many


def default_simulation_fit_config(l: int) -> FitConfig:
    """Tight-cap fit used by simulation sweeps (see module docstring)."""
    return FitConfig(alpha0_cap=float(l))


@dataclass(frozen=True)
class SimulationPlan:
    true_weights: WeightVector
    sample_sizes: tuple
    replications: int = 1000
    seed: RngSeed = RngSeed(0)
    fit_config: FitConfig | None = None

    def __post_init__(self):
        sizes = tuple(int(n) for n in self.sample_sizes)
        object.__setattr__(self, "sample_sizes", sizes)
        l = len(self.true_weights)
        if not sizes:
            raise ValueError("at least one sample size is required")
        if any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise ValueError("sample sizes must be strictly ascending")
        if any(n < l for n in sizes):
            raise ValueError("each sample size must be at least the number of categories")
        if self.replications < 1:
            raise ValueError("replications must be positive")

    def resolved_fit_config(self) -> FitConfig:
        if self.fit_config is not None:
            return self.fit_config
        return default_simulation_fit_config(len(self.true_weights))


@dataclass(frozen=True)
class SizeResult:
    sample_size: int
    empirical_mse_freq: np.ndarray
    empirical_mse_bayes: np.ndarray
    mean_gain: float
    replication_count: int
    skipped: int = 0


@dataclass(frozen=True)
class SimulationResult:
    plan: SimulationPlan
    per_size: tuple = field(default_factory=tuple)


def run_simulation(plan: SimulationPlan) -> SimulationResult:
    """Run the full sweep; deterministic for a fixed plan."""
    tw = plan.true_weights.weights
    l = len(tw)
    config = plan.resolved_fit_config()
    reps = plan.replications
    out = []
    for n in plan.sample_sizes:
        counts = np.empty((reps, l), dtype=np.int64)
        for r in range(reps):
            counts[r] = multinomial_sample(n, plan.true_weights, plan.seed.derive(n, r)).counts
        freq = counts / float(n)
        alpha_hat, _, _, _, _ = fit_alpha_many(counts.astype(np.float64), config)
        usable = np.all(np.isfinite(alpha_hat), axis=1)
        skipped = int((~usable).sum())
        bayes = (alpha_hat[usable] + counts[usable]) / (alpha_hat[usable].sum(axis=1) + n)[:, None]
        mse_freq = np.mean((freq[usable] - tw) ** 2, axis=0)
        mse_bayes = np.mean((bayes - tw) ** 2, axis=0)
        mean_gain = float(np.mean((mse_freq - mse_bayes) / mse_freq))
        out.append(SizeResult(
            sample_size=n,
            empirical_mse_freq=mse_freq,
            empirical_mse_bayes=mse_bayes,
            mean_gain=mean_gain,
            replication_count=reps,
            skipped=skipped,
        ))
    return SimulationResult(plan=plan, per_size=tuple(out))


def gain_curve(result: SimulationResult) -> list:
    """(sample_size, mean_gain) rows in ascending size order."""
    if not result.per_size:
        raise ValueError("empty simulation result")
    return [(s.sample_size, s.mean_gain) for s in result.per_size]


def gain_curve_csv_header(l: int) -> str:
    cols = ["n", "mean_gain"]
    cols += ["mse_freq_%d" % i for i in range(1, l + 1)]
    cols += ["mse_bayes_%d" % i for i in range(1, l + 1)]
    return ",".join(cols)


def write_gain_curve_csv(result: SimulationResult, path) -> None:
    """Emit the gain-curve artifact at full double precision."""
    l = len(result.plan.true_weights)
    lines = [gain_curve_csv_header(l)]
    for s in result.per_size:
        fields = [str(s.sample_size), repr(s.mean_gain)]
        fields += [repr(float(x)) for x in s.empirical_mse_freq]
        fields += [repr(float(x)) for x in s.empirical_mse_bayes]
        lines.append(",".join(fields))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
