"""Empirical-Bayes fitting of the Dirichlet concentration parameters.

The concentration vector is chosen to maximize the Dirichlet-multinomial
marginal likelihood of the observed counts. For a single observed count
vector that likelihood has no finite maximizer: it increases without bound
as alpha grows along the direction of the sample proportions, approaching
the plain multinomial likelihood from below. The fit is therefore run under
an explicit cap on the total concentration; when the optimizer presses
against it the estimate is projected onto the cap sphere and the result is
flagged via ``hit_cap``. Smaller caps keep genuine prior shrinkage in the
resulting weights, larger caps drive them toward the sample proportions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import digamma, gammaln

from .core import DirichletParams, PreferenceCounts, WeightVector, make_weight_vector
from .dirichlet import _count_array

ALPHA_FLOOR = 1e-6
# Ascent steps that lose more log-marginal than this are rejected.
_ASCENT_SLACK = 1e-12

FIXED_POINT = "fixed_point"
DIRECT_SEARCH = "direct_search"


@dataclass(frozen=True)
class FitConfig:
    """Optimizer settings for the marginal-likelihood maximization."""

    alpha_init: DirichletParams | None = None
    max_iterations: int = 500
    convergence_tol: float = 1e-8
    alpha0_cap: float = 1e4
    optimizer: str = FIXED_POINT

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        if not (self.convergence_tol > 0):
            raise ValueError("convergence_tol must be positive")
        if not np.isfinite(self.alpha0_cap) or self.alpha0_cap <= 0:
            raise ValueError("alpha0_cap must be positive and finite")
        if self.optimizer not in (FIXED_POINT, DIRECT_SEARCH):
            raise ValueError("optimizer must be %r or %r" % (FIXED_POINT, DIRECT_SEARCH))


@dataclass(frozen=True)
class FitResult:
    """Fitted concentrations plus convergence diagnostics."""

    alpha_hat: DirichletParams
    log_marginal: float
    iterations: int
    converged: bool
    hit_cap: bool


def _log_marginal_rows(counts: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    """Row-wise log marginal likelihood for (R, l) count/alpha arrays."""
    n = counts.sum(axis=-1)
    a0 = alpha.sum(axis=-1)
    return (
        gammaln(a0)
        - gammaln(alpha).sum(axis=-1)
        + gammaln(n + 1.0)
        - gammaln(counts + 1.0).sum(axis=-1)
        + gammaln(counts + alpha).sum(axis=-1)
        - gammaln(a0 + n)
    )


def log_marginal_likelihood(counts, alpha) -> float:
    """Log probability of the counts with the weights integrated out."""
    c = _count_array(counts).astype(np.float64)
    a = alpha.alpha if isinstance(alpha, DirichletParams) else np.asarray(alpha, np.float64)
    if len(c) != len(a):
        raise ValueError("counts and alpha must have equal length")
    return float(_log_marginal_rows(c, a))


def _resolve_init(config: FitConfig, l: int) -> np.ndarray:
    if config.alpha_init is None:
        return np.ones(l, dtype=np.float64)
    if len(config.alpha_init) != l:
        raise ValueError("alpha_init length does not match counts")
    return config.alpha_init.alpha.astype(np.float64)


def fit_alpha_many(counts_matrix: np.ndarray, config: FitConfig):
    """Fit every row of an (R, l) count matrix independently.

    Vectorized fixed-point iteration; per-row results are identical to
    fitting each row alone, which :func:`fit_alpha` relies on.

    Returns ``(alpha_hat, log_marginal, iterations, converged, hit_cap)``
    arrays with leading dimension R.
    """
    counts = np.asarray(counts_matrix, dtype=np.float64)
    if counts.ndim != 2:
        raise ValueError("counts_matrix must be 2-dimensional")
    R, l = counts.shape
    cap = float(config.alpha0_cap)
    if cap < l:
        raise ValueError("alpha0_cap must admit the uniform prior (cap >= number of categories)")

    if config.optimizer == DIRECT_SEARCH:
        return _fit_direct_search_many(counts, config)

    n = counts.sum(axis=1)
    alpha = np.tile(_resolve_init(config, l), (R, 1))
    lm = _log_marginal_rows(counts, alpha)
    iterations = np.zeros(R, dtype=np.int64)
    converged = np.zeros(R, dtype=bool)
    active = np.ones(R, dtype=bool)

    for _ in range(config.max_iterations):
        if not active.any():
            break
        idx = np.where(active)[0]
        a = alpha[idx]
        c = counts[idx]
        a0 = a.sum(axis=1)
        numer = digamma(c + a) - digamma(a)
        denom = (digamma(n[idx] + a0) - digamma(a0))[:, None]
        new = np.maximum(a * numer / denom, ALPHA_FLOOR)
        s = new.sum(axis=1)
        over = s > cap
        if over.any():
            new[over] *= (cap / s[over])[:, None]
        new_lm = _log_marginal_rows(c, new)
        iterations[idx] += 1

        # The unconstrained step never decreases the objective; projection
        # onto the cap sphere can. Reject such steps and stop those rows.
        worse = new_lm < lm[idx] - _ASCENT_SLACK
        accept = ~worse
        alpha[idx[accept]] = new[accept]
        lm[idx[accept]] = new_lm[accept]
        small = np.max(np.abs(new - a), axis=1) < config.convergence_tol
        done = worse | small
        converged[idx[done]] = True
        active[idx[done]] = False

    hit_cap = np.abs(alpha.sum(axis=1) - cap) <= 1e-6
    return alpha, _log_marginal_rows(counts, alpha), iterations, converged, hit_cap


def _fit_direct_search_many(counts: np.ndarray, config: FitConfig):
    from scipy.optimize import minimize

    R, l = counts.shape
    cap = float(config.alpha0_cap)
    out_alpha = np.empty((R, l))
    iterations = np.zeros(R, dtype=np.int64)
    converged = np.zeros(R, dtype=bool)
    for r in range(R):
        row = counts[r]

        def neg_lm(z):
            a = np.exp(z)
            s = a.sum()
            if s > cap:
                return 1e10 + (s - cap)  # infeasible: steer back inside the cap
            return -float(_log_marginal_rows(row, np.maximum(a, ALPHA_FLOOR)))

        z0 = np.log(_resolve_init(config, l))
        res = minimize(neg_lm, z0, method="Nelder-Mead",
                       options={"maxiter": config.max_iterations * l,
                                "xatol": config.convergence_tol,
                                "fatol": config.convergence_tol})
        a = np.maximum(np.exp(res.x), ALPHA_FLOOR)
        s = a.sum()
        if s > cap:
            a *= cap / s
        out_alpha[r] = a
        iterations[r] = res.nit
        converged[r] = bool(res.success)
    hit_cap = np.abs(out_alpha.sum(axis=1) - cap) <= 1e-6
    return out_alpha, _log_marginal_rows(counts, out_alpha), iterations, converged, hit_cap


def fit_alpha(counts: PreferenceCounts, config: FitConfig = FitConfig()) -> FitResult:
    """Maximize the marginal likelihood over the concentration vector."""
    c = _count_array(counts)
    alpha, lm, iters, conv, hit = fit_alpha_many(c[None, :].astype(np.float64), config)
    alpha_hat = DirichletParams(alpha=alpha[0])
    return FitResult(
        alpha_hat=alpha_hat,
        log_marginal=log_marginal_likelihood(counts, alpha_hat),
        iterations=int(iters[0]),
        converged=bool(conv[0]),
        hit_cap=bool(hit[0]),
    )


def bayesian_weights(counts: PreferenceCounts, fit: FitResult) -> WeightVector:
    """Posterior-mean weight estimate: (alpha_hat + counts) normalized."""
    c = _count_array(counts)
    a = fit.alpha_hat.alpha
    if len(c) != len(a):
        raise ValueError("counts and fitted alpha must have equal length")
    return make_weight_vector(a + c)
