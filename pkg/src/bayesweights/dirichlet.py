"""Multinomial and Dirichlet probability kernels plus reproducible sampling.

All densities are computed and returned in log space (log-gamma throughout);
the multinomial normalizing factorials overflow a double well below the
sample sizes of interest otherwise.

Random draws use the counter-based Philox generator keyed by an explicit
``(seed, stream_id)`` pair, so substreams are independent and every draw
sequence is reproducible across runs, platforms, and execution order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .core import DirichletParams, PreferenceCounts, WeightVector, make_weight_vector

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    # SplitMix64 finalizer; decorrelates derived stream ids.
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


@dataclass(frozen=True)
class RngSeed:
    """Seed plus substream selector for the counter-based generator."""

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not (0 <= self.seed <= _MASK64) or not (0 <= self.stream_id <= _MASK64):
            raise ValueError("seed and stream_id must be 64-bit unsigned integers")

    def derive(self, *indices: int) -> "RngSeed":
        """Deterministically derive an independent substream keyed by indices."""
        h = self.stream_id
        for ix in indices:
            h = _splitmix64(h ^ _splitmix64(ix & _MASK64))
        return RngSeed(seed=self.seed, stream_id=h)

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))


def _count_array(counts) -> np.ndarray:
    """Accept PreferenceCounts or a raw non-negative integer vector.

    The raw form exists so the no-data (all-zero) conjugacy identity can be
    expressed; PreferenceCounts itself requires at least one vote.
    """
    if isinstance(counts, PreferenceCounts):
        return counts.counts
    arr = np.asarray(counts)
    if arr.ndim != 1 or np.any(arr < 0) or np.any(arr != np.floor(arr)):
        raise ValueError("counts must be a vector of non-negative integers")
    return arr.astype(np.int64)


def multinomial_log_pmf(counts, weights: WeightVector) -> float:
    """Log multinomial probability of the observed category counts."""
    c = _count_array(counts)
    w = weights.weights if isinstance(weights, WeightVector) else np.asarray(weights, float)
    if len(c) != len(w):
        raise ValueError("counts and weights must have equal length")
    n = c.sum()
    return float(gammaln(n + 1) - gammaln(c + 1).sum() + (c * np.log(w)).sum())


def dirichlet_log_pdf(point: WeightVector, params: DirichletParams) -> float:
    """Log Dirichlet density at an interior point of the simplex."""
    x = point.weights
    a = params.alpha
    if len(x) != len(a):
        raise ValueError("point and params must have equal length")
    if np.any(x <= 0.0) or np.any(x >= 1.0):
        raise ValueError("density is defined only on the open simplex")
    return float(gammaln(a.sum()) - gammaln(a).sum() + ((a - 1.0) * np.log(x)).sum())


def posterior_update(prior: DirichletParams, counts) -> DirichletParams:
    """Conjugate update: add observed counts to the concentration vector."""
    c = _count_array(counts)
    if len(c) != len(prior):
        raise ValueError("prior and counts must have equal length")
    return DirichletParams(alpha=prior.alpha + c)


def posterior_mean(params: DirichletParams) -> WeightVector:
    """Mean of a Dirichlet: each concentration over their sum."""
    return make_weight_vector(params.alpha)


def dirichlet_sample(params: DirichletParams, seed: RngSeed, size: int | None = None):
    """Draw from Dirichlet(alpha) via normalized independent gamma variates.

    Returns one WeightVector, or a (size, l) array of draws when ``size`` is
    given. Deterministic for a fixed seed.
    """
    rng = seed.generator()
    shape = params.alpha if size is None else np.broadcast_to(params.alpha, (size, len(params)))
    g = rng.standard_gamma(shape)
    g = np.maximum(g, np.finfo(np.float64).tiny)  # guard against underflow at tiny alpha
    if size is None:
        return make_weight_vector(g)
    return g / g.sum(axis=1, keepdims=True)


def multinomial_sample(n: int, weights: WeightVector, seed: RngSeed, size: int | None = None):
    """Draw category counts for n trials by sequential conditional binomials.

    Returns PreferenceCounts, or a (size, l) integer array when ``size`` is
    given. Counts always partition n exactly.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = seed.generator()
    w = weights.weights
    l = len(w)
    reps = 1 if size is None else size
    out = np.zeros((reps, l), dtype=np.int64)
    remaining = np.full(reps, n, dtype=np.int64)
    mass = 1.0
    for k in range(l - 1):
        p = min(max(w[k] / mass, 0.0), 1.0)
        draw = rng.binomial(remaining, p)
        out[:, k] = draw
        remaining = remaining - draw
        mass -= w[k]
    out[:, l - 1] = remaining
    if size is None:
        return PreferenceCounts(counts=out[0], total=n)
    return out
