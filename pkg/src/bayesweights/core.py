"""Shared domain types: preference counts, simplex weight vectors, Dirichlet
parameters, and the validation rules they all obey.

Every type is immutable after construction (arrays are marked read-only), so
instances are safe to share across threads without locking.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Absolute tolerance for "sums to one" checks on the simplex.
SIMPLEX_ATOL = 1e-12
# Tolerance used when cross-checking against 4-5 decimal tabulated values.
CROSSCHECK_ATOL = 1e-9


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class PreferenceCounts:
    """Observed survey votes per category: one vote per respondent."""

    counts: np.ndarray
    total: int

    def __len__(self) -> int:
        return len(self.counts)

    def __post_init__(self):
        object.__setattr__(self, "counts", _readonly(np.asarray(self.counts, dtype=np.int64)))
        if int(self.counts.sum()) != self.total:
            raise ValueError("total does not equal the sum of counts")


def validate_counts(counts) -> PreferenceCounts:
    """Validate a raw vector of category counts and wrap it.

    Rejects negative entries, all-zero vectors, fewer than two categories,
    and non-integral values.
    """
    arr = np.asarray(counts)
    if arr.ndim != 1 or arr.size < 2:
        raise ValueError("counts must be a vector with at least 2 categories")
    if not np.all(np.isfinite(arr.astype(float))):
        raise ValueError("counts must be finite")
    if np.any(arr != np.floor(arr)):
        raise ValueError("counts must be integers")
    arr = arr.astype(np.int64)
    if np.any(arr < 0):
        raise ValueError("counts must be non-negative")
    if not np.any(arr > 0):
        raise ValueError("counts must contain at least one vote")
    return PreferenceCounts(counts=arr, total=int(arr.sum()))


@dataclass(frozen=True)
class WeightVector:
    """Point on the probability simplex; strictly positive unless built via
    :meth:`proportions` (sample proportions may contain zero components)."""

    weights: np.ndarray
    strict: bool = True

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1 or w.size < 2:
            raise ValueError("weights must be a vector with at least 2 components")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        if self.strict and np.any(w <= 0.0):
            raise ValueError("weights must be strictly positive")
        if not self.strict and np.any(w < 0.0):
            raise ValueError("weights must be non-negative")
        if abs(float(w.sum()) - 1.0) > SIMPLEX_ATOL:
            raise ValueError("weights must sum to 1 within %g" % SIMPLEX_ATOL)
        object.__setattr__(self, "weights", _readonly(w))

    def __len__(self) -> int:
        return len(self.weights)

    @property
    def has_zeros(self) -> bool:
        return bool(np.any(self.weights == 0.0))

    @classmethod
    def proportions(cls, counts: PreferenceCounts) -> "WeightVector":
        """Relaxed construction from sample proportions; permits zeros."""
        w = counts.counts.astype(np.float64) / float(counts.total)
        w = w / w.sum()
        return cls(weights=w, strict=False)


def make_weight_vector(raw) -> WeightVector:
    """Normalize a vector of positive reals onto the simplex.

    Rejects non-positive or non-finite entries and vectors shorter than 2.
    Idempotent and scale-invariant: normalizing c*raw for any c > 0 gives the
    same result as normalizing raw.
    """
    arr = np.asarray(raw, dtype=np.float64)
    if arr.ndim != 1 or arr.size < 2:
        raise ValueError("need at least 2 entries to form a weight vector")
    if not np.all(np.isfinite(arr)):
        raise ValueError("entries must be finite")
    if np.any(arr <= 0.0):
        raise ValueError("entries must be strictly positive")
    return WeightVector(weights=arr / arr.sum())


@dataclass(frozen=True)
class DirichletParams:
    """Concentration vector of a Dirichlet distribution (prior or posterior)."""

    alpha: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.alpha, dtype=np.float64)
        if a.ndim != 1 or a.size < 2:
            raise ValueError("alpha must be a vector with at least 2 components")
        if not np.all(np.isfinite(a)) or np.any(a <= 0.0):
            raise ValueError("every concentration parameter must be positive and finite")
        object.__setattr__(self, "alpha", _readonly(a))

    def __len__(self) -> int:
        return len(self.alpha)

    @property
    def alpha0(self) -> float:
        return float(self.alpha.sum())


@dataclass(frozen=True)
class ObjectiveValues:
    """Normalized objective function outputs, each in [0, 1]."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1 or v.size < 1:
            raise ValueError("values must be a non-empty vector")
        if not np.all(np.isfinite(v)) or np.any(v < 0.0) or np.any(v > 1.0):
            raise ValueError("objective values must lie in [0, 1]")
        object.__setattr__(self, "values", _readonly(v))

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class PosteriorSummary:
    """Posterior Dirichlet over the weights together with its moments.

    ``variance_paper`` follows the published posterior-variance expression
    verbatim; ``variance_exact`` is the standard Dirichlet second moment.
    The two disagree (see estimators module) so both are carried.
    """

    posterior: DirichletParams
    mean: WeightVector
    variance_paper: np.ndarray = field(repr=False)
    variance_exact: np.ndarray = field(repr=False)
    source_counts: PreferenceCounts = None
    fitted_alpha: DirichletParams = None

    def __post_init__(self):
        object.__setattr__(self, "variance_paper", _readonly(np.asarray(self.variance_paper, float)))
        object.__setattr__(self, "variance_exact", _readonly(np.asarray(self.variance_exact, float)))
        if self.source_counts is not None and self.fitted_alpha is not None:
            expect = self.fitted_alpha.alpha + self.source_counts.counts
            if not np.allclose(self.posterior.alpha, expect, rtol=0, atol=SIMPLEX_ATOL):
                raise ValueError("posterior parameters must equal fitted alpha + counts")
