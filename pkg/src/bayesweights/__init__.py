"""Survey-driven weight estimation for weighted-sum multi-objective
optimization, with an estimator-efficiency comparison harness and a genetic
route optimizer demonstrating the weights on a time-slotted parking graph."""

from .core import (
    CROSSCHECK_ATOL,
    SIMPLEX_ATOL,
    DirichletParams,
    ObjectiveValues,
    PosteriorSummary,
    PreferenceCounts,
    WeightVector,
    make_weight_vector,
    validate_counts,
)
from .dirichlet import (
    RngSeed,
    dirichlet_log_pdf,
    dirichlet_sample,
    multinomial_log_pmf,
    multinomial_sample,
    posterior_mean,
    posterior_update,
)
from .empirical_bayes import (
    FitConfig,
    FitResult,
    bayesian_weights,
    fit_alpha,
    fit_alpha_many,
    log_marginal_likelihood,
)
from .estimators import (
    EstimatorReport,
    bayesian_variance_exact,
    bayesian_variance_paper,
    build_report,
    efficiency,
    frequentist_variance,
    frequentist_weights,
    posterior_summary,
    relative_gain,
)
from .route_ga import (
    Chromosome,
    GaConfig,
    GaError,
    GaTrace,
    PairedTraces,
    RouteProblem,
    compare_weightings,
    demo_problem,
    enumerate_simple_paths,
    evolve,
    load_problem,
    route_objectives,
    scalarize,
)
from .simulation import (
    SimulationPlan,
    SimulationResult,
    gain_curve,
    run_simulation,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
