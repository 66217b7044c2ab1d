"""Eagle Perching Optimizer: a shrinking-radius swarm search for box-bounded minimization."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    BestRecord,
    ConfigError,
    DerivedEta,
    EpoConfig,
    LinearEta,
    PerturbCenter,
    PerturbDist,
    RunResult,
    SearchSpace,
    ShrinkMode,
    SwarmState,
    derive_eta,
    epo_step,
    iterate,
    linear_eta,
    random_search,
    run,
)
from .objectives import Benchmark, evaluate_benchmark, known_optimum, list_objectives, make_objective  # noqa: E402
from .constrained import (  # noqa: E402
    ConstrainedProblem,
    cantilever_problem,
    gear_train_exhaustive_oracle,
    gear_train_problem,
    get_problem,
    solve,
    three_bar_truss_problem,
)
from .harness import (  # noqa: E402
    ExperimentPlan,
    convergence_probability_study,
    derive_seed,
    eta_sweep,
    export_results,
    load_results,
    run_experiment,
    surface_grid,
)
from .kernels import BACKEND  # noqa: E402

__all__ = [
    "BACKEND",
    "Benchmark",
    "BestRecord",
    "ConfigError",
    "ConstrainedProblem",
    "DerivedEta",
    "EpoConfig",
    "ExperimentPlan",
    "LinearEta",
    "PerturbCenter",
    "PerturbDist",
    "RunResult",
    "SearchSpace",
    "ShrinkMode",
    "SwarmState",
    "cantilever_problem",
    "convergence_probability_study",
    "derive_eta",
    "derive_seed",
    "epo_step",
    "eta_sweep",
    "evaluate_benchmark",
    "export_results",
    "gear_train_exhaustive_oracle",
    "gear_train_problem",
    "get_problem",
    "iterate",
    "known_optimum",
    "linear_eta",
    "list_objectives",
    "load_results",
    "make_objective",
    "random_search",
    "run",
    "run_experiment",
    "solve",
    "surface_grid",
    "three_bar_truss_problem",
]
