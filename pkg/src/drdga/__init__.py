"""Distributed regularized dual gradient simulator over time-varying directed graphs.

Library layout:

- :mod:`drdga.graph` — directed graph sequences and column-stochastic mixing
- :mod:`drdga.problem` — coupled problems (rate allocation, random quadratic)
- :mod:`drdga.localsolve` — per-agent inner minimization and dual gradients
- :mod:`drdga.engine` — the push-sum dual gradient round loop
- :mod:`drdga.baseline` — dual-decomposition baseline on doubly stochastic mixing
- :mod:`drdga.reference` — centralized solver used as the gap oracle
- :mod:`drdga.metrics` — per-round observables, rate-bound evaluators, rate fits
- :mod:`drdga.config`, :mod:`drdga.cli` — experiment files and the command line
"""

from .baseline import CddaState, cdda_advance_round, cdda_init, cdda_run_until, metropolis_matrix
from .config import Experiment, parse_config
from .engine import (
    RunConfig,
    RunState,
    advance_round,
    ergodic_average,
    init_state,
    run_until,
)
from .errors import (
    ConfigError,
    InfeasibleProblemError,
    InvalidEdgeError,
    InvalidInputError,
    InvalidProblemError,
    InvariantError,
)
from .graph import (
    GraphSequence,
    build_weight_matrix,
    generate_graph_sequence,
    load_edge_list,
    parse_edge_list,
    verify_window_connectivity,
)
from .localsolve import dual_gradient, solve_local
from .metrics import (
    BoundConstants,
    MetricsRow,
    constants_from_run,
    evaluate_round,
    lemma2_residual,
    rate_fit,
    theorem2_bound,
    theorem3_bound,
)
from .problem import (
    AgentProblem,
    CoupledProblem,
    DiagonalQuadratic,
    GeneralSmooth,
    LogUtility,
    compute_G_bound,
    make_num_problem,
    make_quadratic_problem,
)
from .reference import ReferenceSolution, solve_centralized

__version__ = "0.1.0"

__all__ = [
    "AgentProblem",
    "BoundConstants",
    "CddaState",
    "ConfigError",
    "CoupledProblem",
    "DiagonalQuadratic",
    "Experiment",
    "GeneralSmooth",
    "GraphSequence",
    "InfeasibleProblemError",
    "InvalidEdgeError",
    "InvalidInputError",
    "InvalidProblemError",
    "InvariantError",
    "LogUtility",
    "MetricsRow",
    "ReferenceSolution",
    "RunConfig",
    "RunState",
    "advance_round",
    "build_weight_matrix",
    "cdda_advance_round",
    "cdda_init",
    "cdda_run_until",
    "compute_G_bound",
    "constants_from_run",
    "dual_gradient",
    "ergodic_average",
    "evaluate_round",
    "generate_graph_sequence",
    "init_state",
    "lemma2_residual",
    "load_edge_list",
    "make_num_problem",
    "make_quadratic_problem",
    "metropolis_matrix",
    "parse_config",
    "parse_edge_list",
    "rate_fit",
    "run_until",
    "solve_centralized",
    "solve_local",
    "theorem2_bound",
    "theorem3_bound",
    "verify_window_connectivity",
]
