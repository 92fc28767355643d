"""Energy-aware route selection for mobile devices, cloudlets and cloud servers."""

from .dp_solver import RouteSolution, build_frontiers, full_frontier, solve
from .errors import (
    CloudletDPError,
    InfeasibleTime,
    InvalidScenario,
    NoFeasibleRoute,
    ParseError,
    TooLarge,
    ValidationError,
)
from .oracle import exact_probability, oracle_frontier, oracle_solve
from .route_model import (
    ExecutionOption,
    MethodProfile,
    NodeSpec,
    PerfEnergy,
    RouteProblem,
    combine,
    cumulative_curve,
    dominates,
    prune,
)
from .scenario_io import bundled_path, load_problem, load_scenario
from .sim import baseline_direct_to_cloud, run

__all__ = [
    "CloudletDPError", "ExecutionOption", "InfeasibleTime", "InvalidScenario", "MethodProfile",
    "NoFeasibleRoute", "NodeSpec", "ParseError", "PerfEnergy", "RouteProblem", "RouteSolution",
    "TooLarge", "ValidationError", "baseline_direct_to_cloud", "build_frontiers", "bundled_path",
    "combine", "cumulative_curve", "dominates", "exact_probability", "full_frontier",
    "load_problem", "load_scenario", "oracle_frontier", "oracle_solve", "prune", "run", "solve",
]

__version__ = "0.1.0"
