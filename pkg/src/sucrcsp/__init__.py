"""Single unit commitment solved as a monoid resource constrained shortest path."""
from .engine import (
    HAVE_KERNEL,
    PRESETS,
    AlgoConfig,
    BoundsTable,
    Digraph,
    SolveResult,
    SolveStats,
    compute_bounds,
    run,
    solve,
)
from .model import (
    Instance,
    Level,
    PlanStep,
    ProductionPlan,
    Transition,
    build_digraph,
    check_plan,
    path_to_plan,
    plan_cost,
    plan_to_path,
    validate_instance,
)
from .monoid import INFEASIBLE, Change, FullMonoid, FullResource, Limits, Stay

__version__ = "0.1.0"
