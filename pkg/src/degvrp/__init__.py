"""Exact routing of a small EV fleet with a depth-of-discharge penalty."""

from degvrp.degradation import (
    ObjectiveSpec,
    Variant,
    WoehlerCurve,
    cycle_life,
    fit_default_curve,
    penalty,
    total_objective,
    worst_case_cycles,
)
from degvrp.model import (
    EnergyInfeasibleError,
    FleetState,
    Instance,
    Solution,
    StructuralError,
    Vehicle,
    Violation,
    check_feasibility,
    evaluate,
    from_arc_form,
    to_arc_form,
    validate_instance,
)
from degvrp.solver import (
    InfeasibleInstanceError,
    SolveResult,
    SolverConfig,
    lower_bound,
    solve,
    solve_bruteforce,
    sweep_alpha,
)

__version__ = "0.1.0"

__all__ = [
    "EnergyInfeasibleError",
    "FleetState",
    "InfeasibleInstanceError",
    "Instance",
    "ObjectiveSpec",
    "Solution",
    "SolveResult",
    "SolverConfig",
    "StructuralError",
    "Variant",
    "Vehicle",
    "Violation",
    "WoehlerCurve",
    "check_feasibility",
    "cycle_life",
    "evaluate",
    "fit_default_curve",
    "from_arc_form",
    "lower_bound",
    "penalty",
    "solve",
    "solve_bruteforce",
    "sweep_alpha",
    "to_arc_form",
    "total_objective",
    "validate_instance",
    "worst_case_cycles",
]
