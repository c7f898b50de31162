"""Numerical laboratory for screening two rationed goods with ordeals,
damages, and waitlists.

Distributions over the valuation square, menu mechanisms and their welfare
accounting, allocation boundaries, the optimal-implementation construction,
market clearing, boundary optimization, and the waitlist reduction.
"""

from .boundary import (
    Boundary,
    FeasibilityReport,
    check_feasible_pair,
    pair_slope_grid,
    supply_masses,
)
from .dist import (
    ConditionReport,
    DensityModel,
    WeightedModel,
    check_assumption1,
    check_weighted_condition,
    hetero_transform,
    load_grid_csv,
    save_grid_csv,
    weighted_rates,
)
from .implement import (
    ImplementationBundle,
    StepProfile,
    brute_force_best_UA,
    c_scale,
    extract_boundary,
    implementation_bundle,
    m_profile,
    mechanism_from,
    optimal_UA,
    ub_from,
    wstar_welfare,
)
from .market import ClearingResult, market_clearing_ordeals, theorem1_mechanism
from .mechanism import (
    Mechanism,
    MenuOption,
    best_option,
    choose_good,
    demand,
    direct_welfare,
    efficiency,
    indirect_utility,
    objective_wr,
    option_masses,
    revenue,
)
from .optimize import (
    SearchResult,
    SweepResult,
    SweepRow,
    example1_compare,
    local_boundary_search,
    single_good_compare,
    slope_sweep,
    stationarity_diagnostic,
    supply_preserving_linear,
)
from .pwl import PWLConvex, line_hull, merged_breaks, response_curve
from .waitlist import (
    SimConfig,
    SimTrajectory,
    WaitMechanism,
    WaitOption,
    expected_discount,
    simulate,
    static_equivalent,
    steady_state_check,
)
from . import errors
from .errors import (
    BoundaryError,
    ConvexityError,
    DegenerateMechanismError,
    DomainError,
    InfeasiblePairError,
    InfeasibleSlopeError,
    NonConvergenceError,
    OrdealLabError,
    ScenarioError,
    SolverError,
    SteadyStateError,
    ValidationError,
)

__version__ = "0.1.0"

__all__ = [
    "Boundary",
    "BoundaryError",
    "ClearingResult",
    "ConditionReport",
    "ConvexityError",
    "DegenerateMechanismError",
    "DensityModel",
    "DomainError",
    "FeasibilityReport",
    "ImplementationBundle",
    "InfeasiblePairError",
    "InfeasibleSlopeError",
    "Mechanism",
    "MenuOption",
    "NonConvergenceError",
    "OrdealLabError",
    "PWLConvex",
    "ScenarioError",
    "SolverError",
    "SteadyStateError",
    "ValidationError",
    "SearchResult",
    "SimConfig",
    "SimTrajectory",
    "StepProfile",
    "SweepResult",
    "SweepRow",
    "WaitMechanism",
    "WaitOption",
    "WeightedModel",
    "best_option",
    "brute_force_best_UA",
    "c_scale",
    "check_assumption1",
    "check_feasible_pair",
    "check_weighted_condition",
    "choose_good",
    "demand",
    "direct_welfare",
    "efficiency",
    "errors",
    "example1_compare",
    "expected_discount",
    "extract_boundary",
    "hetero_transform",
    "implementation_bundle",
    "indirect_utility",
    "line_hull",
    "load_grid_csv",
    "local_boundary_search",
    "m_profile",
    "market_clearing_ordeals",
    "mechanism_from",
    "merged_breaks",
    "objective_wr",
    "optimal_UA",
    "option_masses",
    "pair_slope_grid",
    "response_curve",
    "revenue",
    "save_grid_csv",
    "simulate",
    "single_good_compare",
    "slope_sweep",
    "static_equivalent",
    "stationarity_diagnostic",
    "steady_state_check",
    "supply_masses",
    "supply_preserving_linear",
    "theorem1_mechanism",
    "ub_from",
    "weighted_rates",
    "wstar_welfare",
]
