"""Bayesian MAP learning in a two-player inventory competition game."""
from .belief import Belief, LikelihoodRow, belief_init, belief_update, likelihood_row, loglik_profile, map_estimate
from .equilibrium import (
    ActionGrid,
    ContractionReport,
    ForbiddenRegion,
    Interval,
    NashNotFound,
    OracleDisagreement,
    action_grid,
    best_response,
    br_fractile_check,
    contraction_report,
    forbidden_region,
    full_supports,
    nash_solve,
    phi_compose,
)
from .game import (
    DemandGrid,
    GameParams,
    PlayerParams,
    TotalDemandDist,
    expected_utility,
    payoff_realized,
    sales_realize,
    sample_demand,
    total_demand_dist,
)
from .simulator import (
    PlayerState,
    SimulationConfig,
    StageRecord,
    Trajectory,
    convergence_metric,
    run_simulation,
    stage_advance,
    trailing_means,
)


def example1(delta: float = 0.01) -> GameParams:
    """Symmetric prices, asymmetric costs, uniform[0, 1] demands, full spillover."""
    return GameParams(
        PlayerParams(r=4.0, h=0.6, c=2.0, alpha=1.0),
        PlayerParams(r=4.0, h=0.6, c=1.0, alpha=1.0),
        DemandGrid.uniform(1.0, delta),
        DemandGrid.uniform(1.0, delta),
    )
