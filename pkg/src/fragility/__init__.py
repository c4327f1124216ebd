"""Mean-field engine for a two-state financial-fragility economy.

Three layers over one model: firm-level calibration of switching and
failure probabilities, exact simulation and distribution-level
integration of the resulting one-step jump process, and closed-form
equilibrium analysis (drift, fluctuations, least-biased shares, failure
hazard). The layers are built to agree with each other, and the test
suite checks that they do.
"""

from .asymptotics import (
    MacroPath,
    SteadyState,
    aggregate_output,
    drift_solution,
    gaussian_approximation,
    macro_path,
    macro_rhs,
    spread_stationary_variance,
    stationary_drift,
    stationary_output,
    steady_state,
)
from .cli import ScenarioConfig, parse_config, run_scenario
from .equilibrium import (
    EquilibriumReport,
    conditional_hazard,
    entropy_shares,
    equilibrium_report,
    gibbs_apriori,
    gibbs_share_symmetric,
    hazard_cdf_and_rate,
    maxent_beta,
    outcome_gap,
    potential,
    potential_minimum,
)
from .errors import ConfigError, ConvergenceError, DegenerateModelError
from .jump_process import EnsembleStats, Trajectory, run_ensemble, simulate_trajectory
from .master_equation import (
    MasterPath,
    ProbabilityVector,
    binomial_pmf,
    integrate,
    lead_lag_rhs_check,
    me_rhs,
    moments,
    stationary_detailed_balance,
)
from .model_core import (
    CalibratedRates,
    ModelParams,
    calibrate,
    intensive_rates,
    robust_output,
    solve_fragile_output,
)

__version__ = "0.1.0"

__all__ = [
    "CalibratedRates",
    "ConfigError",
    "ConvergenceError",
    "DegenerateModelError",
    "EnsembleStats",
    "EquilibriumReport",
    "MacroPath",
    "MasterPath",
    "ModelParams",
    "ProbabilityVector",
    "ScenarioConfig",
    "SteadyState",
    "Trajectory",
    "aggregate_output",
    "binomial_pmf",
    "calibrate",
    "conditional_hazard",
    "drift_solution",
    "entropy_shares",
    "equilibrium_report",
    "gaussian_approximation",
    "gibbs_apriori",
    "gibbs_share_symmetric",
    "hazard_cdf_and_rate",
    "integrate",
    "intensive_rates",
    "lead_lag_rhs_check",
    "macro_path",
    "macro_rhs",
    "maxent_beta",
    "me_rhs",
    "moments",
    "outcome_gap",
    "parse_config",
    "potential",
    "potential_minimum",
    "robust_output",
    "run_ensemble",
    "run_scenario",
    "simulate_trajectory",
    "solve_fragile_output",
    "spread_stationary_variance",
    "stationary_detailed_balance",
    "stationary_drift",
    "stationary_output",
    "steady_state",
]
