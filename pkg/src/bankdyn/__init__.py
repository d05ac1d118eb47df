"""Deposit/loan dynamics of a Monti-Klein bank and Indonesian-style reserve requirements."""

__version__ = "0.1.0"

from .config import RunConfig, dump_config, load_config, parse_config
from .integrator import IntegratorConfig, SingularEvent, Trajectory, integrate, refine_event, resample, step_rk4
from .model import (
    BalanceSheet,
    BankState,
    LocusCoefficients,
    ModelParams,
    RateSet,
    SinusoidalRate,
    alpha_deposit,
    alpha_loan,
    balance_sheet,
    classify_region,
    cost,
    cost_marginal,
    equilibrium_residual,
    interbank_position,
    profit_reduced,
    profit_structural,
    rate_derivative,
    rate_value,
    singularity_loci,
    vector_field,
)
from .regulation import RegulationParams, ReserveReport, gwm_ldr, ldr, reserve_series, reserves
from .scenario import (
    BehaviorDiagnosis,
    ScenarioResult,
    ScenarioSet,
    build_set,
    compare_sets,
    diagnose_behavior,
    run_set,
)
