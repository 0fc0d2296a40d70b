"""Profit-maximizing credit limits for transactor card accounts."""

from ._translim import (
    BoundsResult,
    Distribution,
    DistKind,
    DistRole,
    LimitReport,
    ModelParams,
    OptimizationResult,
    Policy,
    SimReport,
    SolveStatus,
    TranslimError,
    balance_derivative,
    decline_probability,
    evaluate_limit,
    expected_balance,
    expected_min,
    expected_profit,
    fit_csv,
    invert,
    newsvendor_limit,
    optimal_limit,
    retrial_bounds,
    revised_limit,
    simulate,
)

__version__ = "0.1.0"
