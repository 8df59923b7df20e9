"""Carbon tax and cap-and-trade equilibrium solver."""

from ._core import (
    CalibrationError,
    CompanyParams,
    DomainError,
    EmissionDistribution,
    InfeasibleError,
    ScenarioError,
    SolverError,
    bau_outcome,
    bundled_scenarios,
    calibrate_tau,
    compare,
    equilibrium_spot,
    market_optimum,
    report,
    scenario_portfolio,
    solve,
    tax_optimum,
    verify,
)

__all__ = [
    "CalibrationError",
    "CompanyParams",
    "DomainError",
    "EmissionDistribution",
    "InfeasibleError",
    "ScenarioError",
    "SolverError",
    "bau_outcome",
    "bundled_scenarios",
    "calibrate_tau",
    "compare",
    "equilibrium_spot",
    "market_optimum",
    "report",
    "scenario_portfolio",
    "solve",
    "tax_optimum",
    "verify",
]
