"""Numerical toolkit for an election game with a biased news outlet that pays to misreport."""

from .communication import (
    Case,
    GenericEquilibrium,
    PoolingStructure,
    ReportingOutcome,
    ballot,
    challenger_cutoff,
    classify_many,
    classify_outcome,
    generic_equilibrium,
    generic_rule,
    lambda_bounds,
    misreporting_bounds,
    pooling_structure,
    reporting_rule,
)
from .errors import ConfigError, DomainError, NewsgameError, SearchError
from .model import (
    C,
    I,
    Candidate,
    ModelParams,
    PolicyPair,
    Thresholds,
    conflict_set,
    endorsed_candidate,
    full_persuasion_condition,
    full_persuasion_threshold,
    outlet_utility,
    thresholds,
    validate_params,
    voter_utility,
)
from .oracle import VerificationReport, grid_best_response, quadrature_welfare, verify_equilibrium
from .policy import (
    EquilibriumProfile,
    Regime,
    best_response,
    equilibrium_policies,
    existence_condition,
    no_pure_equilibrium_check,
    simultaneous_convergence_check,
)
from .simulate import SimulationConfig, SimulationSummary, simulate
from .welfare import (
    NuExtensionParams,
    WelfareReport,
    challenger_regulation,
    complete_info_welfare,
    incumbent_regulation,
    iota,
    no_media_comparison,
    nu_extension_optimum,
    welfare,
)

__version__ = "0.1.0"
