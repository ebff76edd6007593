"""Decentralized LQ control of discrete-time linear systems under three
information patterns: full state feedback, input sharing, and strictly
private input / measurement information."""

from .cost import (CostReport, GapWeights, exact_decentralized_cost, gap_weights,
                   optimality_certificate, trajectory_cost)
from .errors import (AssumptionError, CertificationError, ConvergenceError,
                     DimensionError, ObservabilityError, ScenarioError,
                     StabilityError)
from .gain_synthesis import (METHOD_GIVEN, METHOD_POLE_PLACEMENT,
                             METHOD_RANDOM_SEARCH, SynthesisResult,
                             certify_gains, synthesize)
from .linalg import (Spectrum, eigenvalues, is_schur_stable, observability_matrix,
                     operator_norm, place_observer_poles, solve_dlyap,
                     spectral_radius, spectrum, transient_growth_constant)
from .model import (Diagnostic, InformationPattern, PlantModel, StackedForm,
                    psd_sqrt, stack, validate)
from .observers import (ObserverScheme, ObserverState, build_scheme,
                        control_from_estimates, coupling_matrix,
                        input_sharing_error_matrix, observer_step_input_sharing,
                        observer_step_private, private_error_matrix,
                        two_agent_private_error_matrix)
from .riccati import RiccatiSolution, closed_loop_matrix, optimal_cost, solve_dare
from .sim import SimTrace, simulate

__version__ = "0.1.0"

__all__ = [
    "AssumptionError", "CertificationError", "ConvergenceError", "CostReport",
    "Diagnostic", "DimensionError", "GapWeights", "InformationPattern",
    "METHOD_GIVEN", "METHOD_POLE_PLACEMENT", "METHOD_RANDOM_SEARCH",
    "ObservabilityError", "ObserverScheme", "ObserverState", "PlantModel",
    "RiccatiSolution", "ScenarioError", "SimTrace", "Spectrum", "StabilityError",
    "StackedForm", "SynthesisResult", "build_scheme", "certify_gains",
    "closed_loop_matrix", "control_from_estimates", "coupling_matrix",
    "eigenvalues", "exact_decentralized_cost", "gap_weights",
    "input_sharing_error_matrix", "is_schur_stable", "observability_matrix",
    "observer_step_input_sharing", "observer_step_private", "operator_norm",
    "optimal_cost", "optimality_certificate", "place_observer_poles",
    "private_error_matrix", "psd_sqrt", "simulate", "solve_dare", "solve_dlyap",
    "spectral_radius", "spectrum", "stack", "synthesize", "trajectory_cost",
    "transient_growth_constant", "two_agent_private_error_matrix", "validate",
]
