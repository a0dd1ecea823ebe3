"""Simulation and analysis of secret key agreement with a randomly excited ring antenna."""

from .antenna import RingAntenna, diagram_statistics, evaluate_diagram, sample_excitation
from .channel import Geometry, Receiver, simulate_link, trace_rays
from .errors import ContractViolation, DegenerateInputError, EmptyKeyError, InfeasibleError
from .functionals import FunctionalKind
from .keygen import SelectionKind, bit_randomness_tests, hash_key, select_method1, select_method2
from .optimizer import OptimizationProblem, optimize
from .protocol import plan_protocol, run_protocol
from .security import (decoding_error_bound, gallager_E0, gallager_exponent, min_check_bits,
                       pa_leakage_bound, renyi_information, security_budget)
from .sources import PhysicalSource, SyntheticSource
from .stats import pe_closed_form, pe_monte_carlo

__version__ = "0.1.0"

__all__ = [
    "RingAntenna",
    "diagram_statistics",
    "evaluate_diagram",
    "sample_excitation",
    "Geometry",
    "Receiver",
    "simulate_link",
    "trace_rays",
    "ContractViolation",
    "DegenerateInputError",
    "EmptyKeyError",
    "InfeasibleError",
    "FunctionalKind",
    "SelectionKind",
    "bit_randomness_tests",
    "hash_key",
    "select_method1",
    "select_method2",
    "OptimizationProblem",
    "optimize",
    "plan_protocol",
    "run_protocol",
    "decoding_error_bound",
    "gallager_E0",
    "gallager_exponent",
    "min_check_bits",
    "pa_leakage_bound",
    "renyi_information",
    "security_budget",
    "PhysicalSource",
    "SyntheticSource",
    "pe_closed_form",
    "pe_monte_carlo",
]
