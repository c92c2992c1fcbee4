"""Interval observers for LTI systems via observability decomposition."""
from .config import design_bundle, from_document, load_config, preset
from .decomposition import decompose, verify_decomposition
from .jordan import build_transform, transform_at
from .linalg import interval_image, solve_sylvester
from .model import LtiSystem, Scenario, TimeDomain, UncertaintyBounds, validate_scenario
from .observer import CascadeObserver, DirectObserver, make_observer, synthesize
from .signals import parse_signal, vector_signal
from .simulation import SimulationConfig, monte_carlo, run_pipeline, simulate_plant
from .sylvester import build_design

__version__ = "0.1.0"

__all__ = [
    "CascadeObserver",
    "DirectObserver",
    "LtiSystem",
    "Scenario",
    "SimulationConfig",
    "TimeDomain",
    "UncertaintyBounds",
    "build_design",
    "build_transform",
    "decompose",
    "design_bundle",
    "from_document",
    "interval_image",
    "load_config",
    "make_observer",
    "monte_carlo",
    "parse_signal",
    "preset",
    "run_pipeline",
    "simulate_plant",
    "solve_sylvester",
    "synthesize",
    "transform_at",
    "validate_scenario",
    "vector_signal",
    "verify_decomposition",
]
