"""pricing-dynamics: market-clearing prices by stochastic first-order dynamics."""

__version__ = "0.1.0"

from .config import Config, get_config, set_config  # noqa: E402
from .dynamics import Algorithm, DynamicsConfig, RunTrace, run_dynamics  # noqa: E402
from .experiments import ExperimentSpec, compare, estimate_optimum  # noqa: E402
from .market import MarketInstance, NestStructure, SupplierSpec, generate_synthetic, load_instance  # noqa: E402
from .oracles import (  # noqa: E402
    GradientSample,
    PopulationModel,
    exact_agent_oracle,
    full_gradient,
    lipschitz_constants,
    population_oracle,
    potential,
    sampled_oracle,
    uniform_agent,
)
from .supplier import smooth  # noqa: E402

__all__ = [
    "Algorithm",
    "Config",
    "DynamicsConfig",
    "ExperimentSpec",
    "GradientSample",
    "MarketInstance",
    "NestStructure",
    "PopulationModel",
    "RunTrace",
    "SupplierSpec",
    "compare",
    "estimate_optimum",
    "exact_agent_oracle",
    "full_gradient",
    "generate_synthetic",
    "get_config",
    "lipschitz_constants",
    "load_instance",
    "population_oracle",
    "potential",
    "run_dynamics",
    "sampled_oracle",
    "set_config",
    "smooth",
    "uniform_agent",
]
