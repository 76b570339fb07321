"""Nonparametric estimation of Levy densities from high-frequency increments."""
from .errors import DomainError, InputError, LevyEstError, ParameterError, UnsupportedModelError
from .models import (
    BetaRescaled,
    BilateralGamma,
    CompoundPoisson,
    Exponential,
    Gaussian,
    LevyGamma,
    ModelSpec,
    SubordinatedBM,
    SubordinatorPower,
)
from .sim import SampleIncrements, SeedSpec, simulate_increments

__version__ = "0.1.0"
