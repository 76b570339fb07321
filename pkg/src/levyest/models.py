"""Model descriptions for the Levy processes that can be simulated and used as oracles.

A model is ``L_t = b0 t + sigma W_t + J_t`` where ``J`` is one of the jump parts
below.  All jump parts are immutable dataclasses so that a :class:`ModelSpec`
can be hashed, compared and passed between threads.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

from .errors import ParameterError


def _positive(name: str, value: float) -> None:
    if not (math.isfinite(value) and value > 0):
        raise ParameterError(f"{name} must be positive and finite, got {value!r}")


# -- jump size laws for compound Poisson parts ---------------------------------


@dataclass(frozen=True)
class Gaussian:
    mean: float = 0.0
    sd: float = 1.0

    def __post_init__(self):
        _positive("sd", self.sd)
        if not math.isfinite(self.mean):
            raise ParameterError("mean must be finite")


@dataclass(frozen=True)
class Exponential:
    rate: float = 1.0

    def __post_init__(self):
        _positive("rate", self.rate)


@dataclass(frozen=True)
class BetaRescaled:
    """``lo + (hi - lo) * Beta(a, b)``."""

    a: float = 3.0
    b: float = 3.0
    lo: float = -4.0
    hi: float = 4.0

    def __post_init__(self):
        _positive("a", self.a)
        _positive("b", self.b)
        if not (math.isfinite(self.lo) and math.isfinite(self.hi) and self.lo < self.hi):
            raise ParameterError(f"need lo < hi, got lo={self.lo}, hi={self.hi}")


JumpLaw = Union[Gaussian, Exponential, BetaRescaled]


def jump_law_is_positive(law: JumpLaw) -> bool:
    if isinstance(law, Exponential):
        return True
    if isinstance(law, BetaRescaled):
        return law.lo >= 0
    return False


# -- jump parts ------------------------------------------------------------------


@dataclass(frozen=True)
class CompoundPoisson:
    intensity: float
    jump_law: JumpLaw = field(default_factory=Gaussian)

    def __post_init__(self):
        _positive("intensity", self.intensity)
        if not isinstance(self.jump_law, (Gaussian, Exponential, BetaRescaled)):
            raise ParameterError(f"unknown jump law {self.jump_law!r}")


@dataclass(frozen=True)
class LevyGamma:
    """Gamma subordinator: increments over ``t`` are Gamma(beta t, rate alpha)."""

    beta: float = 1.0
    alpha: float = 1.0

    def __post_init__(self):
        _positive("beta", self.beta)
        _positive("alpha", self.alpha)


@dataclass(frozen=True)
class BilateralGamma:
    """Difference of two independent Levy-Gamma processes, (beta, alpha) minus (beta2, alpha2)."""

    beta: float = 1.0
    alpha: float = 1.0
    beta2: float = 1.0
    alpha2: float = 1.0

    def __post_init__(self):
        for name in ("beta", "alpha", "beta2", "alpha2"):
            _positive(name, getattr(self, name))


@dataclass(frozen=True)
class SubordinatorPower:
    """Subordinator with Levy density ``beta x^(delta - 3/2) exp(-alpha x)`` on x > 0.

    ``delta = 1/2`` is the Levy-Gamma process, ``delta = 0`` the inverse Gaussian one.
    """

    beta: float = 1.0
    alpha: float = 1.0
    delta: float = 0.0

    def __post_init__(self):
        _positive("beta", self.beta)
        _positive("alpha", self.alpha)
        if not (math.isfinite(self.delta) and self.delta > -0.5):
            raise ParameterError(f"delta must exceed -1/2, got {self.delta!r}")


Subordinator = Union[LevyGamma, SubordinatorPower, CompoundPoisson]


@dataclass(frozen=True)
class SubordinatedBM:
    """``B_{Gamma_t}`` for a Brownian motion B and an independent subordinator Gamma."""

    subordinator: Subordinator = field(default_factory=LevyGamma)

    def __post_init__(self):
        sub = self.subordinator
        if isinstance(sub, CompoundPoisson):
            if not jump_law_is_positive(sub.jump_law):
                raise ParameterError("compound Poisson subordinator needs positive jumps")
        elif not isinstance(sub, (LevyGamma, SubordinatorPower)):
            raise ParameterError(f"{sub!r} is not a subordinator")


JumpPart = Union[CompoundPoisson, LevyGamma, BilateralGamma, SubordinatorPower, SubordinatedBM, None]


@dataclass(frozen=True)
class ModelSpec:
    drift_b0: float = 0.0
    sigma: float = 0.0
    jump_part: JumpPart = None

    def __post_init__(self):
        if not math.isfinite(self.drift_b0):
            raise ParameterError("drift_b0 must be finite")
        if not (math.isfinite(self.sigma) and self.sigma >= 0):
            raise ParameterError(f"sigma must be nonnegative, got {self.sigma!r}")
        allowed = (CompoundPoisson, LevyGamma, BilateralGamma, SubordinatorPower, SubordinatedBM)
        if self.jump_part is not None and not isinstance(self.jump_part, allowed):
            raise ParameterError(f"unknown jump part {self.jump_part!r}")

    def describe(self) -> str:
        return f"b0={self.drift_b0:g}, sigma={self.sigma:g}, jumps={self.jump_part!r}"
