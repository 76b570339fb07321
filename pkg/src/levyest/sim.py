"""Exact simulation of Levy increments ``Z_k = L_{k delta} - L_{(k-1) delta}``.

Every random draw goes through a :class:`numpy.random.Generator` built on the
counter-based Philox bit generator, keyed by ``(master_seed, stream_id)``.  The
order of draws inside :func:`simulate_increments` is fixed, so identical inputs
give bit-identical output.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, ParameterError, UnsupportedModelError
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


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int = 0
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        if self.master_seed < 0 or self.stream_id < 0:
            raise ParameterError("seeds must be nonnegative integers")
        seq = np.random.SeedSequence(entropy=int(self.master_seed), spawn_key=(int(self.stream_id),))
        return np.random.Generator(np.random.Philox(seq))


@dataclass(frozen=True, eq=False)
class SampleIncrements:
    """An ordered batch of increments sampled at a common step ``delta``."""

    z: np.ndarray
    delta: float

    def __post_init__(self):
        z = np.ascontiguousarray(self.z, dtype=np.float64)
        if z.ndim != 1 or z.size == 0:
            raise InputError("a sample needs at least one increment")
        if not np.all(np.isfinite(z)):
            raise InputError("increments must be finite")
        if not (math.isfinite(self.delta) and self.delta > 0):
            raise InputError(f"delta must be positive, got {self.delta!r}")
        z.setflags(write=False)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "delta", float(self.delta))

    @property
    def n(self) -> int:
        return self.z.size

    def __len__(self) -> int:
        return self.z.size

    def __eq__(self, other):
        if not isinstance(other, SampleIncrements):
            return NotImplemented
        return self.delta == other.delta and np.array_equal(self.z, other.z)


# -- primitive samplers ------------------------------------------------------------


def _gamma_shape_ge1(shape: float, size: int, rng: np.random.Generator) -> np.ndarray:
    # Marsaglia-Tsang squeeze/rejection, vectorised over the pending draws
    d = shape - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    out = np.empty(size)
    pending = np.arange(size)
    while pending.size:
        k = pending.size
        x = rng.standard_normal(k)
        u = rng.random(k)
        v = 1.0 + c * x
        ok = v > 0
        v = np.where(ok, v * v * v, 1.0)
        with np.errstate(divide="ignore"):
            accept = ok & (np.log(u) < 0.5 * x * x + d - d * v + d * np.log(v))
        out[pending[accept]] = d * v[accept]
        pending = pending[~accept]
    return out


def sample_gamma(shape: float, rate: float, rng: np.random.Generator, size: int) -> np.ndarray:
    """Draw ``size`` Gamma(shape, rate) variates.

    Shapes below one (the usual case, ``shape = beta * delta``) use the boost
    ``Gamma(shape) = Gamma(shape + 1) * U**(1/shape)``, evaluated in log space.
    Results that underflow double precision come out as 0.0.
    """
    if not (shape > 0 and rate > 0 and math.isfinite(shape) and math.isfinite(rate)):
        raise ParameterError(f"gamma parameters must be positive, got shape={shape}, rate={rate}")
    if shape >= 1.0:
        return _gamma_shape_ge1(shape, size, rng) / rate
    g = _gamma_shape_ge1(shape + 1.0, size, rng)
    u = rng.random(size)
    with np.errstate(divide="ignore"):
        log_g = np.log(g) + np.log(u) / shape
    return np.exp(log_g) / rate


def sample_gamma_increment(beta_delta: float, alpha: float, rng: np.random.Generator) -> float:
    """One Gamma(beta_delta, alpha) variate (shape/rate parametrisation)."""
    return float(sample_gamma(beta_delta, alpha, rng, 1)[0])


def sample_inverse_gaussian(mean: float, shape: float, rng: np.random.Generator, size: int) -> np.ndarray:
    """IG(mean, shape) variates by the transformation-with-two-roots method."""
    if not (mean > 0 and shape > 0):
        raise ParameterError("inverse Gaussian parameters must be positive")
    nu = rng.standard_normal(size) ** 2
    mu, lam = mean, shape
    # smaller root of the quadratic, as mu^2 / (larger root) to avoid cancellation
    larger = mu + mu * mu * nu / (2 * lam) + mu / (2 * lam) * np.sqrt(4 * mu * lam * nu + (mu * nu) ** 2)
    x = mu * mu / larger
    u = rng.random(size)
    return np.where(u <= mu / (mu + x), x, mu * mu / x)


def sample_subordinated_bm_increment(subordinator_increment, rng: np.random.Generator):
    """Brownian motion evaluated at a random time: ``sqrt(gamma) * N(0, 1)``.

    Accepts a scalar or an array of subordinator increments.
    """
    g = np.asarray(subordinator_increment, dtype=np.float64)
    if np.any(g < 0) or not np.all(np.isfinite(g)):
        raise ParameterError("subordinator increments must be nonnegative")
    out = np.sqrt(g) * rng.standard_normal(g.shape)
    return float(out) if out.ndim == 0 else out


def _sample_jump_law(law, size: int, rng: np.random.Generator) -> np.ndarray:
    if isinstance(law, Gaussian):
        return law.mean + law.sd * rng.standard_normal(size)
    if isinstance(law, Exponential):
        return sample_gamma(1.0, law.rate, rng, size)
    if isinstance(law, BetaRescaled):
        x = sample_gamma(law.a, 1.0, rng, size)
        y = sample_gamma(law.b, 1.0, rng, size)
        return law.lo + (law.hi - law.lo) * (x / (x + y))
    raise UnsupportedModelError(f"no sampler for jump law {law!r}")


def _compound_poisson(part: CompoundPoisson, n: int, delta: float, rng) -> np.ndarray:
    counts = rng.poisson(part.intensity * delta, n)
    total = int(counts.sum())
    if total == 0:
        return np.zeros(n)
    jumps = _sample_jump_law(part.jump_law, total, rng)
    owner = np.repeat(np.arange(n), counts)
    return np.bincount(owner, weights=jumps, minlength=n)


def _subordinator(part, n: int, delta: float, rng) -> np.ndarray:
    if isinstance(part, LevyGamma):
        return sample_gamma(part.beta * delta, part.alpha, rng, n)
    if isinstance(part, SubordinatorPower):
        if part.delta == 0.5:
            return sample_gamma(part.beta * delta, part.alpha, rng, n)
        if part.delta == 0.0:
            # Laplace exponent 2 beta sqrt(pi) (sqrt(alpha + s) - sqrt(alpha))
            mean = part.beta * math.sqrt(math.pi / part.alpha) * delta
            shape = 2.0 * math.pi * (part.beta * delta) ** 2
            return sample_inverse_gaussian(mean, shape, rng, n)
        raise UnsupportedModelError(
            f"exact increments only for delta in {{0, 1/2}}, got delta={part.delta}")
    if isinstance(part, CompoundPoisson):
        return _compound_poisson(part, n, delta, rng)
    raise UnsupportedModelError(f"{part!r} is not a subordinator")


def jump_increments(part, n: int, delta: float, rng: np.random.Generator) -> np.ndarray:
    """Increments of the pure-jump component over ``n`` steps of length ``delta``."""
    if part is None:
        return np.zeros(n)
    if isinstance(part, CompoundPoisson):
        return _compound_poisson(part, n, delta, rng)
    if isinstance(part, (LevyGamma, SubordinatorPower)):
        return _subordinator(part, n, delta, rng)
    if isinstance(part, BilateralGamma):
        up = sample_gamma(part.beta * delta, part.alpha, rng, n)
        down = sample_gamma(part.beta2 * delta, part.alpha2, rng, n)
        return up - down
    if isinstance(part, SubordinatedBM):
        return sample_subordinated_bm_increment(_subordinator(part.subordinator, n, delta, rng), rng)
    raise UnsupportedModelError(f"cannot simulate {part!r}")


def simulate_increments(model: ModelSpec, n: int, delta: float, seed: SeedSpec) -> SampleIncrements:
    """Simulate ``n`` i.i.d. increments of ``model`` at step ``delta``."""
    if int(n) != n or n < 1:
        raise ParameterError(f"n must be a positive integer, got {n!r}")
    if not (math.isfinite(delta) and delta > 0):
        raise ParameterError(f"delta must be positive, got {delta!r}")
    n = int(n)
    rng = seed.generator()
    z = np.full(n, model.drift_b0 * delta)
    if model.sigma > 0:
        z = z + model.sigma * math.sqrt(delta) * rng.standard_normal(n)
    if model.jump_part is not None:
        z = z + jump_increments(model.jump_part, n, delta, rng)
    return SampleIncrements(z, delta)
