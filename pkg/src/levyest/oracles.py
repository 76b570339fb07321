"""Analytic ground truth for the supported models.

Levy densities ``n(x)``, the targets ``g = x n``, ``h = x^2 n``, ``p = x^3 n``,
their Fourier transforms ``f*(u) = int e^{iux} f(x) dx`` and the moment
functionals ``c_l = int x^l n(x) dx``.  Only the jump part of a model enters
the targets; sigma enters ``c_2`` and the drift enters ``b``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special, stats

from .errors import DomainError, UnsupportedModelError
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

_POWERS = {"g": 1, "h": 2, "p": 3}


def target_power(target) -> int:
    """Accepts 'g'/'h'/'p', an integer power, or an :class:`~levyest.npest.Estimator`."""
    if isinstance(target, (int, np.integer)) and not isinstance(target, bool):
        if target not in (1, 2, 3):
            raise DomainError(f"target power must be 1, 2 or 3, got {target}")
        return int(target)
    letter = getattr(target, "target", None) or str(target).lower()[:1]
    try:
        return _POWERS[letter]
    except KeyError:
        raise DomainError(f"unknown target {target!r}") from None


def _jump_part(model):
    return model.jump_part if isinstance(model, ModelSpec) else model


# -- jump laws ---------------------------------------------------------------------------


def _law_pdf(law, x):
    if isinstance(law, Gaussian):
        return stats.norm.pdf(x, loc=law.mean, scale=law.sd)
    if isinstance(law, Exponential):
        return np.where(x >= 0, law.rate * np.exp(-law.rate * np.maximum(x, 0)), 0.0)
    if isinstance(law, BetaRescaled):
        return stats.beta.pdf(x, law.a, law.b, loc=law.lo, scale=law.hi - law.lo)
    raise UnsupportedModelError(f"unknown jump law {law!r}")


def _law_support(law):
    if isinstance(law, Gaussian):
        return law.mean - 40 * law.sd, law.mean + 40 * law.sd
    if isinstance(law, Exponential):
        return 0.0, 60.0 / law.rate
    return law.lo, law.hi


def _law_moment(law, ell: int) -> float:
    if isinstance(law, Gaussian):
        return float(stats.norm.moment(ell, loc=law.mean, scale=law.sd))
    if isinstance(law, Exponential):
        return math.factorial(ell) / law.rate ** ell
    if isinstance(law, BetaRescaled):
        # binomial expansion of (lo + w B)^ell with E B^j = prod_{r<j} (a + r) / (a + b + r)
        w = law.hi - law.lo
        total, beta_moment = 0.0, 1.0
        for j in range(ell + 1):
            total += math.comb(ell, j) * law.lo ** (ell - j) * w ** j * beta_moment
            beta_moment *= (law.a + j) / (law.a + law.b + j)
        return total
    raise UnsupportedModelError(f"unknown jump law {law!r}")


def _law_weighted_cf(law, ell: int, u: np.ndarray) -> np.ndarray:
    """``E[Y^ell e^{iuY}]``."""
    if isinstance(law, Gaussian):
        a = 1j * law.mean - law.sd ** 2 * u
        s2 = law.sd ** 2
        phi = np.exp(1j * law.mean * u - 0.5 * s2 * u * u)
        if ell == 0:
            return phi
        if ell == 1:
            return -1j * a * phi
        if ell == 2:
            return -(a * a - s2) * phi
        return 1j * (a ** 3 - 3 * s2 * a) * phi
    if isinstance(law, Exponential):
        lam = law.rate
        return lam * math.factorial(ell) / (lam - 1j * u) ** (ell + 1)
    lo, hi = _law_support(law)
    return _numerical_ft(lambda y: y ** ell * _law_pdf(law, y), u, lo, hi)


def _numerical_ft(f, u, lo, hi) -> np.ndarray:
    """Adaptive quadrature of ``int_lo^hi e^{iux} f(x) dx`` for every ``u``."""
    u = np.atleast_1d(np.asarray(u, dtype=float))

    def integrand(x):
        fx = f(x)
        return np.concatenate([np.cos(u * x) * fx, np.sin(u * x) * fx])

    val, _ = integrate.quad_vec(integrand, lo, hi, epsabs=1e-12, epsrel=1e-10, limit=2000)
    return val[:u.size] + 1j * val[u.size:]


# -- subordinators ---------------------------------------------------------------------------


def _sub_power_params(sub):
    if isinstance(sub, LevyGamma):
        return sub.beta, sub.alpha, 0.5
    if isinstance(sub, SubordinatorPower):
        return sub.beta, sub.alpha, sub.delta
    return None


def _sub_laplace_moment(sub, k: int, s) -> np.ndarray:
    """``int gamma^k e^{-s gamma} n_Gamma(gamma) d gamma`` for ``k >= 1`` and ``s >= 0``."""
    s = np.asarray(s, dtype=float)
    params = _sub_power_params(sub)
    if params is not None:
        beta, alpha, delta = params
        expo = k + delta - 0.5
        return beta * special.gamma(expo) / (alpha + s) ** expo
    if isinstance(sub, CompoundPoisson):
        law = sub.jump_law
        if isinstance(law, Exponential):
            lam = law.rate
            return sub.intensity * lam * math.factorial(k) / (lam + s) ** (k + 1)
        lo, hi = _law_support(law)
        flat = np.atleast_1d(s).ravel()
        val, _ = integrate.quad_vec(
            lambda y: y ** k * np.exp(-flat * y) * _law_pdf(law, y), lo, hi, epsabs=1e-13, epsrel=1e-11)
        return sub.intensity * val.reshape(s.shape)
    raise UnsupportedModelError(f"{sub!r} is not a subordinator")


def _sub_density(sub, x: np.ndarray) -> np.ndarray:
    params = _sub_power_params(sub)
    if params is not None:
        beta, alpha, delta = params
        xs = np.where(x > 0, x, 1.0)
        return np.where(x > 0, beta * xs ** (delta - 1.5) * np.exp(-alpha * xs), 0.0)
    return sub.intensity * _law_pdf(sub.jump_law, x)


def levy_density_by_subordination(sub, x) -> np.ndarray:
    """``int_0^inf exp(-x^2/(2g)) / sqrt(2 pi g) n_Gamma(g) dg`` by adaptive quadrature."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty(x.size)
    for i, xi in enumerate(x):
        if xi == 0:
            raise DomainError("Levy density is not defined at x = 0")

        def f(g, xi=xi):
            return math.exp(-xi * xi / (2 * g)) / math.sqrt(2 * math.pi * g) * float(_sub_density(sub, np.array(g)))

        # split at the peak of the Gaussian factor to help the adaptive rule
        mid = xi * xi
        a, _ = integrate.quad(f, 0, mid, epsabs=0, epsrel=1e-13, limit=500)
        b, _ = integrate.quad(f, mid, np.inf, epsabs=0, epsrel=1e-13, limit=500)
        out[i] = a + b
    return out


# -- public oracle API ---------------------------------------------------------------------


def levy_density(model, x) -> np.ndarray:
    """Levy density of the model's jump part at ``x`` (``x = 0`` is rejected)."""
    part = _jump_part(model)
    x = np.asarray(x, dtype=float)
    if np.any(x == 0):
        raise DomainError("Levy density is not defined at x = 0")
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    if part is None:
        out = np.zeros_like(x)
    elif isinstance(part, CompoundPoisson):
        out = part.intensity * _law_pdf(part.jump_law, x)
    elif isinstance(part, (LevyGamma, SubordinatorPower)):
        out = _sub_density(part, x)
    elif isinstance(part, BilateralGamma):
        ax = np.abs(x)
        out = np.where(x > 0, part.beta * np.exp(-part.alpha * ax), part.beta2 * np.exp(-part.alpha2 * ax)) / ax
    elif isinstance(part, SubordinatedBM):
        params = _sub_power_params(part.subordinator)
        if params is None:
            out = levy_density_by_subordination(part.subordinator, x)
        else:
            beta, alpha, delta = params
            ax = np.abs(x)
            r = math.sqrt(2 * alpha)
            out = 2 * beta / math.sqrt(2 * math.pi) * special.kv(delta - 1, r * ax) * (ax / r) ** (delta - 1)
    else:
        raise UnsupportedModelError(f"no Levy density for {part!r}")
    return float(out[0]) if scalar else out


def true_target(model, target, x) -> np.ndarray:
    """``x^l n(x)`` with the value at ``x = 0`` set to 0."""
    ell = target_power(target)
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    out = np.zeros_like(x)
    nz = x != 0
    out[nz] = x[nz] ** ell * levy_density(model, x[nz])
    return float(out[0]) if scalar else out


def true_fourier(model, target, u) -> np.ndarray:
    """``f*(u) = int e^{iux} x^l n(x) dx``; closed form where available, adaptive quadrature otherwise."""
    ell = target_power(target)
    part = _jump_part(model)
    u = np.asarray(u, dtype=float)
    scalar = u.ndim == 0
    u = np.atleast_1d(u)
    if part is None:
        out = np.zeros(u.shape, dtype=complex)
    elif isinstance(part, CompoundPoisson):
        out = part.intensity * _law_weighted_cf(part.jump_law, ell, u)
    elif isinstance(part, (LevyGamma, SubordinatorPower)):
        beta, alpha, delta = _sub_power_params(part)
        expo = ell + delta - 0.5
        if expo <= 0:
            raise UnsupportedModelError(f"x^{ell} n(x) is not integrable for delta={delta}")
        out = beta * special.gamma(expo) / (alpha - 1j * u) ** expo
    elif isinstance(part, BilateralGamma):
        g = special.gamma(ell)
        out = part.beta * g / (part.alpha - 1j * u) ** ell + (-1) ** ell * part.beta2 * g / (part.alpha2 + 1j * u) ** ell
    elif isinstance(part, SubordinatedBM):
        sub = part.subordinator
        s = 0.5 * u * u
        if ell == 1:
            out = 1j * u * _sub_laplace_moment(sub, 1, s)
        elif ell == 2:
            out = _sub_laplace_moment(sub, 1, s) - u * u * _sub_laplace_moment(sub, 2, s)
        else:
            out = 1j * (3 * u * _sub_laplace_moment(sub, 2, s) - u ** 3 * _sub_laplace_moment(sub, 3, s))
        out = np.asarray(out, dtype=complex)
    else:
        raise UnsupportedModelError(f"no Fourier oracle for {part!r}")
    return complex(out[0]) if scalar else out


@dataclass
class TrueMoments:
    b: float
    c: dict = field(default_factory=dict)

    @property
    def c2(self) -> float:
        return self.c[2]


def _jump_moment(part, ell: int) -> float:
    if part is None:
        return 0.0
    if isinstance(part, CompoundPoisson):
        return part.intensity * _law_moment(part.jump_law, ell)
    if isinstance(part, (LevyGamma, SubordinatorPower)):
        return float(_sub_laplace_moment(part, ell, 0.0))
    if isinstance(part, BilateralGamma):
        g = math.gamma(ell)
        return part.beta * g / part.alpha ** ell + (-1) ** ell * part.beta2 * g / part.alpha2 ** ell
    if isinstance(part, SubordinatedBM):
        if ell % 2:
            return 0.0
        double_fact = float(special.factorial2(ell - 1))
        return double_fact * float(_sub_laplace_moment(part.subordinator, ell // 2, 0.0))
    raise UnsupportedModelError(f"no moments for {part!r}")


def true_moments(model: ModelSpec, max_ell: int = 6) -> TrueMoments:
    """``b = b0 + int x n``, ``c_2 = sigma^2 + int x^2 n`` and ``c_l = int x^l n`` for ``3 <= l <= max_ell``."""
    part = model.jump_part
    c = {ell: _jump_moment(part, ell) for ell in range(2, max_ell + 1)}
    c[2] += model.sigma ** 2
    return TrueMoments(b=model.drift_b0 + _jump_moment(part, 1), c=c)
