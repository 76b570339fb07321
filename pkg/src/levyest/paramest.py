"""Moment and power-variation estimators of the drift, moment functionals and sigma."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .errors import ParameterError
from .sim import SampleIncrements


@dataclass
class ParamEstimates:
    b_hat: float
    c_hat: dict = field(default_factory=dict)
    sigma_hat: dict = field(default_factory=dict)


def estimate_b(sample: SampleIncrements) -> float:
    """``(1/(n delta)) sum Z_k``, an estimate of ``E L_1``."""
    return float(np.sum(sample.z) / (sample.n * sample.delta))


def estimate_c_ell(sample: SampleIncrements, ell: int) -> float:
    """``(1/(n delta)) sum Z_k^ell`` (signed powers)."""
    if int(ell) != ell or ell < 2:
        raise ParameterError(f"ell must be an integer >= 2, got {ell!r}")
    return float(np.sum(sample.z ** int(ell)) / (sample.n * sample.delta))


def gaussian_abs_moment(r: float) -> float:
    """``E|X|^r`` for standard normal X: ``2^(r/2) Gamma((r+1)/2) / sqrt(pi)``."""
    if not r > 0:
        raise ParameterError(f"r must be positive, got {r!r}")
    return math.exp(0.5 * r * math.log(2.0) + gammaln(0.5 * (r + 1)) - 0.5 * math.log(math.pi))


def estimate_sigma_power_variation(sample: SampleIncrements, r: float) -> tuple[float, float]:
    """Power-variation estimate of sigma.

    Returns ``(sigma_r, sigma)`` where ``sigma_r = sum |Z_k|^r / (m_r n delta^(r/2))``
    estimates ``sigma^r`` and ``sigma = sigma_r^(1/r)``.  Intended for
    ``0 < r < 1``; ``r = 1`` is accepted with a warning since that estimator
    carries an asymptotic bias.
    """
    if not 0 < r <= 1:
        raise ParameterError(f"r must lie in (0, 1], got {r!r}")
    if r == 1:
        warnings.warn("r = 1 power variation is consistent but asymptotically biased", stacklevel=2)
    scale = math.exp(0.5 * r * math.log(sample.delta))
    sigma_r = float(np.sum(np.abs(sample.z) ** r) / (gaussian_abs_moment(r) * sample.n * scale))
    return sigma_r, sigma_r ** (1.0 / r)


def estimate_params(sample: SampleIncrements, ells=(2, 3), rs=(0.5, 0.25)) -> ParamEstimates:
    return ParamEstimates(
        b_hat=estimate_b(sample),
        c_hat={int(ell): estimate_c_ell(sample, ell) for ell in ells},
        sigma_hat={float(r): estimate_sigma_power_variation(sample, r)[1] for r in rs},
    )
