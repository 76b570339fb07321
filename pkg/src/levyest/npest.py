"""Fourier-domain estimators of g = x n, h = x^2 n and p = x^3 n and their inversion.

Every spectral estimate here is a combination of empirical CF derivatives.  A
state-space estimate at cutoff ``m`` is the inverse Fourier transform of the
spectral estimate restricted to ``[-pi m, pi m]``; it can be computed either by
trapezoid quadrature over the frequency grid or in closed form as a sum of sinc
kernels centred at the observations.  The two routes are kept independent so
each can check the other.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass

import numba
import numpy as np

from .ecf import CfDerivatives, FrequencyGrid, SplitSample, cf_derivatives
from .errors import InputError, ParameterError
from .sim import SampleIncrements

log = logging.getLogger(__name__)

_COVER_RTOL = 1e-9


class Estimator(str, enum.Enum):
    G_BAR = "g_bar"
    H_BAR = "h_bar"
    H_HAT = "h_hat"
    P_BAR = "p_bar"

    @property
    def power(self) -> int:
        return {"g_bar": 1, "h_bar": 2, "h_hat": 2, "p_bar": 3}[self.value]

    @property
    def target(self) -> str:
        """Letter of the estimated function: 'g', 'h' or 'p'."""
        return self.value[0]

    @property
    def cf_order(self) -> int:
        return {"g_bar": 1, "h_bar": 2, "h_hat": 2, "p_bar": 3}[self.value]


class Method(str, enum.Enum):
    SINC_SUM = "sinc_sum"
    QUADRATURE = "quadrature"


@dataclass(frozen=True)
class StateGrid:
    x_min: float = -10.0
    x_max: float = 10.0
    count: int = 500

    def __post_init__(self):
        if self.count < 2 or not self.x_min < self.x_max:
            raise InputError("a state grid needs count >= 2 and x_min < x_max")

    def points(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.count)


@dataclass(frozen=True, eq=False)
class SpectralEstimate:
    grid: FrequencyGrid
    values: np.ndarray
    target: Estimator
    delta: float
    sample_size: int


@dataclass(frozen=True, eq=False)
class DensityEstimate:
    x_grid: StateGrid
    values: np.ndarray
    cutoff_m: float
    target: Estimator
    method: Method


def _spectral(cf: CfDerivatives, values, target: Estimator) -> SpectralEstimate:
    values = np.asarray(values)
    values.setflags(write=False)
    return SpectralEstimate(cf.grid, values, target, cf.delta, cf.sample_size)


def h_bar_star(cf: CfDerivatives) -> SpectralEstimate:
    """``-psi_2(u) / delta``."""
    return _spectral(cf, -cf.order(2) / cf.delta, Estimator.H_BAR)


def p_bar_star(cf: CfDerivatives) -> SpectralEstimate:
    """``i psi_3(u) / delta``."""
    return _spectral(cf, 1j * cf.order(3) / cf.delta, Estimator.P_BAR)


def g_bar_star(cf: CfDerivatives) -> SpectralEstimate:
    """``psi_1(u) / (i delta)``; meant for models without drift or Gaussian part."""
    return _spectral(cf, -1j * cf.order(1) / cf.delta, Estimator.G_BAR)


def h_hat_star(split: SplitSample, grid: FrequencyGrid) -> SpectralEstimate:
    """Two-subsample estimator with the ``psi^2`` denominator replaced by one."""
    if split.first_half.delta != split.second_half.delta:
        raise InputError("halves have different delta")
    one = cf_derivatives(split.first_half, 2, grid)
    two = cf_derivatives(split.second_half, 2, grid)
    values = (one.order(1) * two.order(1) - one.order(2) * two.order(0)) / split.delta
    values.setflags(write=False)
    return SpectralEstimate(grid, values, Estimator.H_HAT, split.delta, len(split.first_half))


def spectral_estimate(sample: SampleIncrements, target: Estimator, grid: FrequencyGrid) -> SpectralEstimate:
    """Convenience dispatcher over the four estimators."""
    target = Estimator(target)
    if target is Estimator.H_HAT:
        from .ecf import split_halves
        return h_hat_star(split_halves(sample), grid)
    cf = cf_derivatives(sample, target.cf_order, grid)
    return {Estimator.G_BAR: g_bar_star, Estimator.H_BAR: h_bar_star, Estimator.P_BAR: p_bar_star}[target](cf)


# -- quadrature route ------------------------------------------------------------------


def cutoff_weights(grid: FrequencyGrid, m: float) -> np.ndarray:
    """Trapezoid weights over the grid nodes lying in ``[-pi m, pi m]`` (zero elsewhere)."""
    if not m > 0:
        raise ParameterError(f"cutoff must be positive, got {m!r}")
    edge = math.pi * m
    if grid.u_min > -edge * (1 - _COVER_RTOL) + 1e-12 or grid.u_max < edge * (1 - _COVER_RTOL) - 1e-12:
        raise InputError(f"frequency grid [{grid.u_min}, {grid.u_max}] does not cover [-pi m, pi m] for m={m}")
    u = grid.points()
    tol = edge * _COVER_RTOL + 1e-12
    inside = np.flatnonzero(np.abs(u) <= edge + tol)
    if inside.size < 2:
        raise InputError(f"cutoff m={m} leaves fewer than two quadrature nodes")
    w = np.zeros(grid.count)
    w[inside] = grid.spacing
    w[inside[0]] *= 0.5
    w[inside[-1]] *= 0.5
    return w


@numba.njit(cache=True, nogil=True)
def _inverse_ft(x, u, w, re_f, im_f, out_re, out_im):
    for i in range(x.size):
        sr = 0.0
        si = 0.0
        for q in range(u.size):
            if w[q] == 0.0:
                continue
            c = math.cos(u[q] * x[i])
            s = math.sin(u[q] * x[i])
            # e^{-iux} f*(u)
            sr += w[q] * (c * re_f[q] + s * im_f[q])
            si += w[q] * (c * im_f[q] - s * re_f[q])
        out_re[i] = sr / (2.0 * math.pi)
        out_im[i] = si / (2.0 * math.pi)


def invert_on_cutoff(spec: SpectralEstimate, m: float, x_grid: StateGrid,
                     return_imag: bool = False):
    """Trapezoid approximation of ``(1/2 pi) int_{-pi m}^{pi m} e^{-iux} f*(u) du`` on ``x_grid``."""
    w = cutoff_weights(spec.grid, m)
    x = x_grid.points()
    re = np.empty(x.size)
    im = np.empty(x.size)
    values = np.asarray(spec.values)
    _inverse_ft(x, spec.grid.points(), w, np.ascontiguousarray(values.real),
                np.ascontiguousarray(values.imag), re, im)
    bad = np.abs(im) > 1e-8 * (1 + np.abs(re))
    if np.any(bad):
        log.warning("inverted %s estimate has imaginary residual up to %.3g", spec.target.value,
                    float(np.max(np.abs(im))))
    est = DensityEstimate(x_grid, re, float(m), spec.target, Method.QUADRATURE)
    return (est, im) if return_imag else est


def squared_norm(spec: SpectralEstimate, m: float) -> float:
    """``(1/2 pi) int_{-pi m}^{pi m} |f*(u)|^2 du`` by the trapezoid rule."""
    w = cutoff_weights(spec.grid, m)
    power = np.abs(np.asarray(spec.values)) ** 2
    return float(np.sum(w * power) / (2 * math.pi))


def squared_norms(spec: SpectralEstimate, cutoffs) -> np.ndarray:
    """:func:`squared_norm` for many cutoffs in one pass over the spectrum.

    Uses cumulative trapezoid sums from the centre outward, so it requires a
    symmetric grid; the value for each cutoff matches :func:`squared_norm` up
    to summation order.
    """
    cutoffs = np.asarray(cutoffs, dtype=float)
    grid = spec.grid
    if not grid.is_symmetric or grid.count % 2 == 0:
        return np.array([squared_norm(spec, m) for m in cutoffs])
    half = grid.count // 2
    power = np.abs(np.asarray(spec.values)) ** 2
    u = grid.points()[half:]
    # panel j covers [u_j, u_{j+1}] and its mirror image
    left = power[:half + 1][::-1]  # left[j] = power at -u_j
    right = power[half:]
    panels = 0.5 * grid.spacing * (right[:-1] + right[1:] + left[:-1] + left[1:])
    cum = np.concatenate([[0.0], np.cumsum(panels)])
    out = np.empty(cutoffs.size)
    for i, m in enumerate(cutoffs):
        cutoff_weights(grid, m)  # coverage check
        edge = math.pi * m
        j = int(np.searchsorted(u, edge + edge * _COVER_RTOL + 1e-12, side="right")) - 1
        out[i] = cum[j] / (2 * math.pi)
    return out


# -- closed-form (sinc) route ----------------------------------------------------------


def sinc(t) -> np.ndarray:
    """``sin(pi t) / (pi t)`` with the removable singularity filled by 1."""
    return np.sinc(t)


def closed_form_sinc_estimate(sample, target: Estimator, m: float, x_grid: StateGrid,
                              chunk: int = 4096) -> DensityEstimate:
    """Sum-of-sinc form of the cutoff estimate.

    For ``G_BAR``, ``H_BAR``, ``P_BAR`` this is
    ``(1/(N delta)) sum_k Z_k^l m sinc(m (Z_k - x))``.  For ``H_HAT`` pass a
    :class:`SplitSample`; the double sum over pairs across halves costs
    ``O(n^2 |x|)`` and is intended for small samples.
    """
    target = Estimator(target)
    if not m > 0:
        raise ParameterError(f"cutoff must be positive, got {m!r}")
    x = x_grid.points()
    if target is Estimator.H_HAT:
        if not isinstance(sample, SplitSample):
            raise InputError("H_HAT needs a SplitSample")
        a = sample.first_half.z
        b = sample.second_half.z
        n = a.size
        s = (a[:, None] + b[None, :]).ravel()
        wts = (a[:, None] ** 2 - a[:, None] * b[None, :]).ravel()
        delta = sample.delta
        scale = 1.0 / (n * n * delta)
    else:
        if isinstance(sample, SplitSample):
            raise InputError(f"{target.value} takes a single sample")
        s = sample.z
        wts = s ** target.power
        delta = sample.delta
        scale = 1.0 / (s.size * delta)
    out = np.zeros(x.size)
    for start in range(0, s.size, chunk):
        ss = s[start:start + chunk]
        ww = wts[start:start + chunk]
        out += np.sum(ww[:, None] * m * sinc(m * (ss[:, None] - x[None, :])), axis=0)
    return DensityEstimate(x_grid, out * scale, float(m), target, Method.SINC_SUM)


def h_bar_norm_closed_form(sample: SampleIncrements, m: float) -> float:
    """Closed double sum ``(m / (N^2 delta^2)) sum_{k,l} Z_k^2 Z_l^2 sinc(m (Z_k - Z_l))``."""
    z = sample.z
    z2 = z * z
    kern = m * sinc(m * (z[:, None] - z[None, :]))
    return float(z2 @ kern @ z2) / (z.size ** 2 * sample.delta ** 2)


def truncated_levy_density(est: DensityEstimate, a: float) -> DensityEstimate:
    """``f(x) / x^l`` outside ``[-a, a]`` and zero inside, l being the estimator's power."""
    if not a > 0:
        raise ParameterError(f"exclusion half-width must be positive, got {a!r}")
    x = est.x_grid.points()
    keep = np.abs(x) > a
    out = np.zeros_like(est.values)
    out[keep] = est.values[keep] / x[keep] ** est.target.power
    return DensityEstimate(est.x_grid, out, est.cutoff_m, est.target, est.method)
