"""Penalised choice of the spectral cutoff ``m``.

The selected cutoff minimises ``-||f_m||^2 + pen(m)`` over a finite grid of
candidates.  All penalties are linear in ``m`` with a data-driven slope built
from empirical moments of the increments.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ecf import SplitSample
from .errors import InputError, ParameterError
from .npest import Estimator
from .sim import SampleIncrements


@dataclass(frozen=True, eq=False)
class CutoffGrid:
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise InputError("cutoff grid must be a nonempty 1-d sequence")
        if np.any(v <= 0) or np.any(np.diff(v) <= 0):
            raise InputError("cutoffs must be positive and strictly increasing")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def equispaced(cls, m_max: float = 10.0, count: int = 100) -> "CutoffGrid":
        """``count`` equispaced values in ``(0, m_max]``: ``m_max/count, ..., m_max``."""
        return cls(m_max * np.arange(1, count + 1) / count)

    def capped(self, limit: float) -> "CutoffGrid":
        kept = self.values[self.values <= limit * (1 + 1e-12)]
        if kept.size == 0:
            raise InputError(f"no cutoff at or below {limit:.4g}")
        return CutoffGrid(kept)

    @property
    def max(self) -> float:
        return float(self.values[-1])

    def __len__(self):
        return self.values.size

    def __eq__(self, other):
        return isinstance(other, CutoffGrid) and np.array_equal(self.values, other.values)


@dataclass(frozen=True)
class PenaltyConfig:
    kappa_g: float = 7.5
    kappa_h: float = 4.0
    kappa_p: float = 3.0
    kappa_h_hat: float = 4.0

    def __post_init__(self):
        for name in ("kappa_g", "kappa_h", "kappa_p", "kappa_h_hat"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be positive")

    def for_estimator(self, est: Estimator) -> float:
        return {
            Estimator.G_BAR: self.kappa_g,
            Estimator.H_BAR: self.kappa_h,
            Estimator.H_HAT: self.kappa_h_hat,
            Estimator.P_BAR: self.kappa_p,
        }[Estimator(est)]


@dataclass(frozen=True, eq=False)
class SelectionDiagnostics:
    cutoffs: np.ndarray
    norms: np.ndarray
    penalties: np.ndarray
    criterion: np.ndarray
    chosen_index: int

    @property
    def chosen_m(self) -> float:
        return float(self.cutoffs[self.chosen_index])

    def rows(self):
        """(m, norm2, pen, crit, chosen) tuples in grid order."""
        for i, m in enumerate(self.cutoffs):
            yield (float(m), float(self.norms[i]), float(self.penalties[i]),
                   float(self.criterion[i]), i == self.chosen_index)


def _moment(z: np.ndarray, power: int) -> float:
    return float(np.sum(z ** power) / z.size)


def penalty_h_hat(split: SplitSample, kappa: float, m: float) -> float:
    """``kappa m/(n delta^2) [ mean(Z1^2) mean(Z2^2) + mean(Z1^4) ]`` with n the half-sample size."""
    a = split.first_half.z
    b = split.second_half.z
    n = a.size
    slope = _moment(a, 2) * _moment(b, 2) + _moment(a, 4)
    return kappa * m / (n * split.delta ** 2) * slope


def penalty_h_bar(sample: SampleIncrements, kappa_prime: float, m: float) -> float:
    """``kappa' m/(n delta^2) (1/2n) sum Z^4`` for a sample of size ``2n``."""
    half = sample.n / 2
    return kappa_prime * m / (half * sample.delta ** 2) * _moment(sample.z, 4)


def penalty_p_bar(sample: SampleIncrements, kappa_prime: float, m: float) -> float:
    """``kappa' m/(n delta^2) (1/n) sum Z^6``."""
    return kappa_prime * m / (sample.n * sample.delta ** 2) * _moment(sample.z, 6)


def penalty_g_bar(sample: SampleIncrements, kappa: float, m: float) -> float:
    """``kappa m/(n delta^2) (1/n) sum Z^2``."""
    return kappa * m / (sample.n * sample.delta ** 2) * _moment(sample.z, 2)


def penalties(sample: SampleIncrements, est: Estimator, kappa: float, cutoffs) -> np.ndarray:
    """Penalty of ``est`` at every cutoff (the slope is computed once)."""
    est = Estimator(est)
    if est is Estimator.H_HAT:
        from .ecf import split_halves
        slope = penalty_h_hat(split_halves(sample), kappa, 1.0)
    else:
        fn = {Estimator.G_BAR: penalty_g_bar, Estimator.H_BAR: penalty_h_bar,
              Estimator.P_BAR: penalty_p_bar}[est]
        slope = fn(sample, kappa, 1.0)
    return slope * np.asarray(cutoffs, dtype=float)


def select_cutoff(norms, penalties, grid: CutoffGrid) -> SelectionDiagnostics:
    """Smallest cutoff attaining the minimum of ``-norm^2 + pen``."""
    norms = np.asarray(norms, dtype=float)
    pens = np.asarray(penalties, dtype=float)
    if norms.shape != (len(grid),) or pens.shape != (len(grid),):
        raise InputError(f"expected {len(grid)} norms and penalties, got {norms.shape} and {pens.shape}")
    crit = -norms + pens
    # np.argmin returns the first minimiser
    idx = int(np.argmin(crit))
    return SelectionDiagnostics(grid.values, norms, pens, crit, idx)


def p_cutoff_cap(sample: SampleIncrements) -> float:
    """Largest admissible cutoff for the p estimator, ``sqrt(n delta)``."""
    return math.sqrt(sample.n * sample.delta)
