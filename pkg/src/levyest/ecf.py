"""Empirical characteristic function derivatives on frequency grids.

``psi_j(u) = (1/n) sum_k (i Z_k)^j exp(i u Z_k)`` for ``j = 0..3``.  The k-sum
is evaluated directly (no FFT); the phases are shared by all orders, and the
sums are accumulated by blocked pairwise summation so the result does not
depend on how grid points are scheduled.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .errors import InputError
from .sim import SampleIncrements

_BLOCK = 128
_RUN = 16


@dataclass(frozen=True)
class FrequencyGrid:
    u_min: float
    u_max: float
    count: int

    def __post_init__(self):
        if self.count < 2:
            raise InputError("a frequency grid needs at least two points")
        if not self.u_min < self.u_max:
            raise InputError("need u_min < u_max")

    @classmethod
    def symmetric(cls, u_max: float, half_count: int) -> "FrequencyGrid":
        """``2 * half_count + 1`` equispaced points on ``[-u_max, u_max]`` (so 0 is a node)."""
        return cls(-u_max, u_max, 2 * int(half_count) + 1)

    @classmethod
    def for_cutoff(cls, m_max: float, nodes_per_unit_m: int = 200) -> "FrequencyGrid":
        """Symmetric grid covering ``[-pi m_max, pi m_max]`` with spacing ``pi / nodes_per_unit_m``.

        With the default spacing every cutoff that is a multiple of 1/200 (in
        particular the default 0.1-step cutoff grid) falls on a node.
        """
        half = int(math.ceil(m_max * nodes_per_unit_m - 1e-9))
        return cls.symmetric(math.pi * half / nodes_per_unit_m, half)

    @property
    def spacing(self) -> float:
        return (self.u_max - self.u_min) / (self.count - 1)

    @property
    def is_symmetric(self) -> bool:
        return self.u_min == -self.u_max

    def points(self) -> np.ndarray:
        u = np.linspace(self.u_min, self.u_max, self.count)
        if self.is_symmetric:
            # exact mirror image so that conjugate symmetry holds bit for bit
            half = self.count // 2
            u[self.count - half:] = -u[:half][::-1]
            if self.count % 2:
                u[half] = 0.0
        return u


@dataclass(frozen=True, eq=False)
class CfDerivatives:
    """``values[j]`` holds ``psi_j`` on ``grid``; rows exist for ``j <= max_order``."""

    grid: FrequencyGrid
    values: np.ndarray
    sample_size: int
    delta: float

    @property
    def max_order(self) -> int:
        return self.values.shape[0] - 1

    def order(self, j: int) -> np.ndarray:
        if j > self.max_order:
            raise InputError(f"order {j} was not computed (max_order={self.max_order})")
        return self.values[j]


@dataclass(frozen=True)
class SplitSample:
    first_half: SampleIncrements
    second_half: SampleIncrements

    def __post_init__(self):
        if len(self.first_half) != len(self.second_half):
            raise InputError("halves must have equal length")
        if self.first_half.delta != self.second_half.delta:
            raise InputError("halves must share delta")

    @property
    def delta(self) -> float:
        return self.first_half.delta


@numba.njit(cache=True, nogil=True)
def _pairwise_reduce(buf, nblocks):
    width = 1
    while width < nblocks:
        step = 2 * width
        for b in range(0, nblocks - width, step):
            buf[b] += buf[b + width]
        width = step
    return buf[0]


@numba.njit(cache=True, nogil=True)
def _ecf_kernel(z, u, max_order, out):
    # u must be equispaced.  Within a run of _RUN consecutive nodes the phase is
    # advanced by complex rotation from an exact sin/cos at the run start, which
    # bounds the drift to a few ulps.
    n = z.size
    nq = u.size
    h = u[1] - u[0] if nq > 1 else 0.0
    nblocks = (n + _BLOCK - 1) // _BLOCK
    width = 2 * (max_order + 1)
    buf = np.empty((_RUN, width, nblocks))
    acc = np.empty((_RUN, width))
    for q0 in range(0, nq, _RUN):
        run = min(_RUN, nq - q0)
        u0 = u[q0]
        for b in range(nblocks):
            acc[:, :] = 0.0
            stop = min(n, (b + 1) * _BLOCK)
            for k in range(b * _BLOCK, stop):
                zk = z[k]
                z2 = zk * zk
                z3 = z2 * zk
                c = math.cos(u0 * zk)
                s = math.sin(u0 * zk)
                dc = math.cos(h * zk)
                ds = math.sin(h * zk)
                for r in range(run):
                    if r > 0:
                        c, s = c * dc - s * ds, s * dc + c * ds
                    # (i z)^j e^{iuz}: j=0 (c, s); j=1 z(-s, c); j=2 -z^2 (c, s); j=3 z^3 (s, -c)
                    acc[r, 0] += c
                    acc[r, 1] += s
                    if max_order >= 1:
                        acc[r, 2] -= zk * s
                        acc[r, 3] += zk * c
                    if max_order >= 2:
                        acc[r, 4] -= z2 * c
                        acc[r, 5] -= z2 * s
                    if max_order >= 3:
                        acc[r, 6] += z3 * s
                        acc[r, 7] -= z3 * c
            for r in range(run):
                for w in range(width):
                    buf[r, w, b] = acc[r, w]
        for r in range(run):
            for j in range(max_order + 1):
                re = _pairwise_reduce(buf[r, 2 * j], nblocks)
                im = _pairwise_reduce(buf[r, 2 * j + 1], nblocks)
                out[j, q0 + r] = complex(re / n, im / n)


def cf_values(z: np.ndarray, u: np.ndarray, max_order: int = 3) -> np.ndarray:
    """Raw kernel on equispaced ``u``: array of shape ``(max_order + 1, len(u))``."""
    z = np.ascontiguousarray(z, dtype=np.float64)
    u = np.ascontiguousarray(u, dtype=np.float64)
    if z.size == 0:
        raise InputError("empty sample")
    if not 0 <= max_order <= 3:
        raise InputError(f"max_order must be in 0..3, got {max_order}")
    out = np.empty((max_order + 1, u.size), dtype=np.complex128)
    _ecf_kernel(z, u, max_order, out)
    return out


def cf_derivatives(sample: SampleIncrements, max_order: int, grid: FrequencyGrid) -> CfDerivatives:
    """Empirical CF derivatives of ``sample`` up to ``max_order`` on ``grid``.

    On symmetric grids only ``u >= 0`` is computed; negative frequencies use
    ``psi_j(-u) = (-1)^j conj(psi_j(u))``, which the data satisfy exactly.
    """
    if not 0 <= max_order <= 3:
        raise InputError(f"max_order must be in 0..3, got {max_order}")
    u = grid.points()
    if grid.is_symmetric:
        half = grid.count // 2
        values = np.empty((max_order + 1, grid.count), dtype=np.complex128)
        values[:, half:] = cf_values(sample.z, u[half:], max_order)
        signs = np.array([(-1.0) ** j for j in range(max_order + 1)])[:, None]
        values[:, :half] = signs * np.conj(values[:, grid.count - half:][:, ::-1])
    else:
        values = cf_values(sample.z, u, max_order)
    values.setflags(write=False)
    return CfDerivatives(grid=grid, values=values, sample_size=sample.n, delta=sample.delta)


def split_halves(sample: SampleIncrements) -> SplitSample:
    """First ``n`` and last ``n`` increments of a ``2n`` sample."""
    if sample.n % 2:
        raise InputError(f"cannot split a sample of odd length {sample.n}")
    n = sample.n // 2
    return SplitSample(SampleIncrements(sample.z[:n], sample.delta),
                       SampleIncrements(sample.z[n:], sample.delta))
