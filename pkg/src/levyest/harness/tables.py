"""Bundled reproduction runs for the (b, sigma) tables and the design-arithmetic table.

Both parameter tables share four jump models and four ``(n, delta)``
designs; they differ only in sigma (0.5 or 1).  The bilateral gamma model is
stated as positive part ``(beta, alpha) = (1, 0.7)`` and negative part
``(beta2, alpha2) = (1, 1)``, which gives ``b = 1 + 1/0.7 - 1``.
"""
from __future__ import annotations

import math

from ..models import BilateralGamma, CompoundPoisson, Exponential, Gaussian, LevyGamma, ModelSpec
from .config import ExperimentConfig
from .experiment import design_quantities, run_experiment

DESIGNS = ((50_000, 0.05), (50_000, 0.01), (50_000, 1e-3), (10_000, 1e-3))

JUMP_PARTS = {
    "poisson_gaussian": CompoundPoisson(0.5, Gaussian(0.0, 1.0)),
    "poisson_exp": CompoundPoisson(0.5, Exponential(1.0)),
    "gamma": LevyGamma(1.0, 1.0),
    "bilateral_gamma": BilateralGamma(1.0, 0.7, 1.0, 1.0),
}

TABLE_SIGMA = {1: 0.5, 2: 1.0}
DEFAULT_K = 50


def table_config(which: int, model: str, n: int, delta: float, replications: int = DEFAULT_K,
                 seed: int = 0) -> ExperimentConfig:
    """Parameter-only experiment (no curve targets) for one cell of table 1 or 2."""
    spec = ModelSpec(1.0, TABLE_SIGMA[which], JUMP_PARTS[model])
    return ExperimentConfig(spec, n, delta, replications=replications, targets=(),
                            exclusion_a=None, master_seed=seed)


def table_configs(which: int, replications: int = DEFAULT_K, seed: int = 0, designs=DESIGNS):
    """``{(model, n, delta): config}`` in row-major order."""
    return {(m, n, d): table_config(which, m, n, d, replications, seed)
            for m in JUMP_PARTS for n, d in designs}


def run_parameter_table(which: int, replications: int = DEFAULT_K, seed: int = 0, threads: int = 1,
                        designs=DESIGNS) -> list:
    """Rows ``(model, n, delta, quantity, mean, sd)``."""
    rows = []
    for (model, n, d), cfg in table_configs(which, replications, seed, designs).items():
        report = run_experiment(cfg, threads)
        for q, (mean, sd) in report.params.items():
            if not q.startswith("c_hat"):
                rows.append((model, n, d, q, mean, sd))
    return rows


def display_round(v: float) -> float:
    """Rounding used in the design table: integers from 10 up, one decimal in [1, 10), else one significant digit."""
    if v >= 10:
        return float(round(v))
    if v >= 1:
        return round(v, 1)
    digits = -int(math.floor(math.log10(abs(v))))
    return round(v, digits)


def design_table(designs=DESIGNS) -> list:
    """Rows ``(n, delta, n_delta, n_delta2, n_delta_3_2, n_delta_7_4)`` with display rounding."""
    rows = []
    for n, d in designs:
        q = design_quantities(n, d)
        rows.append((n, d, *(display_round(q[k]) for k in ("n_delta", "n_delta2", "n_delta_3_2", "n_delta_7_4"))))
    return rows
