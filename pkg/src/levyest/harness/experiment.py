"""Seeded Monte Carlo replications and their aggregation."""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.integrate import trapezoid

from .. import oracles
from ..ecf import FrequencyGrid, cf_derivatives, split_halves
from ..errors import LevyEstError
from ..modsel import SelectionDiagnostics, p_cutoff_cap, penalties, select_cutoff
from ..npest import (
    DensityEstimate,
    Estimator,
    g_bar_star,
    h_bar_star,
    h_hat_star,
    invert_on_cutoff,
    p_bar_star,
    squared_norms,
    truncated_levy_density,
)
from ..paramest import ParamEstimates, estimate_params
from ..sim import SampleIncrements, SeedSpec, simulate_increments
from .config import ExperimentConfig, config_to_mapping

log = logging.getLogger(__name__)

BAND_LEVELS = (0.025, 0.5, 0.975)


class ReplicationError(LevyEstError, RuntimeError):
    def __init__(self, stream_id: int, cause: Exception):
        super().__init__(f"replication {stream_id} failed: {cause}")
        self.stream_id = stream_id


@dataclass(eq=False)
class TargetResult:
    estimate: DensityEstimate
    diagnostics: SelectionDiagnostics
    truncated: DensityEstimate | None = None
    mise: float | None = None
    truncated_mise: float | None = None

    @property
    def chosen_m(self) -> float:
        return self.diagnostics.chosen_m


@dataclass(eq=False)
class SampleEstimates:
    """Everything estimated from one sample: parameters and, per target, the selected curve."""

    params: ParamEstimates
    targets: dict = field(default_factory=dict)


@dataclass(eq=False)
class ReplicationRecord:
    stream_id: int
    params: ParamEstimates
    targets: dict = field(default_factory=dict)

    @property
    def b_hat(self) -> float:
        return self.params.b_hat

    @property
    def c_hats(self) -> dict:
        return self.params.c_hat

    @property
    def sigma_hats(self) -> dict:
        return self.params.sigma_hat


def mise(estimate: DensityEstimate, truth) -> float:
    """Trapezoid integral of ``(estimate - truth)^2`` over the estimate's state grid."""
    truth = np.asarray(truth, dtype=float)
    if truth.shape != estimate.values.shape:
        raise ValueError("estimate and truth live on different grids")
    x = estimate.x_grid.points()
    return float(trapezoid((estimate.values - truth) ** 2, x))


def _cutoffs_for(target: Estimator, sample: SampleIncrements, config: ExperimentConfig):
    grid = config.cutoff_grid
    if target is Estimator.P_BAR:
        grid = grid.capped(p_cutoff_cap(sample))
    return grid


def estimate_sample(sample: SampleIncrements, config: ExperimentConfig) -> SampleEstimates:
    """Parameter estimates plus the penalised cutoff estimate of every configured target.

    The spectral estimate of each target is computed once on a grid covering the
    largest cutoff; norms for all cutoffs come from the same pass.
    """
    params = estimate_params(sample, config.c_ells, config.sigma_rs)
    out = SampleEstimates(params)
    if not config.targets:
        return out
    grids = {t: _cutoffs_for(t, sample, config) for t in config.targets}
    m_top = max(g.max for g in grids.values())
    fgrid = FrequencyGrid.for_cutoff(m_top, config.nodes_per_unit_m)
    single = [t for t in config.targets if t is not Estimator.H_HAT]
    cf = cf_derivatives(sample, max(t.cf_order for t in single), fgrid) if single else None
    for target in config.targets:
        if target is Estimator.H_HAT:
            spec = h_hat_star(split_halves(sample), fgrid)
        else:
            spec = {Estimator.G_BAR: g_bar_star, Estimator.H_BAR: h_bar_star,
                    Estimator.P_BAR: p_bar_star}[target](cf)
        cutoffs = grids[target]
        norms = squared_norms(spec, cutoffs.values)
        pens = penalties(sample, target, config.penalty.for_estimator(target), cutoffs.values)
        diag = select_cutoff(norms, pens, cutoffs)
        est = invert_on_cutoff(spec, diag.chosen_m, config.x_grid)
        trunc = None
        if config.exclusion_a is not None:
            trunc = truncated_levy_density(est, config.exclusion_a[target.target])
        out.targets[target] = TargetResult(est, diag, trunc)
    return out


def truth_curve(config: ExperimentConfig, target: Estimator) -> np.ndarray:
    return oracles.true_target(config.model, target.target, config.x_grid.points())


def truncated_truth_curve(config: ExperimentConfig, target: Estimator) -> np.ndarray:
    x = config.x_grid.points()
    a = config.exclusion_a[target.target]
    out = np.zeros_like(x)
    keep = np.abs(x) > a
    out[keep] = oracles.levy_density(config.model, x[keep])
    return out


def run_replication(config: ExperimentConfig, stream_id: int) -> ReplicationRecord:
    """Simulate one sample on stream ``stream_id`` and estimate everything in ``config``."""
    try:
        sample = simulate_increments(config.model, config.n, config.delta,
                                     SeedSpec(config.master_seed, stream_id))
        est = estimate_sample(sample, config)
        for target, res in est.targets.items():
            res.mise = mise(res.estimate, truth_curve(config, target))
            if res.truncated is not None:
                res.truncated_mise = mise(res.truncated, truncated_truth_curve(config, target))
    except Exception as exc:
        raise ReplicationError(stream_id, exc) from exc
    return ReplicationRecord(stream_id, est.params, est.targets)


# -- aggregation ---------------------------------------------------------------------


def _mean_sd(values) -> list:
    v = np.asarray(values, dtype=float)
    sd = float(np.std(v, ddof=1)) if v.size > 1 else 0.0
    return [float(np.mean(v)), sd]


def design_quantities(n: int, delta: float) -> dict:
    """``n delta``, ``n delta^2``, ``n delta^(3/2)`` and ``n delta^(7/4)``."""
    return {
        "n_delta": n * delta,
        "n_delta2": n * delta ** 2,
        "n_delta_3_2": n * delta ** 1.5,
        "n_delta_7_4": n * delta ** 1.75,
    }


@dataclass
class ExperimentReport:
    config: dict
    design: dict
    params: dict
    selection: dict
    mise: dict
    bands: dict
    records: list
    degenerate: bool

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentReport":
        return cls(**d)


def _param_columns(rec: ReplicationRecord) -> dict:
    cols = {"b_hat": rec.b_hat}
    cols.update({f"c_hat_{ell}": v for ell, v in rec.c_hats.items()})
    cols.update({f"sigma_hat_{r:g}": v for r, v in rec.sigma_hats.items()})
    return cols


def _band(curves: np.ndarray, x: np.ndarray, truth: np.ndarray) -> dict:
    lower, median, upper = np.quantile(curves, BAND_LEVELS, axis=0)
    return {"x": x.tolist(), "lower": lower.tolist(), "median": median.tolist(),
            "upper": upper.tolist(), "truth": truth.tolist()}


def aggregate(config: ExperimentConfig, records: list) -> ExperimentReport:
    records = sorted(records, key=lambda r: r.stream_id)
    cols = [_param_columns(r) for r in records]
    params = {k: _mean_sd([c[k] for c in cols]) for k in cols[0]}
    selection, mise_tab, bands = {}, {}, {}
    x = config.x_grid.points()
    for target in config.targets:
        name = target.value
        res = [r.targets[target] for r in records]
        selection[name] = _mean_sd([t.chosen_m for t in res])
        mise_tab[name] = _mean_sd([t.mise for t in res])
        bands[name] = _band(np.array([t.estimate.values for t in res]), x, truth_curve(config, target))
        if config.exclusion_a is not None:
            bands[f"n_{name}"] = _band(np.array([t.truncated.values for t in res]), x,
                                       truncated_truth_curve(config, target))
            mise_tab[f"n_{name}"] = _mean_sd([t.truncated_mise for t in res])
    flat_records = []
    for r, c in zip(records, cols):
        row = {"stream_id": r.stream_id, **c}
        for target, t in r.targets.items():
            row[f"m_{target.value}"] = t.chosen_m
            row[f"mise_{target.value}"] = t.mise
        flat_records.append(row)
    return ExperimentReport(
        config=config_to_mapping(config),
        design=design_quantities(config.n, config.delta),
        params=params,
        selection=selection,
        mise=mise_tab,
        bands=bands,
        records=flat_records,
        degenerate=len(records) < 2,
    )


def run_records(config: ExperimentConfig, threads: int = 1) -> list:
    streams = range(config.replications)
    if threads <= 1:
        return [run_replication(config, s) for s in streams]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda s: run_replication(config, s), streams))


def run_experiment(config: ExperimentConfig, threads: int = 1) -> ExperimentReport:
    """Run ``config.replications`` independent replications and aggregate them.

    Each replication owns RNG stream ``(master_seed, stream_id)`` and the
    reduction is ordered by stream id, so the report does not depend on
    ``threads``.
    """
    log.info("running %d replications (n=%d, delta=%g) on %d thread(s)",
             config.replications, config.n, config.delta, threads)
    return aggregate(config, run_records(config, threads))
