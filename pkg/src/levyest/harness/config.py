"""Experiment configuration and its flat ``key = value`` file format (TOML syntax).

Example::

    model = "levy_gamma"
    b0 = 1.0
    sigma = 0.5
    beta = 1.0
    alpha = 1.0
    n = 50000
    delta = 0.05
    replications = 50
    seed = 20240101
    targets = ["p_bar"]
    sigma_rs = [0.5, 0.25]

See ``configs/`` for one file per bundled model.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..errors import InputError, ParameterError
from ..models import (
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
from ..modsel import CutoffGrid, PenaltyConfig
from ..npest import Estimator, StateGrid

DEFAULT_EXCLUSION = {"g": 0.1, "h": 0.5, "p": 1.0}


class ConfigError(InputError):
    """The configuration file is missing, malformed or inconsistent."""


@dataclass(frozen=True)
class ExperimentConfig:
    model: ModelSpec
    n: int
    delta: float
    replications: int = 50
    targets: tuple = ()
    cutoff_grid: CutoffGrid = field(default_factory=CutoffGrid.equispaced)
    penalty: PenaltyConfig = field(default_factory=PenaltyConfig)
    x_grid: StateGrid = field(default_factory=StateGrid)
    sigma_rs: tuple = (0.5, 0.25)
    c_ells: tuple = (2, 3)
    exclusion_a: dict | None = field(default_factory=lambda: dict(DEFAULT_EXCLUSION))
    master_seed: int = 0
    nodes_per_unit_m: int = 200

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(Estimator(t) for t in self.targets))
        object.__setattr__(self, "sigma_rs", tuple(float(r) for r in self.sigma_rs))
        object.__setattr__(self, "c_ells", tuple(int(c) for c in self.c_ells))
        if int(self.n) != self.n or self.n < 1:
            raise ParameterError(f"n must be a positive integer, got {self.n!r}")
        if not self.delta > 0:
            raise ParameterError(f"delta must be positive, got {self.delta!r}")
        if self.replications < 1:
            raise ParameterError("need at least one replication")
        if not self.targets and not self.sigma_rs:
            raise ParameterError("nothing to estimate: give targets or sigma_rs")
        if Estimator.H_HAT in self.targets and self.n % 2:
            raise ParameterError("h_hat splits the sample in halves and needs an even n")


_MODEL_KEYS = {"model", "b0", "sigma", "intensity", "jump_law", "jump_mean", "jump_sd", "jump_rate",
               "jump_a", "jump_b", "jump_lo", "jump_hi", "beta", "alpha", "beta2", "alpha2",
               "delta_power", "subordinator"}
_RUN_KEYS = {"n", "delta", "replications", "seed", "targets", "sigma_rs", "c_ells", "cutoff_max",
             "cutoff_count", "kappa_g", "kappa_h", "kappa_p", "kappa_h_hat", "x_min", "x_max", "x_count",
             "exclusion", "exclusion_g", "exclusion_h", "exclusion_p", "nodes_per_unit_m", "name",
             "cutoff_grid"}


def _jump_law(d: dict):
    kind = d.get("jump_law", "gaussian")
    if kind == "gaussian":
        return Gaussian(d.get("jump_mean", 0.0), d.get("jump_sd", 1.0))
    if kind == "exponential":
        return Exponential(d.get("jump_rate", 1.0))
    if kind == "beta":
        return BetaRescaled(d.get("jump_a", 3.0), d.get("jump_b", 3.0), d.get("jump_lo", -4.0), d.get("jump_hi", 4.0))
    raise ConfigError(f"unknown jump_law {kind!r}")


def _jump_part(kind: str, d: dict):
    if kind == "none":
        return None
    if kind == "compound_poisson":
        return CompoundPoisson(d.get("intensity", 0.5), _jump_law(d))
    if kind == "levy_gamma":
        return LevyGamma(d.get("beta", 1.0), d.get("alpha", 1.0))
    if kind == "bilateral_gamma":
        return BilateralGamma(d.get("beta", 1.0), d.get("alpha", 1.0), d.get("beta2", 1.0), d.get("alpha2", 1.0))
    if kind == "subordinator_power":
        return SubordinatorPower(d.get("beta", 1.0), d.get("alpha", 1.0), d.get("delta_power", 0.0))
    if kind == "subordinated_bm":
        sub = d.get("subordinator", "levy_gamma")
        if sub not in ("levy_gamma", "subordinator_power", "compound_poisson"):
            raise ConfigError(f"unknown subordinator {sub!r}")
        return SubordinatedBM(_jump_part(sub, d))
    raise ConfigError(f"unknown model {kind!r}")


def model_from_mapping(d: dict) -> ModelSpec:
    return ModelSpec(float(d.get("b0", 0.0)), float(d.get("sigma", 0.0)), _jump_part(d.get("model", "none"), d))


def config_from_mapping(d: dict) -> ExperimentConfig:
    unknown = set(d) - _MODEL_KEYS - _RUN_KEYS
    if unknown:
        raise ConfigError(f"unknown configuration keys: {', '.join(sorted(unknown))}")
    for key in ("n", "delta"):
        if key not in d:
            raise ConfigError(f"missing required key {key!r}")
    if d.get("exclusion", True) is False:
        exclusion = None
    else:
        exclusion = {t: float(d.get(f"exclusion_{t}", a)) for t, a in DEFAULT_EXCLUSION.items()}
    try:
        return ExperimentConfig(
            model=model_from_mapping(d),
            n=int(d["n"]),
            delta=float(d["delta"]),
            replications=int(d.get("replications", 50)),
            targets=tuple(d.get("targets", ())),
            cutoff_grid=(CutoffGrid(d["cutoff_grid"]) if "cutoff_grid" in d else
                         CutoffGrid.equispaced(float(d.get("cutoff_max", 10.0)), int(d.get("cutoff_count", 100)))),
            penalty=PenaltyConfig(*(float(d.get(k, v)) for k, v in
                                    (("kappa_g", 7.5), ("kappa_h", 4.0), ("kappa_p", 3.0), ("kappa_h_hat", 4.0)))),
            x_grid=StateGrid(float(d.get("x_min", -10.0)), float(d.get("x_max", 10.0)), int(d.get("x_count", 500))),
            sigma_rs=tuple(d.get("sigma_rs", (0.5, 0.25))),
            c_ells=tuple(d.get("c_ells", (2, 3))),
            exclusion_a=exclusion,
            master_seed=int(d.get("seed", 0)),
            nodes_per_unit_m=int(d.get("nodes_per_unit_m", 200)),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return config_from_mapping(data)


def model_to_mapping(model: ModelSpec) -> dict:
    """Inverse of :func:`model_from_mapping` (used to echo configs in reports)."""
    out = {"b0": model.drift_b0, "sigma": model.sigma}
    part = model.jump_part

    def law_keys(law):
        if isinstance(law, Gaussian):
            return {"jump_law": "gaussian", "jump_mean": law.mean, "jump_sd": law.sd}
        if isinstance(law, Exponential):
            return {"jump_law": "exponential", "jump_rate": law.rate}
        return {"jump_law": "beta", "jump_a": law.a, "jump_b": law.b, "jump_lo": law.lo, "jump_hi": law.hi}

    def part_keys(p):
        if p is None:
            return {"model": "none"}
        if isinstance(p, CompoundPoisson):
            return {"model": "compound_poisson", "intensity": p.intensity, **law_keys(p.jump_law)}
        if isinstance(p, LevyGamma):
            return {"model": "levy_gamma", "beta": p.beta, "alpha": p.alpha}
        if isinstance(p, BilateralGamma):
            return {"model": "bilateral_gamma", "beta": p.beta, "alpha": p.alpha, "beta2": p.beta2, "alpha2": p.alpha2}
        if isinstance(p, SubordinatorPower):
            return {"model": "subordinator_power", "beta": p.beta, "alpha": p.alpha, "delta_power": p.delta}
        inner = part_keys(p.subordinator)
        return {**inner, "model": "subordinated_bm", "subordinator": inner["model"]}

    out.update(part_keys(part))
    return out


def config_to_mapping(cfg: ExperimentConfig) -> dict:
    grid = cfg.cutoff_grid.values
    d = model_to_mapping(cfg.model)
    d.update(
        n=cfg.n, delta=cfg.delta, replications=cfg.replications, seed=cfg.master_seed,
        targets=[t.value for t in cfg.targets], sigma_rs=list(cfg.sigma_rs), c_ells=list(cfg.c_ells),
        cutoff_max=float(grid[-1]), cutoff_count=int(grid.size),
        kappa_g=cfg.penalty.kappa_g, kappa_h=cfg.penalty.kappa_h, kappa_p=cfg.penalty.kappa_p,
        kappa_h_hat=cfg.penalty.kappa_h_hat,
        x_min=cfg.x_grid.x_min, x_max=cfg.x_grid.x_max, x_count=cfg.x_grid.count,
        nodes_per_unit_m=cfg.nodes_per_unit_m,
    )
    if cfg.exclusion_a is None:
        d["exclusion"] = False
    else:
        d.update({f"exclusion_{t}": a for t, a in cfg.exclusion_a.items()})
    if not cfg.cutoff_grid == CutoffGrid.equispaced(float(grid[-1]), int(grid.size)):
        d["cutoff_grid"] = [float(m) for m in grid]
    return d
