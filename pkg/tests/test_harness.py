import csv
import json
import math
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest
from scipy.integrate import trapezoid

from levyest import oracles
from levyest.harness import (
    ConfigError,
    ExperimentConfig,
    ReplicationError,
    config_from_mapping,
    emit_report,
    load_config,
    mise,
    read_increments,
    read_report_json,
    run_experiment,
    run_replication,
    write_increments,
)
from levyest.harness.config import config_to_mapping
from levyest.harness.experiment import design_quantities
from levyest.harness.tables import DESIGNS, design_table, display_round, table_config
from levyest.models import CompoundPoisson, Gaussian, LevyGamma, ModelSpec, SubordinatorPower
from levyest.modsel import CutoffGrid
from levyest.npest import DensityEstimate, Estimator, Method, StateGrid
from levyest.sim import SampleIncrements

CONFIG_DIR = Path(__file__).resolve().parents[1] / "src" / "levyest" / "harness" / "configs"

GAMMA0 = ModelSpec(0.0, 0.0, LevyGamma(1.0, 1.0))
PG = ModelSpec(1.0, 0.5, CompoundPoisson(0.5, Gaussian(0.0, 1.0)))
# h_bar targets h only without a Gaussian part
PG_PURE = ModelSpec(0.0, 0.0, CompoundPoisson(0.5, Gaussian(0.0, 1.0)))


def small_config(**kw):
    base = dict(model=PG, n=2000, delta=0.05, replications=4, targets=("h_bar", "p_bar"),
                cutoff_grid=CutoffGrid.equispaced(5.0, 50), x_grid=StateGrid(-6, 6, 121), master_seed=5)
    base.update(kw)
    return ExperimentConfig(**base)


# -- configuration ------------------------------------------------------------------------


def test_bundled_configs_load():
    names = sorted(p.stem for p in CONFIG_DIR.glob("*.toml"))
    assert {"poisson_gaussian", "poisson_exp", "gamma", "bilateral_gamma"} <= set(names)
    for p in CONFIG_DIR.glob("*.toml"):
        cfg = load_config(p)
        assert cfg.replications >= 1


def test_bilateral_config_reproduces_b():
    cfg = load_config(CONFIG_DIR / "bilateral_gamma.toml")
    assert oracles.true_moments(cfg.model).b == pytest.approx(1.4286, abs=5e-5)


def test_config_round_trip():
    cfg = small_config(cutoff_grid=CutoffGrid([0.5, 1.0, 4.0]), exclusion_a=None)
    again = config_from_mapping(config_to_mapping(cfg))
    assert again == cfg
    cfg2 = small_config()
    assert config_from_mapping(config_to_mapping(cfg2)) == cfg2


def test_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.toml")
    bad = tmp_path / "bad.toml"
    bad.write_text("n = [\n")
    with pytest.raises(ConfigError):
        load_config(bad)
    with pytest.raises(ConfigError):
        config_from_mapping({"n": 10, "delta": 0.1, "colour": "red"})
    with pytest.raises(ConfigError):
        config_from_mapping({"delta": 0.1})
    with pytest.raises(ConfigError):
        config_from_mapping({"n": 10, "delta": 0.1, "model": "levy_gamma", "alpha": -1.0})
    with pytest.raises(ConfigError):
        config_from_mapping({"n": 11, "delta": 0.1, "targets": ["h_hat"]})
    with pytest.raises(ConfigError):
        config_from_mapping({"n": 10, "delta": 0.1, "replications": 0})
    with pytest.raises(ConfigError):
        config_from_mapping({"n": 10, "delta": 0.1, "sigma_rs": []})


# -- mise ---------------------------------------------------------------------------------


def _est(xg, values):
    return DensityEstimate(xg, np.asarray(values, dtype=float), 1.0, Estimator.H_BAR, Method.QUADRATURE)


def test_mise_basic():
    xg = StateGrid(-3, 3, 61)
    x = xg.points()
    f = np.exp(-x * x)
    assert mise(_est(xg, f), f) == 0.0
    assert mise(_est(xg, np.zeros(61)), f) == pytest.approx(trapezoid(f * f, x))
    with pytest.raises(ValueError):
        mise(_est(xg, f), f[:-1])


def test_mise_grid_refinement():
    def pair(count):
        xg = StateGrid(-5, 5, count)
        x = xg.points()
        return mise(_est(xg, np.exp(-x * x) * np.cos(x)), np.exp(-x * x / 2))

    assert pair(101) == pytest.approx(pair(1001), rel=0.01)


# -- replications -------------------------------------------------------------------------


def test_smoke_gamma_g_target():
    cfg = ExperimentConfig(GAMMA0, 2000, 0.05, replications=1, targets=("g_bar",), sigma_rs=())
    rec = run_replication(cfg, 0)
    res = rec.targets[Estimator.G_BAR]
    assert 0 < res.chosen_m <= 10
    assert math.isfinite(res.mise) and res.mise >= 0
    assert rec.stream_id == 0


def test_replication_deterministic():
    cfg = small_config()
    a, b = run_replication(cfg, 2), run_replication(cfg, 2)
    assert a.b_hat == b.b_hat and a.sigma_hats == b.sigma_hats
    for t in cfg.targets:
        assert np.array_equal(a.targets[t].estimate.values, b.targets[t].estimate.values)
        assert a.targets[t].chosen_m in cfg.cutoff_grid.values


def test_p_cutoff_capped():
    cfg = small_config(n=400, delta=0.01)
    rec = run_replication(cfg, 0)
    assert rec.targets[Estimator.P_BAR].chosen_m <= math.sqrt(400 * 0.01) + 1e-12


def test_replication_error_carries_stream():
    cfg = ExperimentConfig(ModelSpec(0.0, 0.0, SubordinatorPower(1.0, 1.0, 0.25)), 100, 0.1, replications=2)
    with pytest.raises(ReplicationError) as info:
        run_experiment(cfg)
    assert info.value.stream_id == 0
    assert "replication 0" in str(info.value)


def test_drift_bm_mise_is_norm_and_shrinks():
    model = ModelSpec(1.0, 1.0)
    grid = CutoffGrid.equispaced(5.0, 50)

    def medians(n):
        cfg = ExperimentConfig(model, n, 0.05, replications=20, targets=("h_bar",), cutoff_grid=grid,
                               x_grid=StateGrid(-5, 5, 201), exclusion_a=None, master_seed=9)
        vals = []
        for k in range(cfg.replications):
            res = run_replication(cfg, k).targets[Estimator.H_BAR]
            x = cfg.x_grid.points()
            assert res.mise == pytest.approx(trapezoid(res.estimate.values ** 2, x), rel=1e-12)
            assert res.mise >= 0
            vals.append(res.mise)
        return np.median(vals)

    assert medians(20_000) < medians(2000)


@pytest.mark.slow
def test_poisson_gaussian_selected_cutoffs_small():
    cfg = ExperimentConfig(PG_PURE, 50_000, 0.05, replications=50, targets=("h_bar",), exclusion_a=None,
                           sigma_rs=(), master_seed=3)
    report = run_experiment(cfg)
    mean_m, sd_m = report.selection["h_bar"]
    assert mean_m < 3
    assert sd_m >= 0


# -- aggregation and reports ---------------------------------------------------------------


def test_single_replication_is_degenerate():
    report = run_experiment(small_config(replications=1))
    assert report.degenerate
    assert all(sd == 0 for _, sd in report.params.values())
    assert all(sd == 0 for _, sd in report.selection.values())


def test_design_quantities():
    q = design_quantities(50_000, 0.05)
    assert q["n_delta"] == pytest.approx(2500)
    assert q["n_delta2"] == pytest.approx(125)
    assert q["n_delta_3_2"] == pytest.approx(559.017, abs=1e-3)
    assert q["n_delta_7_4"] == pytest.approx(50_000 * 0.05 ** 1.75, rel=1e-14)
    assert round(q["n_delta_7_4"]) == 264


def test_display_rounding():
    assert display_round(559.017) == 559
    assert display_round(1.58) == 1.6
    assert display_round(0.2812) == 0.3
    assert display_round(0.0562) == 0.06
    assert len(design_table()) == len(DESIGNS)


@pytest.fixture(scope="module")
def report():
    return run_experiment(small_config())


def test_band_coherence(report):
    cfg = small_config()
    for name, band in report.bands.items():
        lo, med, hi = map(np.asarray, (band["lower"], band["median"], band["upper"]))
        assert np.all(lo <= med) and np.all(med <= hi)
        x = np.asarray(band["x"])
        if name.startswith("n_"):
            continue
        truth = oracles.true_target(cfg.model, Estimator(name).target, x)
        np.testing.assert_allclose(band["truth"], truth, rtol=0, atol=1e-12)


def test_report_statistics(report):
    assert set(report.selection) == {"h_bar", "p_bar"}
    for mean, sd in report.mise.values():
        assert mean >= 0 and sd >= 0
    assert len(report.records) == 4
    assert [r["stream_id"] for r in report.records] == [0, 1, 2, 3]
    b = [r["b_hat"] for r in report.records]
    assert report.params["b_hat"][0] == pytest.approx(np.mean(b))
    assert report.params["b_hat"][1] == pytest.approx(np.std(b, ddof=1))


def test_thread_invariance(report):
    threaded = run_experiment(small_config(), threads=3)
    assert threaded.to_dict() == report.to_dict()


def test_json_round_trip(report, tmp_path):
    (path,) = emit_report(report, "json", tmp_path)
    assert read_report_json(path) == report


def test_csv_report_files(report, tmp_path):
    written = emit_report(report, "csv", tmp_path)
    names = {p.name for p in written}
    assert {"params.csv", "selection.csv", "mise.csv", "bands_h_bar.csv", "bands_p_bar.csv"} <= names
    widths = {"params.csv": 3, "selection.csv": 3, "mise.csv": 3}
    for p in written:
        with p.open() as fh:
            rows = list(csv.reader(fh))
        width = widths.get(p.name, 5)
        assert all(len(r) == width for r in rows), p.name


def test_csv_bytes_stable(tmp_path):
    a = emit_report(run_experiment(small_config()), "csv", tmp_path / "a")
    b = emit_report(run_experiment(small_config()), "csv", tmp_path / "b")
    for pa, pb in zip(a, b):
        assert pa.read_bytes() == pb.read_bytes()


def test_empty_targets_only_params(tmp_path):
    cfg = small_config(targets=(), exclusion_a=None)
    written = emit_report(run_experiment(cfg), "csv", tmp_path)
    assert [p.name for p in written] == ["params.csv"]
    assert sorted(p.name for p in tmp_path.iterdir()) == ["params.csv"]


def test_unknown_format(report, tmp_path):
    with pytest.raises(ValueError):
        emit_report(report, "xml", tmp_path)


def test_json_is_plain(report):
    json.dumps(report.to_dict())


# -- increments files ----------------------------------------------------------------------


def test_increments_round_trip(tmp_path):
    z = np.random.default_rng(0).standard_normal(257) * 1e-3
    s = SampleIncrements(z, 0.001)
    back = read_increments(write_increments(s, tmp_path / "z.csv"))
    assert back == s


def test_increments_malformed(tmp_path):
    p = tmp_path / "z.csv"
    p.write_text("delta,0.1\nn,3\n1.0\n2.0\n")
    with pytest.raises(ValueError):
        read_increments(p)
    p.write_text("n,3\ndelta,0.1\n1\n2\n3\n")
    with pytest.raises(ValueError):
        read_increments(p)
    with pytest.raises(ValueError):
        read_increments(tmp_path / "nope.csv")


def test_table_config_cells():
    cfg = table_config(1, "bilateral_gamma", 50_000, 0.05)
    assert cfg.model.sigma == 0.5 and cfg.replications == 50 and cfg.targets == ()
    assert replace(cfg, replications=3).replications == 3
    assert table_config(2, "gamma", 10_000, 1e-3).model.sigma == 1.0
