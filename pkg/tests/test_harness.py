import numpy as np
import pytest

from ratejump.detector import DetectorConfig
from ratejump.harness import (
    PRESETS,
    ConstNullScenario,
    ExperimentSpec,
    Preset,
    RampScenario,
    SITreeScenario,
    SmoothJumpScenario,
    false_alarm_study,
    get_preset,
    heatmap_spec_from_preset,
    run_baselines,
    run_heatmap,
    run_trial,
    save_heatmap_csv,
    save_heatmap_long_csv,
)
from ratejump.poisson import Constant, JumpComponent, RateSpec
from ratejump.seeding import SimSeed


def small_spec(trials=4, base_seed=11):
    scenario = SmoothJumpScenario(base=300.0, jump=400.0)
    return ExperimentSpec(
        scenario=scenario,
        k_grid=(1, 2, 3),
        delta_grid=(0.1, 0.3),
        trials=trials,
        base_seed=base_seed,
    )


def test_ramp_trial_is_exact_to_grid():
    scenario = RampScenario(rate_after=200.0, change_at=5.0, horizon=10.0)
    for k in (2, 3):
        err = run_trial(scenario, k, 0.5, SimSeed(0, 0))
        assert err <= 0.05 + 1e-9  # one grid step at delta/10
    # on a noiseless one-sided kink the order-4 extreme sits one delta past
    # the kink, so the error is delta itself, not a grid step
    err4 = run_trial(scenario, 4, 0.5, SimSeed(0, 0))
    assert err4 <= 0.5 + 1e-9


def test_run_trial_matches_one_cell_heatmap():
    scenario = SmoothJumpScenario(base=300.0, jump=400.0)
    spec = ExperimentSpec(
        scenario=scenario, k_grid=(2,), delta_grid=(0.2,), trials=1, base_seed=5
    )
    result = run_heatmap(spec)
    direct = run_trial(scenario, 2, 0.2, SimSeed(5, 0))
    assert result.mean_errors[0, 0] == direct


def test_heatmap_reproducible_and_worker_independent():
    spec = small_spec()
    a = run_heatmap(spec, workers=1)
    b = run_heatmap(spec, workers=1)
    c = run_heatmap(spec, workers=2)
    assert np.array_equal(a.errors, b.errors)
    assert np.array_equal(a.errors, c.errors)
    assert a.argmin == c.argmin
    assert a.checksums == c.checksums


def test_heatmap_common_random_numbers():
    # the same realization feeds every cell within a trial
    spec = small_spec(trials=3)
    result = run_heatmap(spec)
    assert len(result.checksums) == 3
    assert len(set(result.checksums)) == 3  # trials differ
    # same base seed, different grid: identical realizations
    spec2 = ExperimentSpec(
        scenario=spec.scenario,
        k_grid=(2,),
        delta_grid=(0.5,),
        trials=3,
        base_seed=spec.base_seed,
    )
    result2 = run_heatmap(spec2)
    assert result.checksums == result2.checksums


def test_heatmap_counts_and_argmin():
    spec = small_spec(trials=5)
    result = run_heatmap(spec)
    assert result.counts.shape == (3, 2)
    assert np.all(result.counts == 5)
    k, d, err = result.argmin
    assert k in spec.k_grid and d in spec.delta_grid
    assert err == pytest.approx(np.nanmin(result.mean_errors))


def test_heatmap_cell_failure_recorded_not_fatal():
    # horizon too short for k=6 at delta=2: that cell fails, others survive
    scenario = SmoothJumpScenario(base=300.0, jump=400.0, horizon=8.0)
    spec = ExperimentSpec(
        scenario=scenario, k_grid=(2, 6), delta_grid=(0.2, 2.0), trials=2, base_seed=0
    )
    result = run_heatmap(spec)
    assert np.isnan(result.errors[:, 1, 1]).all()
    assert result.counts[1, 1] == 0
    assert result.counts[0, 0] == 2
    assert any("k=6" in d for d in result.diagnostics)


def test_const_null_mean_error_near_span_third():
    scenario = ConstNullScenario(base=200.0, onset_low=5.0, onset_high=15.0)
    spec = ExperimentSpec(
        scenario=scenario, k_grid=(2,), delta_grid=(0.3,), trials=40, base_seed=1
    )
    result = run_heatmap(spec)
    # blind guessing on a 10-unit interval: expected error 10/3
    assert 2.1 <= result.mean_errors[0, 0] <= 4.6


def test_baselines_ramp_all_orders_good():
    scenario = RampScenario(rate_after=200.0)
    report = run_baselines(
        scenario, delta_grid=(0.3, 0.5), trials=2, base_seed=0, high_orders=(3, 4)
    )
    for k, (_, err) in report.per_order_min.items():
        if k in (2, 3):
            assert err <= 0.05 + 1e-9
        if k == 4:
            # extreme of the order-4 stencil sits one delta past the kink
            assert err <= 0.5 + 1e-9
    assert set(report.per_order_min) == {1, 2, 3, 4}
    assert report.best_high[0] in (3, 4)


def test_false_alarm_study_counts():
    spec = RateSpec(components=(JumpComponent(500.0, 0.0, Constant()),))
    # score noise std is ~sqrt(6*B*delta)/delta = 100 here, and the detector
    # keeps scores above threshold/2, so threshold 1200 puts the cut at 6 sigma
    config = DetectorConfig(k=3, delta=0.3, threshold=1200.0)
    report = false_alarm_study(spec, 10.0, config, runs=20, base_seed=0)
    assert report.runs == 20
    assert len(report.alarm_counts) == 20
    assert report.clean_fraction >= 0.9


def test_heatmap_csv_exports(tmp_path):
    result = run_heatmap(small_spec(trials=2))
    matrix = tmp_path / "heatmap.csv"
    save_heatmap_csv(result, matrix)
    lines = [l for l in matrix.read_text().splitlines() if not l.startswith("#")]
    header = lines[0].split(",")
    assert header[0] == "k\\delta"
    assert [float(x) for x in header[1:]] == [0.1, 0.3]
    assert len(lines) == 1 + 3  # one row per order

    long = tmp_path / "long.csv"
    save_heatmap_long_csv(result, long)
    rows = long.read_text().splitlines()
    assert rows[0] == "k,delta,trial,error"
    assert len(rows) == 1 + 3 * 2 * 2


def test_export_bytes_identical_across_worker_counts(tmp_path):
    spec = small_spec(trials=4)
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    save_heatmap_csv(run_heatmap(spec, workers=1), p1)
    save_heatmap_csv(run_heatmap(spec, workers=3), p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_spec_validation():
    scenario = RampScenario()
    with pytest.raises(ValueError, match="k_grid"):
        ExperimentSpec(scenario=scenario, k_grid=(), delta_grid=(0.1,), trials=1)
    with pytest.raises(ValueError, match="deltas"):
        ExperimentSpec(scenario=scenario, k_grid=(1,), delta_grid=(0.0,), trials=1)
    with pytest.raises(ValueError, match="trials"):
        ExperimentSpec(scenario=scenario, k_grid=(1,), delta_grid=(0.1,), trials=0)


def test_presets_registry():
    expected = {
        "fig1",
        "fig2-scaled",
        "fig2-full",
        "fig4",
        "fig5",
        "const-null",
        "multicascade-tree",
        "sd-covid-style",
    }
    assert expected <= set(PRESETS)
    for name in expected:
        assert isinstance(get_preset(name), Preset)
        assert get_preset(name).describe()
    with pytest.raises(ValueError, match="unknown preset"):
        get_preset("nope")


def test_heatmap_spec_from_preset():
    spec = heatmap_spec_from_preset(get_preset("fig2-scaled"), trials=3, base_seed=9)
    assert isinstance(spec.scenario, SmoothJumpScenario)
    assert spec.trials == 3
    assert spec.base_seed == 9
    assert spec.k_grid == tuple(range(1, 7))
    assert len(spec.delta_grid) == 24

    tree = heatmap_spec_from_preset(get_preset("fig5"), extra_leaves=50, trials=1)
    assert isinstance(tree.scenario, SITreeScenario)
    assert tree.scenario.extra_leaves == 50

    with pytest.raises(ValueError, match="not a heatmap"):
        heatmap_spec_from_preset(get_preset("fig1"))
    with pytest.raises(ValueError, match="overrides"):
        heatmap_spec_from_preset(get_preset("fig2-scaled"), bogus=1)


def test_si_tree_scenario_truth_is_hub_time():
    scenario = SITreeScenario(height=4, extra_leaves=30)
    r = scenario.realize(SimSeed(0, 0))
    g = scenario.graph()
    assert r.truth > 0
    assert len(r.events) == g.n
    assert r.checksum[0] == g.n
