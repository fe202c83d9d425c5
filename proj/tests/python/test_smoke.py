import math
import pathlib

import numpy as np
import pytest

import pvo

SCENARIOS = pathlib.Path(__file__).resolve().parents[2] / "scenarios"


def test_poly_kernel():
    assert pvo.poly_kernel([1.0, 2.0], [3.0, 4.0], 2) == pytest.approx(144.0)


def test_mmd_identical_sets_is_zero():
    x = np.array([0.5, -1.0, 2.0])
    assert pvo.mmd_squared(x, x, 2) == pytest.approx(0.0, abs=1e-12)


def test_mmd_point_masses():
    assert pvo.mmd_squared([1.0], [0.0], 1) == pytest.approx(1.0)


def test_reduced_set_weights_full_subset_is_uniform():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(5, 2))
    w = pvo.reduced_set_weights(x, x, 2)
    np.testing.assert_allclose(w, np.full(5, 0.2), atol=1e-8)


def test_vo_value():
    assert pvo.vo_value([5.0, 0.0], [-1.0, 0.0], 1.0) == pytest.approx(1.0)
    assert pvo.vo_value([5.0, 3.0], [-1.0, 0.0], 1.0) == pytest.approx(-8.0)


def test_pvo_samples_shapes_and_eta():
    w = np.zeros((3, 6))
    w[:, 1] = 1.0
    obs = np.array([[5.0, 0.0, 3.0, 0.0], [5.0, 0.0, 0.0, 0.0]])
    values, weights = pvo.pvo_samples(w, obs, [0.0, 0.0], 0.5, 0.5, 0.1)
    assert values.shape == (6,)
    assert weights.sum() == pytest.approx(1.0)
    assert pvo.estimate_eta(w, obs, [0.0, 0.0], 0.5, 0.5, 0.1) == pytest.approx(0.5)


def test_pvo_samples_rejects_bad_shape():
    with pytest.raises(pvo.ShapeError):
        pvo.pvo_samples(np.zeros((3, 5)), np.zeros((2, 4)), [0.0, 0.0], 0.5, 0.5, 0.1)


def test_gmm_fit_and_kl():
    rng = np.random.default_rng(1)
    x = np.concatenate([rng.normal(-10, 1, 200), rng.normal(10, 1, 200)])
    model = pvo.fit_gmm(x, k=2, seed=0)
    assert sorted(model["means"]) == pytest.approx([-10.0, 10.0], abs=0.5)
    assert model["weights"].sum() == pytest.approx(1.0)
    kl = pvo.kl_divergence(model, model, mc_samples=500, seed=3)
    assert abs(kl["value"]) < 1e-9


def test_run_scenario_is_reproducible():
    path = SCENARIOS / "timing_1obs.json"
    summary_a, csv_a = pvo.run_scenario(path, seed=7, wall_clock=False)
    summary_b, csv_b = pvo.run_scenario(path, seed=7, wall_clock=False)
    assert csv_a == csv_b
    for key in ("mean_decision_seconds", "std_decision_seconds"):
        summary_a.pop(key)
        summary_b.pop(key)
    assert summary_a == summary_b
    assert summary_a["scenario"] == "timing_1obs"
    assert math.isfinite(summary_a["cumulative_tracking_cost"])


def test_bad_method_raises_config_error():
    with pytest.raises(pvo.ConfigError):
        pvo.run_scenario(SCENARIOS / "timing_1obs.json", method="nope")


def test_consistency_report_rows():
    text = pvo.consistency_report(str(SCENARIOS / "one_obstacle.json"), [5, 10], [1], [0, 1])
    lines = text.strip().splitlines()
    assert len(lines) == 3
