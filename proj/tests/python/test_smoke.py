"""Smoke tests for the python bindings: one synthetic draw through both
estimation paths, checking shapes, interval nesting, and determinism."""

import numpy as np
import pytest

import rd2d


@pytest.fixture(scope="module")
def draw():
    data = rd2d.generate_dgp(1, 4000, seed=11)
    grid = rd2d.boundary_grid()
    return data, grid


def test_generate_shapes_and_assignment(draw):
    data, grid = draw
    assert data["y"].shape == (4000,)
    assert grid["b1"].shape == (9,)
    quadrant = (data["x1"] >= 0) & (data["x2"] >= 0)
    assert np.array_equal(quadrant.astype(int), data["t"])


def test_estimate_location(draw):
    data, grid = draw
    res = rd2d.estimate(
        data["y"], data["x1"], data["x2"], data["t"], grid["b1"], grid["b2"],
        aate_weights=np.ones(9), seed=3, band_draws=500,
    )
    assert res["est"].shape == (9,)
    assert np.all(res["ci_hi"] > res["ci_lo"])
    # uniform bands contain the pointwise intervals
    assert np.all(res["cb_lo"] <= res["ci_lo"] + 1e-12)
    assert np.all(res["cb_hi"] >= res["ci_hi"] - 1e-12)
    assert np.all(res["nh0"] + res["nh1"] <= 4000)
    truth = rd2d.true_tau(1, grid["b1"], grid["b2"])
    assert np.all(np.abs(res["est"] - truth) < 6 * res["se_rbc"] + 0.05)
    assert "aate" in res
    assert res["bandwidths"]["h01"].shape == (9,)
    assert np.allclose(res["bandwidths"]["h01"], res["bandwidths"]["h11"])  # mserd
    assert "Number of Obs." in res["report"]


def test_estimate_distance(draw):
    data, grid = draw
    d = rd2d.build_distances(data["x1"], data["x2"], data["t"], grid["b1"], grid["b2"])
    assert d.shape == (4000, 9)
    res = rd2d.estimate_dist(data["y"], d, grid["b1"], grid["b2"], seed=3, band_draws=500)
    assert res["est"].shape == (9,)
    assert np.all(res["ci_hi"] > res["ci_lo"])

    kinked = rd2d.estimate_dist(data["y"], d, grid["b1"], grid["b2"], seed=3,
                                band_draws=500, kink=True)
    bw = rd2d.bandwidths_dist(data["y"], d)
    bw_kink = rd2d.bandwidths_dist(data["y"], d, kink=True, bwcheck=0)
    bw_plain = rd2d.bandwidths_dist(data["y"], d, bwcheck=0)
    ratio = bw_kink["h0"] / bw_plain["h0"]
    assert np.allclose(ratio, 4000.0 ** (-1.0 / 12.0))
    assert np.all(bw["h0"] > 0)
    assert kinked["est"].shape == (9,)


def test_determinism(draw):
    data, grid = draw
    a = rd2d.estimate(data["y"], data["x1"], data["x2"], data["t"], grid["b1"], grid["b2"],
                      seed=5, threads=1)
    b = rd2d.estimate(data["y"], data["x1"], data["x2"], data["t"], grid["b1"], grid["b2"],
                      seed=5, threads=2)
    assert np.array_equal(a["est"], b["est"])
    assert a["q_alpha"] == b["q_alpha"]
    assert a["report"] == b["report"]


def test_validation_errors(draw):
    data, grid = draw
    with pytest.raises(ValueError):
        rd2d.estimate(data["y"][:10], data["x1"], data["x2"], data["t"],
                      grid["b1"], grid["b2"])
    with pytest.raises(ValueError):
        rd2d.estimate(data["y"], data["x1"], data["x2"], data["t"],
                      grid["b1"], grid["b2"], nonsense=1)


def test_run_mc_smoke():
    rep = rd2d.run_mc(1, 1000, 4, method="loc", seed=9, band_draws=200)
    assert len(rep["index"]) == 9
    assert rep["failures"] == 0
    assert np.all(rep["ec"] >= 0) and np.all(rep["ec"] <= 1)
    assert np.allclose(rep["rmse"] ** 2, rep["bias"] ** 2 + rep["sd"] ** 2)
