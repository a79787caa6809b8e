import json

import numpy as np
import pytest

import dkmeans


def blobs(seed=0, per=10):
    rng = np.random.default_rng(seed)
    centers = np.array([[0.0, 0.0], [8.0, 0.0], [0.0, 8.0]])
    points = np.vstack([c + 0.3 * rng.standard_normal((per, 2)) for c in centers])
    labels = np.repeat(np.arange(3), per)
    return points, labels


def test_generate_is_deterministic():
    x1, y1 = dkmeans.generate("dgp1", 60, seed=4, noise_sd=0.1)
    x2, y2 = dkmeans.generate("dgp1", 60, seed=4, noise_sd=0.1)
    assert x1.shape == (60, 2)
    np.testing.assert_array_equal(x1, x2)
    assert list(y1) == list(y2)
    assert set(y1) == {0, 1, 2}


def test_affinity_is_symmetric_psd():
    points, _ = blobs()
    a = dkmeans.diffusion_affinity(points, 5, h=0.6)
    np.testing.assert_allclose(a, a.T, atol=1e-12)
    assert np.linalg.eigvalsh(a).min() > -1e-10 * np.abs(a).max()
    a_local = dkmeans.diffusion_affinity(points, 5, k0=3)
    assert a_local.shape == (30, 30)


def test_trace_sdp_recovers_blobs():
    points, labels = blobs()
    a = dkmeans.diffusion_affinity(points, 30, h=0.6)
    sol = dkmeans.solve_trace(a, 3)
    assert sol["converged"]
    assert sol["trace"] == pytest.approx(3.0, abs=1e-6)
    est = dkmeans.round_solution(sol["z"], 3)
    assert dkmeans.classification_error(est, list(labels)) == 0.0
    truth = dkmeans.membership_matrix(list(labels))
    assert dkmeans.l1_error(sol["z"], truth) < 1e-3


def test_path_and_selection():
    points, _ = blobs()
    a = dkmeans.diffusion_affinity(points, 30, h=0.6)
    rhos = dkmeans.rho_grid(a, 20)
    path = dkmeans.tuning_path(a, rhos, tol=1e-5)
    traces = path["traces"]
    assert traces[-1] == pytest.approx(1.0, abs=1e-2)
    assert all(a >= b - 1e-2 for a, b in zip(traces, traces[1:]))
    sel = dkmeans.select(path["rhos"], path["traces"])
    assert sel["k_hat"] == 3


def test_selection_failure_raises():
    with pytest.raises(dkmeans.SelectionError):
        dkmeans.select([1.0, 2.0, 3.0], [1.0, 1.0, 1.0])


def test_spectral_baseline():
    points, labels = blobs()
    est = dkmeans.spectral_cluster(points, 3, "NJW", h=0.6)
    assert dkmeans.classification_error(est, list(labels)) == 0.0


def test_run_cluster_with_config():
    points, labels = blobs()
    config = json.dumps({"h": 0.6, "t_exponent": 1.0})
    out = dkmeans.run_cluster(config, "DKM", points, list(labels))
    assert out["classification_error"] == 0.0
    assert out["k"] == 3
    assert out["k_hat"] is None


def test_validation_errors_map_to_value_error():
    with pytest.raises(ValueError):
        dkmeans.gaussian_kernel(np.zeros((3, 2)), -1.0)
    with pytest.raises(ValueError):
        dkmeans.diffusion_affinity(np.zeros((3, 2)), 1)
