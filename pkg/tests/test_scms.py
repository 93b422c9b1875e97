import logging

import numpy as np
import pytest

from regshift import (
    BIWEIGHT,
    GAUSSIAN,
    Dataset,
    NoActiveWeights,
    ResponseTransform,
    RidgeConfig,
    fit,
    mean_shift,
    reg_hess,
    ridge_points,
    scms_iterate,
    scms_step,
)
from regshift.scms import _projector
from conftest import uniform_dataset

T2 = ResponseTransform("t2")


def filament_grid(nx=40, ny=25, x_half=2.0, y_half=1.5):
    """Deterministic design with a straight filament along the first axis."""
    g1 = np.linspace(-x_half, x_half, nx)
    g2 = np.linspace(-y_half, y_half, ny)
    X = np.array(np.meshgrid(g1, g2)).reshape(2, -1).T
    return Dataset(x=X, y=np.exp(-X[:, 1] ** 2))


@pytest.fixture(scope="module")
def filament_model():
    return fit(filament_grid(), T2, GAUSSIAN, h=0.4)


def test_projector_properties(filament_model):
    rng = np.random.Generator(np.random.Philox(3))
    for x in rng.uniform(-1.2, 1.2, size=(10, 2)):
        H = reg_hess(filament_model, x)
        P = _projector(H, s=2)
        np.testing.assert_allclose(P, P.T, atol=1e-12)
        np.testing.assert_allclose(P @ P, P, atol=1e-10)
        assert np.linalg.matrix_rank(P, tol=1e-8) == 1

        # eigen residual of the underlying decomposition
        vals, vecs = np.linalg.eigh(H)
        scale = max(abs(vals[0]), abs(vals[-1]), 1e-300)
        for lam, v in zip(vals, vecs.T):
            assert np.linalg.norm(H @ v - lam * v) <= 1e-8 * scale


def test_step_is_projection_onto_small_eigvector(filament_model):
    z = np.array([0.4, 0.35])
    H = reg_hess(filament_model, z)
    vals, vecs = np.linalg.eigh(H)
    v = vecs[:, 0]  # eigenvector of the smallest eigenvalue, d=2 s=2
    shift = mean_shift(filament_model, z)
    expected = z + v * float(v @ shift)
    np.testing.assert_allclose(scms_step(filament_model, z, s=2), expected, rtol=1e-10)


def test_projected_step_never_longer_than_shift(filament_model):
    rng = np.random.Generator(np.random.Philox(5))
    for x in rng.uniform(-1.2, 1.2, size=(20, 2)):
        step = scms_step(filament_model, x, s=2) - x
        shift = mean_shift(filament_model, x)
        assert np.linalg.norm(step) <= np.linalg.norm(shift) * (1 + 1e-12)


def test_iterate_pulls_to_filament(filament_model):
    cfg = RidgeConfig.for_bandwidth(0.4, s=2)
    for x2 in (0.35, -0.4):
        res = scms_iterate(filament_model, np.array([0.5, x2]), cfg)
        assert res.converged
        assert abs(res.point[1]) < 0.02
        assert res.projected_step_norm < cfg.step_tol
        # transverse curvature negative, longitudinal near zero
        assert res.eigenvalues[0] > res.eigenvalues[1]
        assert res.eigenvalues[1] < 0


def test_on_ridge_start_stays(filament_model):
    cfg = RidgeConfig.for_bandwidth(0.4, s=2)
    res = scms_iterate(filament_model, np.array([0.3, 0.0]), cfg)
    assert res.converged
    assert res.iterations <= 3
    assert abs(res.point[1]) < 1e-6
    assert abs(res.point[0] - 0.3) < 0.01


def test_eigenvalues_sorted_descending(filament_model):
    res = scms_iterate(filament_model, np.array([0.1, 0.2]))
    assert np.all(np.diff(res.eigenvalues) <= 0)


def test_stall_outside_compact_support():
    ds = filament_grid(nx=10, ny=5)
    model = fit(ds, T2, BIWEIGHT, h=0.4)
    res = scms_iterate(model, np.array([30.0, 0.0]))
    assert not res.converged
    assert res.stall_reason == "no_active_weights"
    with pytest.raises(NoActiveWeights):
        scms_step(model, np.array([30.0, 0.0]))


def test_degenerate_eigengap_logged_and_proceeds(caplog):
    p = np.array([0.0, 0.0])
    ds = Dataset(x=np.stack([p, p]), y=np.array([1.0, 1.0]))
    model = fit(ds, T2, GAUSSIAN, h=1.0)
    # at the sample location the Hessian is isotropic: the gap is exactly zero
    with caplog.at_level(logging.DEBUG, logger="regshift.scms"):
        z = scms_step(model, np.array([0.0, 0.0]), s=2)
    assert np.all(np.isfinite(z))
    assert any("eigengap" in r.message for r in caplog.records)


def test_subspace_index_validation(filament_model):
    with pytest.raises(ValueError):
        scms_step(filament_model, np.array([0.0, 0.0]), s=3)
    with pytest.raises(ValueError):
        RidgeConfig(s=1)
    with pytest.raises(ValueError):
        RidgeConfig(s=2, step_tol=-1.0)


def test_batch_matches_single(filament_model):
    cfg = RidgeConfig.for_bandwidth(0.4, s=2, max_iter=500)
    starts = np.array([[0.5, 0.35], [-0.8, -0.3], [1.2, 0.1], [0.0, 0.45]])
    batch = ridge_points(filament_model, starts, cfg)
    for start, got in zip(starts, batch):
        single = scms_iterate(filament_model, start, cfg)
        assert got.converged == single.converged
        assert got.iterations == single.iterations
        np.testing.assert_allclose(got.point, single.point, rtol=1e-10, atol=1e-12)


def test_ridge_points_from_noisy_design():
    """Random design: converged interior starts still land near the filament."""
    rng = np.random.Generator(np.random.Philox(77))
    X = rng.uniform(-2, 2, size=(600, 2))
    ds = Dataset(x=X, y=np.exp(-X[:, 1] ** 2))
    model = fit(ds, T2, GAUSSIAN, h=0.55)
    starts = X[(np.abs(X[:, 0]) < 1.4) & (np.abs(X[:, 1]) < 0.45)][:80]
    out = ridge_points(model, starts, RidgeConfig.for_bandwidth(0.55, s=2))
    finals = np.array([p.point[1] for p in out if p.converged])
    assert len(finals) >= 60
    assert np.quantile(np.abs(finals), 0.9) < 0.2
