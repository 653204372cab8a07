"""Layer plans, incremental PCA vs full-batch oracle, projection, MSE objective."""

import numpy as np
import pytest

from patenteb import oracles
from patenteb.distill import (
    ProjectionMatrix,
    fit_incremental_pca,
    layer_plan,
    load_projection,
    mse_distill_objective,
    project,
    store_projection,
)
from patenteb.errors import (
    CorruptFile,
    DimMismatch,
    InsufficientData,
    ShapeMismatch,
    UnknownStudent,
)
from patenteb.seeds import rng_for


class TestLayerPlan:
    def test_published_plans(self):
        expected = {
            "patembed-base": (tuple(range(0, 24, 2)), 768),
            "patembed-base_small": ((0, 3, 6, 9, 12, 15, 18, 21), 512),
            "patembed-small": ((0, 4, 8, 12, 16, 20), 384),
            "patembed-mini": ((0, 6, 12, 18), 256),
            "patembed-nano": ((0, 12), 128),
        }
        for student, (indices, dim) in expected.items():
            plan = layer_plan(student)
            assert plan.teacher_layer_indices == indices
            assert plan.target_dim == dim

    def test_stride_regularity(self):
        for student in ("base", "base_small", "small", "mini", "nano"):
            idx = layer_plan(student).teacher_layer_indices
            strides = {b - a for a, b in zip(idx, idx[1:])}
            assert len(strides) <= 1
            assert idx[0] == 0
            assert all(0 <= i <= 23 for i in idx)

    def test_unknown_student(self):
        with pytest.raises(UnknownStudent):
            layer_plan("patembed-giant")


def _correlated_data(rng, n=10_000, dim=16):
    scales = np.array([2.0 ** (-(i / 2)) for i in range(dim)]) * 2.0
    return rng.standard_normal((n, dim)) * scales + rng.standard_normal(dim)


class TestIncrementalPca:
    def test_exact_subspace_recovery(self):
        rng = rng_for(0, "pca-subspace")
        base = rng.standard_normal((5000, 3))
        data = np.zeros((5000, 8))
        data[:, :3] = base  # data lies in the first 3 coordinates
        proj = fit_incremental_pca(iter(data), d=3, batch=512, seed=0)
        leftover = np.abs(proj.w[:, 3:]).max()
        assert leftover <= 1e-8

    def test_diagonal_covariance_axes_and_variances(self):
        rng = rng_for(0, "pca-diag")
        stds = np.array([2.0, 1.0, 0.5, 0.25, 0.1])
        data = rng.standard_normal((10_000, 5)) * stds
        proj = fit_incremental_pca(iter(data), d=3, batch=1024, seed=0)
        comps, variances, _ = oracles.pca_fullbatch(data, 3)
        # principal axes align with coordinate axes (up to sampling noise)
        for row in proj.w:
            assert np.max(np.abs(row)) > 0.99
        assert np.max(np.abs(proj.explained_variance - variances) / variances) <= 1e-6

    def test_matches_fullbatch_oracle(self):
        rng = rng_for(0, "pca-oracle")
        data = _correlated_data(rng, n=10_000, dim=24)
        proj = fit_incremental_pca(iter(data), d=6, batch=1024, seed=0)
        comps, variances, mean = oracles.pca_fullbatch(data, 6)
        angles = oracles.principal_angles(proj.w, comps)
        assert np.max(angles) <= 1e-4
        assert np.max(np.abs(proj.explained_variance - variances) / variances) <= 1e-6
        assert np.max(np.abs(proj.mean - mean)) <= 1e-9

    def test_orthonormal_rows_and_descending_variance(self):
        rng = rng_for(0, "pca-ortho")
        data = _correlated_data(rng, n=4000, dim=12)
        proj = fit_incremental_pca(iter(data), d=5, batch=256, seed=0)
        gram = proj.w @ proj.w.T
        assert np.max(np.abs(gram - np.eye(5))) <= 1e-6
        assert np.all(np.diff(proj.explained_variance) <= 1e-12)

    def test_fitted_subspace_beats_coordinate_subspaces(self):
        rng = rng_for(0, "pca-opt")
        data = _correlated_data(rng, n=4000, dim=10)
        d = 3
        proj = fit_incremental_pca(iter(data), d=d, batch=512, seed=0)
        centered = data - data.mean(axis=0)
        fitted_var = np.sum(np.var(centered @ proj.w.T, axis=0, ddof=1))
        import itertools

        for axes in itertools.combinations(range(10), d):
            coord_var = np.sum(np.var(centered[:, list(axes)], axis=0, ddof=1))
            assert fitted_var >= coord_var - 1e-9

    def test_deterministic_given_seed_and_order(self):
        rng = rng_for(0, "pca-det")
        data = rng.standard_normal((3000, 8))
        a = fit_incremental_pca(iter(data), d=3, sample_cap=1000, batch=128, seed=5)
        b = fit_incremental_pca(iter(data), d=3, sample_cap=1000, batch=128, seed=5)
        assert np.array_equal(a.w, b.w)

    def test_reservoir_respects_cap(self):
        rng = rng_for(0, "pca-cap")
        data = rng.standard_normal((5000, 6))
        proj = fit_incremental_pca(iter(data), d=2, sample_cap=500, batch=64, seed=1)
        assert proj.w.shape == (2, 6)

    def test_insufficient_data(self):
        with pytest.raises(InsufficientData):
            fit_incremental_pca(iter(np.ones((3, 8))), d=4)

    def test_uncentered_mode(self):
        rng = rng_for(0, "pca-uncentered")
        data = rng.standard_normal((2000, 6)) + 5.0
        proj = fit_incremental_pca(iter(data), d=2, batch=256, seed=0, centered=False)
        assert np.allclose(proj.mean, 0.0)
        # literal-formula projection: W x without mean subtraction
        x = data[0]
        assert np.allclose(project(proj, x), proj.w @ x)


class TestProject:
    def _proj(self):
        w = np.array([[1.0, 0, 0, 0], [0, 1.0, 0, 0]])
        return ProjectionMatrix(
            w=w, mean=np.array([1.0, 2.0, 3.0, 4.0]), explained_variance=np.array([2.0, 1.0])
        )

    def test_mean_maps_to_zero(self):
        proj = self._proj()
        assert np.allclose(project(proj, proj.mean), 0.0)

    def test_principal_axis_maps_to_basis(self):
        proj = self._proj()
        x = proj.mean + np.array([1.0, 0, 0, 0])
        assert np.allclose(project(proj, x), [1.0, 0.0])

    def test_norm_preserved_in_subspace(self):
        rng = rng_for(0, "proj-norm")
        data = rng.standard_normal((500, 6))
        data[:, 2:] = 0.0
        proj = fit_incremental_pca(iter(data), d=2, batch=64, seed=0)
        x = np.array([3.0, -4.0, 0, 0, 0, 0]) + proj.mean
        assert np.linalg.norm(project(proj, x)) == pytest.approx(5.0, abs=1e-6)

    def test_dim_mismatch(self):
        with pytest.raises(DimMismatch):
            project(self._proj(), np.ones(5))


class TestMseObjective:
    def _proj(self, dim=6, d=2):
        rng = rng_for(0, "mse-proj")
        data = rng.standard_normal((1000, dim))
        return fit_incremental_pca(iter(data), d=d, batch=128, seed=0)

    def test_student_equals_target_gives_zero(self):
        proj = self._proj()
        rng = rng_for(0, "mse-zero")
        teacher = rng.standard_normal((10, 6))
        student = project(proj, teacher)
        value, grad = mse_distill_objective(student, teacher, proj)
        assert value == pytest.approx(0.0, abs=1e-18)
        assert np.allclose(grad, 0.0)

    def test_single_row_offset_gives_squared_delta(self):
        proj = self._proj()
        teacher = np.ones((1, 6))
        target = project(proj, teacher)
        delta = 0.37
        student = target + np.array([[delta, 0.0]])
        value, _ = mse_distill_objective(student, teacher, proj)
        assert value == pytest.approx(delta**2, rel=1e-12)

    def test_gradient_finite_difference(self):
        proj = self._proj()
        rng = rng_for(0, "mse-grad")
        teacher = rng.standard_normal((4, 6))
        student = rng.standard_normal((4, 2))
        value, grad = mse_distill_objective(student, teacher, proj)
        fd = oracles.finite_difference_gradient(
            lambda x: mse_distill_objective(x, teacher, proj)[0], student.copy()
        )
        assert oracles.max_relative_error(grad, fd) <= 1e-6

    def test_shape_mismatch(self):
        proj = self._proj()
        with pytest.raises(ShapeMismatch):
            mse_distill_objective(np.ones((3, 2)), np.ones((4, 6)), proj)


class TestProjectionFile:
    def test_round_trip(self, tmp_path):
        rng = rng_for(0, "proj-file")
        data = rng.standard_normal((1000, 6))
        proj = fit_incremental_pca(iter(data), d=2, batch=128, seed=0)
        path = tmp_path / "proj.bin"
        store_projection(proj, path)
        loaded = load_projection(path)
        assert loaded.d == 2 and loaded.dim == 6 and loaded.centered
        # values survive the float32 round trip
        assert np.allclose(loaded.w, proj.w, atol=1e-6)
        assert np.allclose(loaded.mean, proj.mean, atol=1e-6)

    def test_corrupt_magic(self, tmp_path):
        path = tmp_path / "bad.bin"
        path.write_bytes(b"NOT-A-PROJECTION")
        with pytest.raises(CorruptFile):
            load_projection(path)
