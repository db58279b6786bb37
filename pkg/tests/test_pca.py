import pytest
import numpy as np
import pandas as pd
from shapeservo.common.errors import ContourError, DegenerateWindowError
from shapeservo.feature.pca import (
    ShapeWindow,
    explained_variance,
    fit_basis,
    project,
    project_full,
)
from shapeservo.geometry.contour import Contour


def random_window(K=10, M=6, seed=0):
    rng = np.random.default_rng(seed)
    return ShapeWindow([Contour(rng.normal(size=(K, 2))) for _ in range(M)])


def planar_window(K=8, seed=1):
    # Three contours in a two dimensional affine subspace.
    rng = np.random.default_rng(seed)
    mean = rng.normal(size=2 * K)
    u, w = rng.normal(size=2 * K), rng.normal(size=2 * K)
    coefficients = [(1.0, 0.0), (-0.5, 2.0), (0.3, -1.0)]
    return ShapeWindow([Contour.from_vector(mean + a * u + b * w) for a, b in coefficients])


class TestShapeWindow:

    def test_matrix(self):
        window = random_window(K=5, M=3)
        assert window.matrix.shape == (10, 3)
        assert np.allclose(window.mean, window.matrix.mean(axis=1))

    def test_mixed_sizes(self):
        with pytest.raises(ContourError):
            ShapeWindow([Contour(np.zeros((3, 2))), Contour(np.zeros((4, 2)))])


class TestFitBasis:

    def test_orthonormal(self):
        basis = fit_basis(random_window(), k=3)
        assert np.allclose(np.dot(basis.Uk.T, basis.Uk), np.identity(3), atol=1e-10)
        assert np.allclose(np.dot(basis.U.T, basis.U), np.identity(20), atol=1e-10)

    def test_sigma_sorted(self):
        basis = fit_basis(random_window(), k=3)
        assert np.all(np.diff(basis.sigma) <= 1e-12)
        assert np.all(basis.sigma >= 0.0)
        assert basis.sigma.size == 20

    def test_sigma_are_covariance_eigenvalues(self):
        window = random_window()
        basis = fit_basis(window, k=3)
        shifted = window.matrix - window.mean[:, None]
        eigenvalues = np.sort(np.linalg.eigvalsh(np.dot(shifted, shifted.T)))[::-1]
        assert np.allclose(basis.sigma, eigenvalues, atol=1e-9)

    def test_sign_convention(self):
        basis = fit_basis(random_window(), k=3)
        for j in range(basis.U.shape[1]):
            column = basis.U[:, j]
            assert column[np.argmax(np.abs(column))] > 0.0

    def test_planar_data(self):
        basis = fit_basis(planar_window(), k=2)
        assert np.isclose(explained_variance(basis, 2), 1.0)
        assert np.allclose(basis.sigma[2:], 0.0, atol=1e-10)

    def test_degenerate(self):
        c = Contour(np.arange(10.0).reshape(5, 2))
        with pytest.raises(DegenerateWindowError, match="degenerate window: no shape variation"):
            fit_basis(ShapeWindow([c, c, c]), k=1)

    def test_k_limits(self):
        with pytest.raises(ValueError):
            fit_basis(random_window(M=3), k=4)
        with pytest.raises(ValueError):
            fit_basis(ShapeWindow([Contour(np.zeros((3, 2)))]), k=1)

    def test_translation_covariance(self):
        window = random_window()
        offset = np.random.default_rng(9).normal(size=20)
        shifted = ShapeWindow([Contour.from_vector(c.vector + offset) for c in window.contours])
        a, b = fit_basis(window, k=3), fit_basis(shifted, k=3)
        assert np.allclose(a.Uk, b.Uk, atol=1e-8)
        for c, d in zip(window.contours, shifted.contours):
            assert np.allclose(project(a, c), project(b, d), atol=1e-8)

    def test_reconstruction_optimal(self):
        # No random rank-k subspace reconstructs the window better.
        window = random_window(K=10, M=8, seed=4)
        k = 3
        basis = fit_basis(window, k=k)
        shifted = window.matrix - basis.mean[:, None]

        def residual(Q):
            return np.sum((shifted - np.dot(Q, np.dot(Q.T, shifted))) ** 2)

        best = residual(basis.Uk)
        rng = np.random.default_rng(0)
        for _ in range(500):
            Q, _ = np.linalg.qr(rng.normal(size=(20, k)))
            assert residual(Q) >= best - 1e-8


class TestProjection:

    def test_mean_maps_to_origin(self):
        basis = fit_basis(random_window(), k=3)
        mean = Contour.from_vector(basis.mean)
        assert np.allclose(project(basis, mean), 0.0)
        assert np.allclose(project_full(basis, mean), 0.0)

    def test_basis_vector_coordinates(self):
        basis = fit_basis(random_window(), k=3)
        c = Contour.from_vector(basis.mean + 0.7 * basis.U[:, 0])
        assert np.allclose(project(basis, c), (0.7, 0.0, 0.0))

    def test_full_projection(self):
        window = random_window()
        basis = fit_basis(window, k=3)
        c = window.contours[2]
        full = project_full(basis, c)
        assert np.isclose(np.linalg.norm(full), np.linalg.norm(c.vector - basis.mean))
        assert np.allclose(full[:3], project(basis, c))

    def test_reconstruct_rank_k_data(self):
        window = planar_window()
        basis = fit_basis(window, k=2)
        for c in window.contours:
            assert np.allclose(basis.reconstruct(project(basis, c)).points, c.points)

    def test_dimension_mismatch(self):
        basis = fit_basis(random_window(K=10), k=3)
        with pytest.raises(ContourError):
            project(basis, Contour(np.zeros((4, 2))))


class TestExplainedVariance:

    def test_full_dimension(self):
        basis = fit_basis(random_window(), k=3)
        assert np.isclose(explained_variance(basis, 20), 1.0)

    def test_monotone(self):
        basis = fit_basis(random_window(), k=3)
        values = [explained_variance(basis, k) for k in range(1, 21)]
        assert np.all(np.diff(values) >= -1e-12)
        # strictly increasing while sigma_k > 0: six contours give five
        assert np.all(np.diff(values[:5]) > 0.0)

    def test_singular_convention(self):
        window = random_window()
        eig = fit_basis(window, k=3)
        sing = fit_basis(window, k=3, convention="singular")
        s = np.sqrt(eig.sigma)
        assert np.isclose(sing.explained_variance(2), s[:2].sum() / s.sum())
        assert sing.explained_variance(2) != eig.explained_variance(2)
        with pytest.raises(ValueError):
            fit_basis(window, k=3, convention="other")

    def test_out_of_range(self):
        basis = fit_basis(random_window(), k=3)
        with pytest.raises(ValueError):
            explained_variance(basis, 0)


class TestBasisExport:

    def test_csv(self, tmp_path):
        basis = fit_basis(random_window(K=5, M=4), k=2)
        path = tmp_path / "basis.csv"
        basis.to_csv(path)
        df = pd.read_csv(path)
        assert list(df.columns) == ["row", "mean", "sigma", "u1", "u2"]
        assert len(df) == 10
        assert np.allclose(df["u1"], basis.U[:, 0])
