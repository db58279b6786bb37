import pytest
import numpy as np
from shapeservo.control.local_target import local_target, projection_ratio
from shapeservo.feature.pca import ShapeWindow, fit_basis, project
from shapeservo.geometry.contour import Contour


def fitted(seed=0, K=10, M=6, k=3):
    rng = np.random.default_rng(seed)
    window = ShapeWindow([Contour(rng.normal(size=(K, 2))) for _ in range(M)])
    return window, fit_basis(window, k=k)


class TestProjectionRatio:

    def test_values(self):
        assert projection_ratio(np.array([1.0, -1.0, 0.0, 2.0]), 2) == 0.5
        assert projection_ratio(np.array([1.0, 0.0, 0.0]), 1) == 1.0

    def test_zero_projection(self):
        assert projection_ratio(np.zeros(5), 2) == 0.0


class TestLocalTarget:

    def test_current_equals_target(self):
        window, basis = fitted()
        current = window.contours[-1]
        result = local_target(basis, current, current)
        assert result.eta == 1
        assert result.contour is current
        assert np.allclose(result.features, project(basis, current))

    def test_target_in_subspace(self):
        window, basis = fitted()
        target = Contour.from_vector(basis.mean + np.dot(basis.Uk, (0.5, -0.2, 0.1)))
        current = Contour.from_vector(basis.mean + np.dot(basis.Uk, (0.1, 0.1, 0.1)))
        result = local_target(basis, current, target, epsilon_psi=0.8)
        assert result.eta == 1
        assert np.isclose(result.psi, 1.0)
        assert np.allclose(result.features, (0.5, -0.2, 0.1))
        assert not result.capped

    def test_walks_back_toward_current(self):
        # The target is mostly outside the subspace; partial steps are
        # dominated by the in-subspace current contour.
        window, basis = fitted()
        current = Contour.from_vector(basis.mean + np.dot(basis.Uk, (1.0, 1.0, 1.0)))
        outside = basis.U[:, 10]
        target = Contour.from_vector(current.vector + 2.0 * outside)
        result = local_target(basis, current, target, epsilon_psi=0.8, eta_max=64)
        assert result.eta > 1
        assert result.psi >= 0.8
        expected = current.vector + (target.vector - current.vector) / result.eta
        assert np.allclose(result.contour.vector, expected)

    def test_capped(self):
        window, basis = fitted()
        current = Contour.from_vector(basis.mean + np.dot(basis.Uk, (1.0, 1.0, 1.0)))
        target = Contour.from_vector(current.vector + 100.0 * basis.U[:, 10])
        result = local_target(basis, current, target, epsilon_psi=1.0, eta_max=4)
        assert result.capped
        assert 1 <= result.eta <= 4

    def test_exits_within_cap(self):
        window, basis = fitted(seed=3)
        rng = np.random.default_rng(8)
        for _ in range(20):
            target = Contour(rng.normal(size=(10, 2)))
            result = local_target(basis, window.contours[-1], target, 0.8, eta_max=16)
            assert 1 <= result.eta <= 16
            assert 0.0 <= result.psi <= 1.0
            assert result.features.size == 3
