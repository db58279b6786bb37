import pytest
import numpy as np
from shapeservo.geometry.utils import (
    EPS_ZERO,
    close_to_zero,
    cumulative_arc_length,
    magnitude,
    norm,
    polyline_length,
    rotation_2d,
    wrap_angle,
)


class TestGeometryUtils:

    def test_close_to_zero(self):
        # Value is considered zero if abs(value) < EPS_ZERO
        zero = 0.0
        assert close_to_zero(zero) == True
        assert close_to_zero(zero + 0.9*EPS_ZERO) == True
        assert close_to_zero(zero - 0.9*EPS_ZERO) == True
        assert close_to_zero(zero + EPS_ZERO) == False
        assert close_to_zero(zero - EPS_ZERO) == False

    def test_magnitude(self):
        assert np.isclose(magnitude((3.0, 4.0)), 5.0)

    def test_norm(self):
        v = (1.0, 1.0)
        assert np.allclose(norm(v), np.array(v) / np.sqrt(2.0))

    def test_wrap_angle(self):
        assert np.isclose(wrap_angle(3 * np.pi / 2), -np.pi / 2)
        assert wrap_angle(np.pi) == np.pi
        assert wrap_angle(-np.pi) == np.pi
        angles = wrap_angle(np.array([0.0, 2 * np.pi, 3 * np.pi / 2]))
        assert np.allclose(angles, [0.0, 0.0, -np.pi / 2])

    def test_rotation_2d(self):
        R = rotation_2d(np.pi / 2)
        assert np.allclose(np.dot(R, (1.0, 0.0)), (0.0, 1.0))
        assert np.allclose(np.dot(R.T, R), np.identity(2))

    def test_arc_length(self):
        points = np.array([(0.0, 0.0), (3.0, 0.0), (3.0, 4.0)])
        assert np.allclose(cumulative_arc_length(points), [0.0, 3.0, 7.0])
        assert np.isclose(polyline_length(points), 7.0)
        assert polyline_length(points[:1]) == 0.0
