import pytest
import numpy as np
from shapeservo.geometry.pose import Pose2D


class TestPose2D:

    def test_init(self):
        assert Pose2D() == Pose2D.identity()
        assert np.allclose(Pose2D(1, 2, 0.3).as_vector(), (1, 2, 0.3))
        with pytest.raises(ValueError):
            Pose2D(np.nan, 0.0, 0.0)

    def test_matrix_round_trip(self):
        pose = Pose2D(0.4, -1.2, 2.5)
        other = Pose2D.from_matrix(pose.matrix())
        assert np.allclose(other.as_vector(), pose.as_vector())

    def test_compose_identity(self):
        pose = Pose2D(0.4, -1.2, 2.5)
        assert np.allclose(pose.compose(Pose2D.identity()).as_vector(), pose.as_vector())
        assert np.allclose(Pose2D.identity().compose(pose).as_vector(), pose.as_vector())

    def test_compose_associative(self):
        rng = np.random.default_rng(3)
        a, b, c = (Pose2D.from_vector(rng.uniform(-1, 1, 3)) for _ in range(3))
        left = a.compose(b).compose(c)
        right = a.compose(b.compose(c))
        assert np.allclose(left.as_vector(), right.as_vector())

    def test_inverse(self):
        pose = Pose2D(0.4, -1.2, 2.5)
        assert np.allclose(pose.compose(pose.inverse()).as_vector(), (0, 0, 0))

    def test_moved_and_back(self):
        rng = np.random.default_rng(7)
        pose = Pose2D(0.1, 0.2, 0.3)
        deltas = [Pose2D.from_vector(rng.uniform(-0.5, 0.5, 3)) for _ in range(20)]
        moved = pose
        for d in deltas:
            moved = moved.moved(d)
        for d in reversed(deltas):
            moved = moved.moved(-d)
        assert np.allclose(moved.as_vector(), pose.as_vector(), atol=1e-12)

    def test_moved_wraps(self):
        pose = Pose2D(0.0, 0.0, 3.0).moved(Pose2D(0.0, 0.0, 1.0))
        assert np.isclose(pose.theta, 4.0 - 2 * np.pi)

    def test_transform_points(self):
        pose = Pose2D(0.0, 0.0, np.pi / 2)
        assert np.allclose(pose.transform_points([[1.0, 0.0]]), [[0.0, 1.0]])
        pose = Pose2D(2.0, 3.0, 0.0)
        points = np.array([[0.0, 0.0], [1.0, 1.0]])
        assert np.allclose(pose.transform_points(points), points + (2.0, 3.0))
