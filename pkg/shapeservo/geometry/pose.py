from __future__ import annotations
from dataclasses import dataclass, replace
import numpy as np
from shapeservo.geometry.utils import wrap_angle, rotation_2d
import logging

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Pose2D:
    """ A planar pose, or a planar motion increment.

    Attributes
    ----------
    x : float
        Position along the world x axis.
    y : float
        Position along the world y axis.
    theta : float
        Counterclockwise orientation in radians. Poses keep it wrapped to
        (-pi, pi]; increments may hold any finite value.
    """

    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        if not np.all(np.isfinite([self.x, self.y, self.theta])):
            raise ValueError("Pose components must be finite.", self)

    def __repr__(self):
        return "Pose2D(x={:.4f}, y={:.4f}, theta={:.4f})".format(
            self.x, self.y, self.theta
        )

    @classmethod
    def identity(cls) -> Pose2D:
        return cls(0.0, 0.0, 0.0)

    @classmethod
    def from_vector(cls, vector) -> Pose2D:
        vector = np.asarray(vector, dtype=float).ravel()
        if vector.size != 3:
            raise ValueError("Pose vectors have three components (x, y, theta).")
        return cls(float(vector[0]), float(vector[1]), float(vector[2]))

    @classmethod
    def from_matrix(cls, matrix) -> Pose2D:
        matrix = np.asarray(matrix, dtype=float)
        if matrix.shape != (3, 3):
            raise ValueError("Must be a 3x3 transform matrix")
        theta = np.arctan2(matrix[1, 0], matrix[0, 0])
        return cls(float(matrix[0, 2]), float(matrix[1, 2]), wrap_angle(theta))

    def as_vector(self) -> np.ndarray:
        return np.array([self.x, self.y, self.theta])

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x, self.y])

    def matrix(self) -> np.ndarray:
        """ The 3-by-3 homogeneous transform of this pose.
        """
        mat = np.identity(3)
        mat[0:2, 0:2] = rotation_2d(self.theta)
        mat[0:2, 2] = (self.x, self.y)
        return mat

    def wrapped(self) -> Pose2D:
        return replace(self, theta=wrap_angle(self.theta))

    # Group operations

    def compose(self, other: Pose2D) -> Pose2D:
        """ Returns `self * other`: `other` expressed in this pose's frame.
        """
        return Pose2D.from_matrix(np.dot(self.matrix(), other.matrix()))

    def inverse(self) -> Pose2D:
        return Pose2D.from_matrix(np.linalg.inv(self.matrix()))

    def moved(self, delta: Pose2D) -> Pose2D:
        """ Applies a world-frame increment: the translation is added in the
        world frame and the rotation about the pose's own origin.
        """
        return Pose2D(
            self.x + delta.x, self.y + delta.y, wrap_angle(self.theta + delta.theta)
        )

    def __neg__(self) -> Pose2D:
        return Pose2D(-self.x, -self.y, -self.theta)

    def transform_points(self, points) -> np.ndarray:
        """ Maps an (N, 2) array of body-frame points into the world frame.
        """
        points = np.asarray(points, dtype=float)
        return np.dot(points, rotation_2d(self.theta).T) + self.position
