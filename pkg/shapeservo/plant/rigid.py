from __future__ import annotations
from dataclasses import dataclass, replace
import numpy as np
from shapeservo.geometry.contour import Contour, ResampleParams, resample_uniform
from shapeservo.geometry.pose import Pose2D
from shapeservo.plant.plant import Plant
import logging

logger = logging.getLogger(__name__)


def rectangle_template(width: float = 1.0, height: float = 0.5, K: int = 50) -> Contour:
    """ Returns a perimeter-uniform sampling of a rectangle in its body frame.

        The grasp point is the middle of the bottom edge, placed at the body
        origin, and is the first sample. Samples run clockwise from there.

        Parameters
        ----------
        width : float
            Extent along the body x axis.
        height : float
            Extent along the body y axis.
        K : int
            Number of samples.
    """
    if not (width > 0.0 and height > 0.0):
        raise ValueError("Rectangle sides must be positive.", (width, height))
    half = 0.5 * width
    outline = np.array(
        [
            (0.0, 0.0),
            (-half, 0.0),
            (-half, height),
            (half, height),
            (half, 0.0),
            (0.0, 0.0),
        ]
    )
    return resample_uniform(outline, ResampleParams(K)).contour


@dataclass(frozen=True)
class RigidShape:
    """ A rigid outline held at its grasp point.

    Attributes
    ----------
    template : Contour
        Samples in the body frame. The body origin is the grasp point and the
        rotation centre.
    pose : Pose2D
        World pose of the body frame.
    """

    template: Contour
    pose: Pose2D = Pose2D()

    def __post_init__(self):
        object.__setattr__(self, "pose", self.pose.wrapped())

    @property
    def width(self) -> float:
        return float(np.ptp(self.template.points[:, 0]))

    @property
    def height(self) -> float:
        return float(np.ptp(self.template.points[:, 1]))


def world_contour(shape: RigidShape) -> Contour:
    """ Template points rotated by the pose angle and translated by the pose
        position, in template order.
    """
    return Contour(shape.pose.transform_points(shape.template.points))


def apply_motion(shape: RigidShape, delta: Pose2D) -> RigidShape:
    """ Translates the grasp point in the world frame and rotates the shape
        about it.
    """
    return replace(shape, pose=shape.pose.moved(delta))


class RigidPlant(Plant):
    """ A rigid shape moved by the end-effector holding its grasp point.
    """

    def __init__(self, shape: RigidShape):
        super(RigidPlant, self).__init__()
        self.shape = shape

    def __repr__(self):
        return "RigidPlant(K={}, pose={})".format(self.shape.template.K, self.shape.pose)

    @property
    def pose(self) -> Pose2D:
        return self.shape.pose

    @property
    def characteristic_length(self) -> float:
        return self.shape.width

    def contour(self) -> Contour:
        return world_contour(self.shape)

    def move(self, delta: Pose2D) -> None:
        self.shape = apply_motion(self.shape, delta)
