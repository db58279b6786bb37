""" A simulated camera looking straight down on the plane of motion.

With the optical axis perpendicular to the plane a pinhole camera maps plane
coordinates to image coordinates by a single scale, focal length over
distance, plus the principal point. Contours are then measured in pixels while
motions stay in plant units.
"""
from __future__ import annotations
from dataclasses import dataclass
from typing import Tuple
import numpy as np
from shapeservo.geometry.contour import Contour
from shapeservo.geometry.pose import Pose2D
from shapeservo.plant.plant import Plant
import logging

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Camera:
    """ Perpendicular pinhole camera.

    Attributes
    ----------
    pixels_per_unit : float
        Image scale, focal length in pixels divided by the distance to the
        plane.
    principal_point : tuple of float
        Image coordinates of the plane's origin.
    """

    pixels_per_unit: float = 1.0
    principal_point: Tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not self.pixels_per_unit > 0.0:
            raise ValueError("pixels_per_unit must be positive.", self.pixels_per_unit)
        object.__setattr__(self, "principal_point", tuple(float(v) for v in self.principal_point))

    @classmethod
    def pinhole(cls, focal_length: float, distance: float, principal_point=(0.0, 0.0)) -> Camera:
        """ Camera with focal length in pixels at `distance` plant units from
            the plane.
        """
        if not (focal_length > 0.0 and distance > 0.0):
            raise ValueError("Focal length and distance must be positive.")
        return cls(focal_length / distance, principal_point)

    def image(self, contour: Contour) -> Contour:
        """ The contour in pixels.
        """
        return Contour(np.asarray(self.principal_point) + self.pixels_per_unit * contour.points)

    def to_pixels(self, length: float) -> float:
        return float(length) * self.pixels_per_unit


class ImagedPlant(Plant):
    """ A plant observed through a camera. Contours come back in pixels, poses
    and motions are those of the wrapped plant.
    """

    def __init__(self, plant: Plant, camera: Camera):
        super(ImagedPlant, self).__init__()
        self.plant = plant
        self.camera = camera

    def __repr__(self):
        return "ImagedPlant({}, {:g} px/unit)".format(self.plant, self.camera.pixels_per_unit)

    @property
    def pose(self) -> Pose2D:
        return self.plant.pose

    @property
    def characteristic_length(self) -> float:
        return self.plant.characteristic_length

    def contour(self) -> Contour:
        return self.camera.image(self.plant.contour())

    def move(self, delta: Pose2D) -> None:
        self.plant.move(delta)
