from __future__ import annotations
from dataclasses import dataclass
from typing import Tuple
import numpy as np
from shapeservo.common.errors import ContourError
from shapeservo.feature.pca import ShapeWindow
from shapeservo.geometry.contour import Contour
from shapeservo.geometry.pose import Pose2D
import logging

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SlidingWindow:
    """ The most recent motions and the contours that bracket them.

    Motion ``motions[j]`` took the object from ``contours[j]`` to
    ``contours[j + 1]``, so there is always one more contour than motion.
    Newest data is last. At most `size` motions are held.

    Attributes
    ----------
    size : int
        Window size M.
    motions : tuple of Pose2D
    contours : tuple of Contour
    """

    size: int
    motions: Tuple[Pose2D, ...] = ()
    contours: Tuple[Contour, ...] = ()

    def __post_init__(self):
        if int(self.size) != self.size or self.size < 1:
            raise ValueError("Window size must be an integer >= 1.", self.size)
        object.__setattr__(self, "motions", tuple(self.motions))
        object.__setattr__(self, "contours", tuple(self.contours))
        if len(self.contours) != len(self.motions) + 1:
            raise ValueError(
                "A window holds one more contour than motions.",
                {"motions": len(self.motions), "contours": len(self.contours)},
            )
        if len(self.motions) > self.size:
            raise ValueError("Window overfilled.", len(self.motions))

    @classmethod
    def start(cls, size: int, contour: Contour) -> SlidingWindow:
        """ An empty window anchored at the initial contour.
        """
        return cls(size, (), (contour,))

    def __len__(self):
        return len(self.motions)

    @property
    def is_full(self) -> bool:
        return len(self.motions) == self.size

    @property
    def latest(self) -> Contour:
        return self.contours[-1]

    @property
    def delta_R(self) -> np.ndarray:
        """ The (3, m) matrix of motion columns.
        """
        if not self.motions:
            return np.zeros((3, 0))
        return np.column_stack([m.as_vector() for m in self.motions])

    @property
    def gamma(self) -> np.ndarray:
        """ The (2K, m + 1) matrix of contour columns.
        """
        return np.column_stack([c.vector for c in self.contours])

    def shape_window(self) -> ShapeWindow:
        return ShapeWindow(self.contours)


def push_sample(window: SlidingWindow, delta_r: Pose2D, new_contour: Contour) -> SlidingWindow:
    """ Appends a (motion, resulting contour) pair, evicting the oldest pair
        once the window is full.
    """
    if new_contour.K != window.latest.K:
        raise ContourError(
            "incomparable contours", {"window": window.latest.K, "new": new_contour.K}
        )
    motions = window.motions + (delta_r,)
    contours = window.contours + (new_contour,)
    if len(motions) > window.size:
        motions = motions[1:]
        contours = contours[1:]
    return SlidingWindow(window.size, motions, contours)
