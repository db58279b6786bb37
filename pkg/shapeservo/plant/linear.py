import numpy as np
from shapeservo.geometry.contour import Contour
from shapeservo.geometry.pose import Pose2D
from shapeservo.plant.plant import Plant
import logging

logger = logging.getLogger(__name__)


class LinearPlant(Plant):
    """ A synthetic plant whose contour is exactly linear in the accumulated
    end-effector motion, ``c = c0 + G r``.

    Useful where an exact oracle is needed: every feature difference it
    produces is a fixed linear map of the commanded motion.

    Parameters
    ----------
    base : Contour
        The contour at zero displacement.
    gain : numpy.ndarray
        A (2K, 3) matrix mapping (dx, dy, dtheta) to contour displacement.
    characteristic_length : float
        Scale of the random initialisation motions.
    """

    def __init__(self, base: Contour, gain, characteristic_length: float = 1.0):
        super(LinearPlant, self).__init__()
        gain = np.asarray(gain, dtype=float)
        if gain.shape != (base.vector.size, 3):
            raise ValueError(
                "Gain must be (2K, 3).", {"expected": (base.vector.size, 3), "got": gain.shape}
            )
        self.base = base
        self.gain = gain
        self._length = float(characteristic_length)
        self._displacement = np.zeros(3)

    @classmethod
    def random(cls, K: int, rng: np.random.Generator, scale: float = 1.0):
        """ A plant with a random base contour and a random full-rank gain.
        """
        base = Contour(rng.normal(0.0, scale, size=(K, 2)))
        gain = rng.normal(0.0, scale, size=(2 * K, 3))
        return cls(base, gain)

    @property
    def displacement(self) -> np.ndarray:
        """ Accumulated (dx, dy, dtheta) since construction, not wrapped.
        """
        return self._displacement.copy()

    @property
    def pose(self) -> Pose2D:
        return Pose2D.from_vector(self._displacement)

    @property
    def characteristic_length(self) -> float:
        return self._length

    def contour(self) -> Contour:
        return Contour.from_vector(self.base.vector + np.dot(self.gain, self._displacement))

    def move(self, delta: Pose2D) -> None:
        self._displacement = self._displacement + delta.as_vector()
