import abc
from shapeservo.geometry.contour import Contour
from shapeservo.geometry.pose import Pose2D
import logging

logger = logging.getLogger(__name__)


class Plant(abc.ABC):
    """ Something a planar end-effector can move and a camera can observe.
    Plants are owned by a single servo run and change state with `move`.
    This is an abstract base class which defines the methods concrete plants
    should implement.
    """

    @property
    @abc.abstractmethod
    def pose(self) -> Pose2D:
        """ The controlled end-effector pose.
        """
        pass

    @property
    @abc.abstractmethod
    def characteristic_length(self) -> float:
        """ Length scale of the object, used to size random motions.
        """
        pass

    @abc.abstractmethod
    def contour(self) -> Contour:
        """ The noise-free contour of the current configuration.
        """
        pass

    @abc.abstractmethod
    def move(self, delta: Pose2D) -> None:
        """ Applies an end-effector motion increment.
        """
        pass
