import numpy as np
import logging

logger = logging.getLogger(__name__)


# Precision for comparing floats to zero. Contours are sums of many solver
# outputs so a few hundred ulps of slack is needed.
EPS_ZERO = np.finfo(float).eps * 1000


# Comparisons


def close_to_zero(value) -> bool:
    return bool(np.all(np.absolute(value) < EPS_ZERO))


# Vector helpers


def magnitude(vector):
    return np.sqrt(np.dot(np.array(vector), np.array(vector)))


def norm(vector):
    return np.array(vector) / np.linalg.norm(vector)


def wrap_angle(angle):
    """ Wraps an angle in radians into the half-open interval (-pi, pi].

        >>> wrap_angle(np.pi)
        3.141592653589793
        >>> wrap_angle(-np.pi)
        3.141592653589793
    """
    wrapped = np.arctan2(np.sin(angle), np.cos(angle))
    if np.ndim(wrapped) == 0:
        return np.pi if wrapped <= -np.pi else float(wrapped)
    wrapped = np.asarray(wrapped)
    wrapped[wrapped <= -np.pi] = np.pi
    return wrapped


def rotation_2d(angle):
    """ Counterclockwise 2-by-2 rotation matrix.
    """
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]])


# Polyline helpers


def segment_lengths(points):
    """ Lengths of the segments joining consecutive rows of an (N, 2) array.
    """
    points = np.asarray(points, dtype=float)
    return np.linalg.norm(np.diff(points, axis=0), axis=1)


def cumulative_arc_length(points):
    """ Arc length at every vertex of a polyline, starting from zero.
    """
    return np.concatenate([[0.0], np.cumsum(segment_lengths(points))])


def polyline_length(points) -> float:
    points = np.asarray(points, dtype=float)
    if len(points) < 2:
        return 0.0
    return float(np.sum(segment_lengths(points)))
