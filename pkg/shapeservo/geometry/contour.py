""" Canonical contour representation, uniform resampling and the Average Sample
Error metric.

A contour is an ordered list of K planar samples. Everywhere a vector is needed
the samples are flattened as ``[u1, v1, u2, v2, ..., uK, vK]``.
"""
from __future__ import annotations
from dataclasses import dataclass, field
from typing import Optional
import numpy as np
import pandas as pd
from shapeservo.common.errors import ContourError
from shapeservo.geometry.utils import cumulative_arc_length, close_to_zero
import logging

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Contour:
    """ An ordered sampling of an object outline.

    Attributes
    ----------
    points : numpy.ndarray
        A (K, 2) array of sample coordinates, in sample order. The array is
        made read-only on construction.
    """

    points: np.ndarray

    def __post_init__(self):
        points = np.array(self.points, dtype=float)
        if points.ndim != 2 or points.shape[1] != 2:
            raise ContourError("Contour points must be a (K, 2) array.")
        if points.shape[0] < 2:
            raise ContourError("A contour needs at least two samples.")
        if not np.all(np.isfinite(points)):
            raise ContourError("Contour coordinates must be finite.")
        points.setflags(write=False)
        object.__setattr__(self, "points", points)

    def __repr__(self):
        return "Contour(K={}, first=({:.3f}, {:.3f}))".format(
            self.K, self.points[0, 0], self.points[0, 1]
        )

    def __len__(self):
        return self.K

    @property
    def K(self) -> int:
        return self.points.shape[0]

    @property
    def vector(self) -> np.ndarray:
        """ The flattened 2K-vector.
        """
        return self.points.ravel()

    @classmethod
    def from_vector(cls, vector) -> Contour:
        vector = np.asarray(vector, dtype=float).ravel()
        if vector.size % 2 != 0:
            raise ContourError("Flattened contours have an even length.")
        return cls(vector.reshape(-1, 2))

    def with_noise(self, sigma: float, rng: np.random.Generator) -> Contour:
        """ Returns a copy with zero-mean Gaussian noise added to every coordinate.
        """
        if sigma <= 0.0:
            return self
        return Contour(self.points + rng.normal(0.0, sigma, size=self.points.shape))

    # CSV interface

    def to_dataframe(self) -> pd.DataFrame:
        return pd.DataFrame({"u": self.points[:, 0], "v": self.points[:, 1]})

    def to_csv(self, path):
        self.to_dataframe().to_csv(path, index=False, float_format="%.12g")
        logger.info("Wrote contour with {} samples to {}".format(self.K, path))

    @classmethod
    def read_csv(cls, path) -> Contour:
        df = pd.read_csv(path)
        if list(df.columns) != ["u", "v"]:
            raise ContourError(
                "Contour files need the header `u,v`.", {"got": list(df.columns)}
            )
        return cls(df[["u", "v"]].to_numpy(dtype=float))


@dataclass(frozen=True)
class ResampleParams:
    """ Inputs of uniform resampling.

    Attributes
    ----------
    K_target : int
        Number of samples wanted.
    epsilon : float or None
        Length tolerance of the trailing endpoint check. `None` selects
        ``1e-6 * mu`` where mu is the sample spacing.
    """

    K_target: int = 50
    epsilon: Optional[float] = None

    def __post_init__(self):
        if int(self.K_target) != self.K_target or self.K_target < 2:
            raise ValueError("K_target must be an integer >= 2.", self.K_target)
        if self.epsilon is not None and not self.epsilon > 0.0:
            raise ValueError("epsilon must be positive.", self.epsilon)


@dataclass(frozen=True, eq=False)
class Resampling:
    """ Result of `resample_uniform`.

    Attributes
    ----------
    contour : Contour
        The K_target samples at arc lengths 0, mu, ..., (K_target - 1) mu.
    spacing : float
        The arc length mu between consecutive samples.
    endpoint : numpy.ndarray
        The last input point.
    remainder : float
        Arc length walked since the last emitted sample when the walk ran out
        of input points.
    trailing_appended : bool
        Whether the trailing check fired, i.e. the remainder equals mu within
        epsilon and the endpoint was appended as sample K_target + 1. It is
        false when the walk already emitted a sample at the endpoint.
    samples : numpy.ndarray
        Every point the walk produced, the trailing sample included.
    """

    contour: Contour
    spacing: float
    endpoint: np.ndarray = field(repr=False)
    remainder: float
    trailing_appended: bool
    samples: np.ndarray = field(repr=False)


def _walk(points, mu):
    """ Emits a point every mu of arc length along the polyline. Returns the
        emitted points and the distance walked after the last one.
    """
    current = points[0].copy()
    emitted = [current.copy()]
    dist = 0.0
    index = 1
    while index < len(points):
        following = points[index]
        d = float(np.linalg.norm(following - current))
        if d + dist <= mu:
            dist += d
            current = following
            index += 1
        else:
            current = current + (following - current) * (mu - dist) / d
            emitted.append(current.copy())
            dist = 0.0
    return emitted, dist


def resample_uniform(points, params: ResampleParams = ResampleParams()) -> Resampling:
    """ Resamples an ordered open polyline into points with uniform arc length
        spacing mu = length / K_target.

        Walks the polyline vertex by vertex, emitting a point whenever mu of
        arc length has been covered since the previous one. When the input
        runs out with a remainder of mu (within epsilon) the endpoint is
        appended as the trailing sample.

        Parameters
        ----------
        points : array-like
            An (N, 2) array, ordered along the curve. Closed outlines are
            passed with the start point repeated at the end.
        params : ResampleParams
            Target sample count and endpoint tolerance.

        Returns
        -------
        Resampling
            The contour plus the endpoint bookkeeping of the trailing check.

        Raises
        ------
        ContourError
            If fewer than two points are given or the curve has zero length.

        Example
        -------
        A straight segment of length 10 sampled with five points::

            >>> line = np.column_stack((np.linspace(0, 10, 11), np.zeros(11)))
            >>> resample_uniform(line, ResampleParams(5)).contour.points[:, 0]
            array([0., 2., 4., 6., 8.])
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != 2:
        raise ContourError("Points must be an (N, 2) array.")
    if points.shape[0] < 2:
        raise ContourError("Resampling needs at least two points.")
    length = cumulative_arc_length(points)[-1]
    if close_to_zero(length):
        raise ContourError("zero-length curve")

    K = int(params.K_target)
    mu = length / K
    epsilon = params.epsilon if params.epsilon is not None else 1e-6 * mu

    emitted, remainder = _walk(points, mu)
    trailing = bool(abs(mu - remainder) < epsilon)
    if trailing:
        emitted.append(points[-1].copy())
    samples = np.array(emitted)
    if len(samples) < K:
        logger.debug(
            "Walk emitted {} of {} samples, padding with the endpoint".format(
                len(samples), K
            )
        )
        padding = np.repeat(points[-1:], K - len(samples), axis=0)
        samples = np.vstack([samples, padding])
    return Resampling(
        contour=Contour(samples[:K].copy()),
        spacing=mu,
        endpoint=points[-1].copy(),
        remainder=float(remainder),
        trailing_appended=trailing,
        samples=samples,
    )


def _check_comparable(current: Contour, target: Contour):
    if current.K != target.K:
        raise ContourError(
            "incomparable contours", {"current": current.K, "target": target.K}
        )


def average_sample_error(current: Contour, target: Contour) -> float:
    """ The Average Sample Error ``||c - c*||_2 / 2K``.
    """
    _check_comparable(current, target)
    return float(np.linalg.norm(current.vector - target.vector) / (2 * current.K))


def interpolate_toward(current: Contour, target: Contour, fraction: float) -> Contour:
    """ Returns ``c + fraction (c* - c)``, the point a fraction of the way from
        the current contour to the target.
    """
    _check_comparable(current, target)
    if not 0.0 < fraction <= 1.0:
        raise ValueError("fraction must be in (0, 1].", fraction)
    if fraction == 1.0:
        return target
    return Contour.from_vector(
        current.vector + fraction * (target.vector - current.vector)
    )
