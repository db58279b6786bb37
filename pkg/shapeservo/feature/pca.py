""" Principal component parameterisation of windows of contours.

A window of M contours is stacked column-wise into the data matrix
``Gamma`` (2K x M). Its columns are shifted by the mean contour and the
covariance ``C = Gamma_bar Gamma_bar^T`` is diagonalised. The first k
eigenvectors span the feature space; the feature vector of a contour is
``s = U(k)^T (c - c_bar)``.
"""
from __future__ import annotations
from dataclasses import dataclass, field
from typing import Sequence
import numpy as np
import pandas as pd
from shapeservo.common.errors import ContourError, DegenerateWindowError
from shapeservo.geometry.contour import Contour
import logging

logger = logging.getLogger(__name__)

# A feature vector is a plain k-element float array.
FeatureVector = np.ndarray

SPECTRUM_CONVENTIONS = ("covariance", "singular")


@dataclass(frozen=True, eq=False)
class ShapeWindow:
    """ An ordered collection of contours sharing one sample count.
    """

    contours: Sequence[Contour]

    def __post_init__(self):
        contours = tuple(self.contours)
        if len(contours) < 1:
            raise ValueError("A window holds at least one contour.")
        sizes = {c.K for c in contours}
        if len(sizes) != 1:
            raise ContourError("incomparable contours", {"sizes": sorted(sizes)})
        object.__setattr__(self, "contours", contours)

    def __len__(self):
        return len(self.contours)

    @property
    def matrix(self) -> np.ndarray:
        """ The data matrix, one flattened contour per column.
        """
        return np.column_stack([c.vector for c in self.contours])

    @property
    def mean(self) -> np.ndarray:
        return np.mean(self.matrix, axis=1)


@dataclass(frozen=True, eq=False)
class ProjectionBasis:
    """ Result of `fit_basis`.

    Attributes
    ----------
    mean : numpy.ndarray
        The mean contour vector of the fitted window.
    U : numpy.ndarray
        Orthogonal (2K, 2K) matrix of covariance eigenvectors, ordered by
        decreasing eigenvalue. Each column's largest-magnitude entry is positive.
    sigma : numpy.ndarray
        The 2K eigenvalues of the covariance, nonincreasing.
    k : int
        Retained feature dimension.
    convention : str
        Spectrum used by `explained_variance`: "covariance" uses `sigma`,
        "singular" uses the singular values of the mean-shifted window.
    """

    mean: np.ndarray = field(repr=False)
    U: np.ndarray = field(repr=False)
    sigma: np.ndarray = field(repr=False)
    k: int
    convention: str = "covariance"

    @property
    def dimension(self) -> int:
        return self.mean.size

    @property
    def Uk(self) -> np.ndarray:
        return self.U[:, : self.k]

    @property
    def singular_values(self) -> np.ndarray:
        return np.sqrt(np.maximum(self.sigma, 0.0))

    def project(self, contour: Contour) -> FeatureVector:
        return project(self, contour)

    def project_full(self, contour: Contour) -> np.ndarray:
        return project_full(self, contour)

    def reconstruct(self, s) -> Contour:
        """ The contour ``c_bar + U(k) s``.
        """
        s = np.asarray(s, dtype=float)
        return Contour.from_vector(self.mean + np.dot(self.U[:, : s.size], s))

    def explained_variance(self, k: int) -> float:
        return explained_variance(self, k)

    def to_dataframe(self) -> pd.DataFrame:
        """ Tabulates the mean, the spectrum and the first k eigenvectors, one
        row per contour coordinate.
        """
        columns = {"mean": self.mean, "sigma": self.sigma}
        for j in range(self.k):
            columns["u{}".format(j + 1)] = self.U[:, j]
        return pd.DataFrame(columns)

    def to_csv(self, path):
        self.to_dataframe().to_csv(path, index_label="row", float_format="%.12g")
        logger.info("Wrote basis (k={}) to {}".format(self.k, path))


def _fix_signs(U):
    idx = np.argmax(np.abs(U), axis=0)
    signs = np.sign(U[idx, np.arange(U.shape[1])])
    signs[signs == 0] = 1.0
    return U * signs


def fit_basis(window: ShapeWindow, k: int = 3, convention: str = "covariance") -> ProjectionBasis:
    """ Fits a PCA basis to a window of contours.

        Parameters
        ----------
        window : ShapeWindow
            At least two contours.
        k : int
            Number of retained components, at most ``min(2K, M)``.
        convention : str
            Spectrum convention for explained variance, "covariance" or
            "singular".

        Returns
        -------
        ProjectionBasis

        Raises
        ------
        DegenerateWindowError
            If all contours in the window are identical.
    """
    if convention not in SPECTRUM_CONVENTIONS:
        raise ValueError("Unknown spectrum convention.", convention)
    M = len(window)
    if M < 2:
        raise ValueError("Fitting a basis needs at least two contours.", M)
    data = window.matrix
    n = data.shape[0]
    if not 1 <= k <= min(n, M):
        raise ValueError("k must be in [1, min(2K, M)].", {"k": k, "2K": n, "M": M})
    mean = np.mean(data, axis=1)
    shifted = data - mean[:, None]
    scale = max(1.0, float(np.max(np.abs(data))))
    if np.max(np.abs(shifted)) <= 1e-13 * scale:
        raise DegenerateWindowError("degenerate window: no shape variation")

    # SVD of the shifted data: the left singular vectors are the eigenvectors
    # of C and the squared singular values its eigenvalues.
    U, singular, _ = np.linalg.svd(shifted, full_matrices=True)
    sigma = np.zeros(n)
    sigma[: singular.size] = singular ** 2
    return ProjectionBasis(
        mean=mean, U=_fix_signs(U), sigma=sigma, k=int(k), convention=convention
    )


def _check_dimension(basis: ProjectionBasis, contour: Contour):
    if contour.vector.size != basis.dimension:
        raise ContourError(
            "incomparable contours",
            {"basis": basis.dimension // 2, "contour": contour.K},
        )


def project(basis: ProjectionBasis, contour: Contour) -> FeatureVector:
    """ Feature vector ``U(k)^T (c - c_bar)``.
    """
    _check_dimension(basis, contour)
    return np.dot(basis.Uk.T, contour.vector - basis.mean)


def project_full(basis: ProjectionBasis, contour: Contour) -> np.ndarray:
    """ Coordinates of ``c - c_bar`` in the complete eigenvector basis.
    """
    _check_dimension(basis, contour)
    return np.dot(basis.U.T, contour.vector - basis.mean)


def explained_variance(basis: ProjectionBasis, k: int) -> float:
    """ Fraction of the window's spectrum carried by the first k components.
    """
    if not 1 <= k <= basis.dimension:
        raise ValueError("k must be in [1, 2K].", k)
    if basis.convention == "singular":
        spectrum = basis.singular_values
    else:
        spectrum = basis.sigma
    total = float(np.sum(spectrum))
    if total <= 0.0:
        raise DegenerateWindowError("degenerate window: no shape variation")
    return float(np.sum(spectrum[:k]) / total)
