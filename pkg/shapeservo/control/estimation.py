""" Estimation of the local interaction matrix relating motions to feature
changes, ``delta_s = L delta_r``, from the data held in the receding window,
plus the Broyden rank-one update used as a baseline.
"""
from __future__ import annotations
from dataclasses import dataclass, field, replace
from typing import Optional
import numpy as np
import scipy.linalg
from shapeservo.common.errors import EstimationError
from shapeservo.control.window import SlidingWindow
from shapeservo.feature.pca import ProjectionBasis, FeatureVector
from shapeservo.geometry.pose import Pose2D
import logging

logger = logging.getLogger(__name__)

DIRECT = "direct"
INVERSE = "inverse"


@dataclass(frozen=True, eq=False)
class InteractionModel:
    """ An interaction matrix estimate.

    Attributes
    ----------
    matrix : numpy.ndarray
        Direct form maps motions to feature changes, (k, 3). Inverse form maps
        feature changes to motions, (3, k).
    form : str
        "direct" or "inverse".
    basis : ProjectionBasis or None
        The basis whose features the matrix refers to.
    motion_scale : numpy.ndarray
        Per-component unit of the motions the matrix acts on. Motions are
        divided by it before the matrix is applied, so a scale equal to the
        random motion envelope makes every component of order one. Ones by
        default.
    """

    matrix: np.ndarray
    form: str = DIRECT
    basis: Optional[ProjectionBasis] = field(default=None, repr=False)
    motion_scale: np.ndarray = field(default_factory=lambda: np.ones(3), repr=False)

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=float)
        if matrix.ndim != 2:
            raise ValueError("Interaction matrices are two dimensional.")
        if self.form not in (DIRECT, INVERSE):
            raise ValueError("Unknown interaction form.", self.form)
        if not np.all(np.isfinite(matrix)):
            raise EstimationError("Interaction matrix has non-finite entries.")
        object.__setattr__(self, "matrix", matrix)
        scale = np.array(self.motion_scale, dtype=float).ravel()
        if scale.size != 3 or not np.all(scale > 0.0):
            raise ValueError("Motion scale needs three positive entries.", scale)
        object.__setattr__(self, "motion_scale", scale)

    @property
    def is_inverse(self) -> bool:
        return self.form == INVERSE

    def scaled(self, delta_r) -> np.ndarray:
        """ A motion expressed in the model's motion units.
        """
        return _as_motion(delta_r) / self.motion_scale


def _as_motion(delta_r) -> np.ndarray:
    if isinstance(delta_r, Pose2D):
        return delta_r.as_vector()
    return np.asarray(delta_r, dtype=float).ravel()


def regularised_fit(outputs, inputs, lam: float) -> np.ndarray:
    """ Solves ``X = Y Z^T (Z Z^T + lam I)^-1`` for outputs Y and inputs Z
        given column-wise.

        Raises
        ------
        EstimationError
            If `lam` is zero and the inputs do not have full row rank.
    """
    outputs = np.atleast_2d(np.asarray(outputs, dtype=float))
    inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
    if outputs.shape[1] != inputs.shape[1]:
        raise ValueError(
            "Inputs and outputs need the same number of samples.",
            {"outputs": outputs.shape, "inputs": inputs.shape},
        )
    if lam < 0.0:
        raise ValueError("Tikhonov factor must be non-negative.", lam)
    rows = inputs.shape[0]
    if lam == 0.0 and (
        inputs.shape[1] < rows or np.linalg.matrix_rank(inputs) < rows
    ):
        raise EstimationError("singular normal matrix; increase M or set λ > 0")
    normal = np.dot(inputs, inputs.T) + lam * np.identity(rows)
    rhs = np.dot(outputs, inputs.T)
    # normal is symmetric, solve normal X^T = rhs^T
    try:
        solution = scipy.linalg.solve(normal, rhs.T, assume_a="sym")
    except (scipy.linalg.LinAlgError, ValueError):
        raise EstimationError("singular normal matrix; increase M or set λ > 0")
    return solution.T


def window_feature_differences(window: SlidingWindow, basis: ProjectionBasis) -> np.ndarray:
    """ The (k, m) matrix of consecutive feature differences of the window's
        contours, all projected with `basis`.
    """
    S = np.dot(basis.Uk.T, window.gamma - basis.mean[:, None])
    return np.diff(S, axis=1)


def _motion_scale(motion_scale) -> np.ndarray:
    if motion_scale is None:
        return np.ones(3)
    return np.asarray(motion_scale, dtype=float).ravel()


def estimate_from_differences(
    delta_S, delta_R, lam: float, form: str = DIRECT, basis=None, motion_scale=None
) -> InteractionModel:
    """ Fits an interaction model to explicit difference matrices.

        The columns of `delta_R` are divided by `motion_scale` before the fit.
    """
    scale = _motion_scale(motion_scale)
    delta_R = np.atleast_2d(np.asarray(delta_R, dtype=float)) / scale[:, None]
    if form == DIRECT:
        matrix = regularised_fit(delta_S, delta_R, lam)
    elif form == INVERSE:
        matrix = regularised_fit(delta_R, delta_S, lam)
    else:
        raise ValueError("Unknown interaction form.", form)
    return InteractionModel(matrix, form, basis, scale)


def estimate_interaction(
    window: SlidingWindow, basis: ProjectionBasis, lam: float = 0.01, motion_scale=None
) -> InteractionModel:
    """ Tikhonov-regularised least squares estimate of the direct interaction
        matrix, ``L = dS dR^T (dR dR^T + lam I)^-1``.

        Parameters
        ----------
        window : SlidingWindow
            Holds the motions and the contours bracketing them.
        basis : ProjectionBasis
            Features of every window contour are computed with this basis.
        lam : float
            Tikhonov factor.
        motion_scale : array-like or None
            Unit of each motion component, see `InteractionModel`.

        Raises
        ------
        EstimationError
            If `lam` is zero and the motions are rank deficient.
    """
    if len(window) == 0:
        raise EstimationError("Estimation needs at least one motion in the window.")
    return estimate_from_differences(
        window_feature_differences(window, basis),
        window.delta_R,
        lam,
        DIRECT,
        basis,
        motion_scale,
    )


def estimate_inverse_interaction(
    window: SlidingWindow, basis: ProjectionBasis, lam: float = 0.01, motion_scale=None
) -> InteractionModel:
    """ Estimates the inverse model directly,
        ``L+ = dR dS^T (dS dS^T + lam I)^-1``.
    """
    if len(window) == 0:
        raise EstimationError("Estimation needs at least one motion in the window.")
    return estimate_from_differences(
        window_feature_differences(window, basis),
        window.delta_R,
        lam,
        INVERSE,
        basis,
        motion_scale,
    )


def broyden_update(model: InteractionModel, delta_s, delta_r, beta: float) -> InteractionModel:
    """ Rank-one secant correction
        ``L + beta (ds - L dr) dr^T / (dr^T dr)``.

        Raises
        ------
        EstimationError
            If the motion is zero or the model is in inverse form.
    """
    if model.is_inverse:
        raise EstimationError("Broyden update requires direct form")
    if not 0.0 <= beta <= 1.0:
        raise ValueError("beta must be in [0, 1].", beta)
    dr = model.scaled(delta_r)
    ds = np.asarray(delta_s, dtype=float).ravel()
    denominator = float(np.dot(dr, dr))
    if denominator == 0.0:
        raise EstimationError("Broyden update undefined for zero motion")
    residual = ds - np.dot(model.matrix, dr)
    matrix = model.matrix + beta * np.outer(residual, dr) / denominator
    return replace(model, matrix=matrix)


def predict_one_step(model: InteractionModel, s: FeatureVector, delta_r) -> FeatureVector:
    """ Predicted features after a motion, ``s + L dr``.
    """
    if model.is_inverse:
        raise EstimationError("prediction requires direct form")
    return np.asarray(s, dtype=float) + np.dot(model.matrix, model.scaled(delta_r))
