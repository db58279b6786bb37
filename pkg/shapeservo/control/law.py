from __future__ import annotations
from dataclasses import dataclass, asdict
import numpy as np
from shapeservo.common.errors import ConfigError, ControlError
from shapeservo.control.estimation import InteractionModel
from shapeservo.feature.pca import FeatureVector, SPECTRUM_CONVENTIONS
from shapeservo.geometry.pose import Pose2D
import logging

logger = logging.getLogger(__name__)

# Singular values below this fraction of the largest are dropped by the
# pseudo-inverse.
PINV_RCOND = 1e-10


@dataclass(frozen=True)
class ControllerConfig:
    """ Parameters of the shape servo controller.

    Attributes
    ----------
    M : int
        Window size, the number of motions used for estimation.
    lambda_ : float
        Tikhonov factor of the interaction estimate.
    epsilon_psi : float
        Local target acceptance threshold on the projection ratio.
    alpha : float
        Control gain.
    k : int
        Feature dimension.
    eta_max : int
        Largest divisor tried by the local target search.
    use_inverse_form : bool
        Estimate the inverse interaction matrix directly instead of
        pseudo-inverting the direct estimate.
    clip_motion : bool
        Clip commanded motions to the random motion envelope. Off by default.
    normalise_step : bool
        Rescale every commanded motion to a fixed length of
        ``alpha / translation_fraction`` envelope units, so that a translation
        alone moves ``alpha`` times the characteristic length. The direction
        is the one given by the control law.
    excitation : float
        Half width of the random offset kept on the commanded pose, as a
        fraction of the motion envelope. Each motion adds the change of the
        offset, so the window keeps motions in every direction while the pose
        stays within the offset of where the control law puts it. Zero turns
        it off.
    translation_fraction : float
        Random motion (and clip) envelope for translations, as a fraction of
        the plant's characteristic length.
    rotation_limit : float
        Random motion (and clip) envelope for rotations, radians.
    ase_threshold : float
        Termination threshold on the Average Sample Error, in the units of
        the observed contours (pixels for imaged plants).
    spectrum : str
        Spectrum convention of the fitted bases.
    """

    M: int = 5
    lambda_: float = 0.01
    epsilon_psi: float = 0.8
    alpha: float = 0.01
    k: int = 3
    eta_max: int = 64
    use_inverse_form: bool = False
    clip_motion: bool = False
    normalise_step: bool = True
    excitation: float = 0.5
    translation_fraction: float = 0.05
    rotation_limit: float = np.radians(5.0)
    ase_threshold: float = 1.0
    spectrum: str = "covariance"

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 1:
            raise ConfigError("M must be an integer >= 1.", self.M)
        if self.lambda_ < 0.0:
            raise ConfigError("lambda must be >= 0.", self.lambda_)
        if not 0.0 <= self.epsilon_psi <= 1.0:
            raise ConfigError("epsilon_psi must be in [0, 1].", self.epsilon_psi)
        if not 0.0 < self.alpha <= 1.0:
            raise ConfigError("alpha must be in (0, 1].", self.alpha)
        if int(self.k) != self.k or self.k < 1:
            raise ConfigError("k must be an integer >= 1.", self.k)
        if self.k > self.M + 1:
            raise ConfigError("k cannot exceed the M + 1 window contours.", self.k)
        if int(self.eta_max) != self.eta_max or self.eta_max < 1:
            raise ConfigError("eta_max must be an integer >= 1.", self.eta_max)
        if not (self.translation_fraction > 0.0 and self.rotation_limit > 0.0):
            raise ConfigError("Motion envelope must be positive.")
        if not 0.0 <= self.excitation <= 1.0:
            raise ConfigError("excitation must be in [0, 1].", self.excitation)
        if not self.ase_threshold > 0.0:
            raise ConfigError("ase_threshold must be positive.", self.ase_threshold)
        if self.spectrum not in SPECTRUM_CONVENTIONS:
            raise ConfigError("Unknown spectrum convention.", self.spectrum)

    @classmethod
    def from_dict(cls, values: dict) -> ControllerConfig:
        values = dict(values)
        if "lambda" in values:
            values["lambda_"] = values.pop("lambda")
        unknown = set(values) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError("Unknown controller keys.", sorted(unknown))
        return cls(**values)

    def to_dict(self) -> dict:
        values = asdict(self)
        values["lambda"] = values.pop("lambda_")
        return values

    def envelope(self, characteristic_length: float) -> np.ndarray:
        """ Half widths (dx, dy, dtheta) of the motion envelope.
        """
        t = self.translation_fraction * characteristic_length
        return np.array([t, t, self.rotation_limit])

    @property
    def step_length(self) -> float:
        """ Length of normalised steps in envelope units.
        """
        return self.alpha / self.translation_fraction


def clip_motion(delta: Pose2D, envelope) -> Pose2D:
    """ Clips each motion component to ``[-envelope, envelope]``.
    """
    envelope = np.asarray(envelope, dtype=float)
    return Pose2D.from_vector(np.clip(delta.as_vector(), -envelope, envelope))


def normalise_step(delta: Pose2D, motion_scale, length: float) -> Pose2D:
    """ Rescales a motion to `length` in the units of `motion_scale`, keeping
        its direction. A zero motion is returned unchanged.
    """
    scale = np.asarray(motion_scale, dtype=float)
    direction = delta.as_vector() / scale
    size = float(np.linalg.norm(direction))
    if size == 0.0:
        return delta
    return Pose2D.from_vector(scale * direction * (length / size))


def control_step(model: InteractionModel, s: FeatureVector, s_star: FeatureVector, alpha: float) -> Pose2D:
    """ One step of the proportional shape servo law.

        The direct form returns ``-alpha pinv(L) (s - s*)`` and the inverse
        form ``-alpha L+ (s - s*)``. The result is in the model's motion units
        and is multiplied back by `model.motion_scale`.

        Raises
        ------
        ControlError
            If the motion is not finite.
    """
    error = np.asarray(s, dtype=float) - np.asarray(s_star, dtype=float)
    if model.is_inverse:
        gain = model.matrix
    else:
        gain = np.linalg.pinv(model.matrix, rcond=PINV_RCOND)
    if gain.shape[1] != error.size:
        raise ValueError(
            "Feature dimension does not match the model.",
            {"model": model.matrix.shape, "features": error.size},
        )
    delta = -alpha * np.dot(gain, error) * model.motion_scale
    if not np.all(np.isfinite(delta)):
        raise ControlError("Control law produced a non-finite motion.", delta)
    return Pose2D.from_vector(delta)
