""" The receding horizon shape servo loop.

The loop starts with M small random motions around the initial configuration
to fill the window, then repeats: fit a basis to the window, find a local
target, estimate the interaction matrix, command a motion and record the new
contour.

Motions are estimated and commanded in units of the random motion envelope.
A small random offset rides on top of the commanded pose so that consecutive
motions never line up, and a window without usable variation is refilled with
a random motion.
"""
from __future__ import annotations
from dataclasses import dataclass, field
from typing import Callable, List, Optional
import numpy as np
import pandas as pd
from shapeservo.common.errors import (
    AppError,
    DegenerateWindowError,
    EstimationError,
    ServoError,
)
from shapeservo.control.estimation import (
    InteractionModel,
    estimate_interaction,
    estimate_inverse_interaction,
)
from shapeservo.control.law import (
    ControllerConfig,
    clip_motion,
    control_step,
    normalise_step,
)
from shapeservo.control.local_target import LocalTarget, local_target
from shapeservo.control.window import SlidingWindow, push_sample
from shapeservo.feature.pca import ProjectionBasis, FeatureVector, fit_basis, project
from shapeservo.geometry.contour import Contour, average_sample_error
from shapeservo.geometry.pose import Pose2D
from shapeservo.plant.plant import Plant
import logging

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class IterationRecord:
    """ Everything the controller used and produced in one control iteration.

    The features and model refer to `basis`, fitted on the window before the
    motion. `contour_after` is the observation that followed the motion.
    """

    iteration: int
    basis: ProjectionBasis = field(repr=False)
    model: InteractionModel = field(repr=False)
    target: LocalTarget = field(repr=False)
    features: FeatureVector = field(repr=False)
    motion: Pose2D
    contour_before: Contour = field(repr=False)
    contour_after: Contour = field(repr=False)
    ase_before: float
    ase_after: float


@dataclass
class ServoTrace:
    """ Per-iteration log of a servo run.

    Attributes
    ----------
    k : int
        Feature dimension, which fixes the feature columns.
    rows : list of dict
        One row per observation. Row 0 is the initial contour, then one row
        per initialisation motion (phase "init"), per control iteration
        (phase "control") and per random motion that refilled a window
        without variation (phase "refill"). `ase` is measured after the row's
        motion; the features are those the motion was computed from.
    converged : bool
        Whether the termination rule fired before the iteration cap.
    final_contour : Contour or None
    final_pose : Pose2D or None
    """

    k: int
    rows: List[dict] = field(default_factory=list)
    converged: bool = False
    final_contour: Optional[Contour] = None
    final_pose: Optional[Pose2D] = None

    @property
    def columns(self) -> List[str]:
        features = ["s{}".format(j + 1) for j in range(self.k)]
        return ["iteration", "phase", "ase"] + features + ["dx", "dy", "dtheta", "eta", "psi"]

    @property
    def iterations(self) -> int:
        """ Number of control iterations executed.
        """
        return sum(1 for row in self.rows if row["phase"] == "control")

    @property
    def ase(self) -> np.ndarray:
        return np.array([row["ase"] for row in self.rows])

    @property
    def final_ase(self) -> float:
        if not self.rows:
            return float("nan")
        return float(self.rows[-1]["ase"])

    def append(self, iteration, phase, ase, features=None, motion=None, eta=None, psi=None):
        row = {"iteration": iteration, "phase": phase, "ase": ase}
        features = np.full(self.k, np.nan) if features is None else features
        for j in range(self.k):
            row["s{}".format(j + 1)] = float(features[j])
        motion = np.full(3, np.nan) if motion is None else motion.as_vector()
        row["dx"], row["dy"], row["dtheta"] = (float(v) for v in motion)
        row["eta"] = np.nan if eta is None else eta
        row["psi"] = np.nan if psi is None else psi
        self.rows.append(row)

    def to_dataframe(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=self.columns)

    def to_csv(self, path):
        self.to_dataframe().to_csv(path, index=False, float_format="%.12g")
        logger.info("Wrote trace with {} rows to {}".format(len(self.rows), path))

    def summary(self) -> dict:
        return {
            "final_ase": self.final_ase,
            "best_ase": float(np.min(self.ase)) if self.rows else float("nan"),
            "iterations": self.iterations,
            "converged": self.converged,
        }


def random_motion(envelope, rng: np.random.Generator) -> Pose2D:
    """ A motion drawn uniformly inside ``[-envelope, envelope]``.
    """
    envelope = np.asarray(envelope, dtype=float)
    return Pose2D.from_vector(rng.uniform(-envelope, envelope))


class Excitation:
    """ Random offset kept on top of the commanded pose.

    Each call draws a new offset uniformly inside ``fraction * envelope`` and
    returns the motion plus the change of offset, so the offset never
    accumulates.
    """

    def __init__(self, fraction: float, envelope, rng: np.random.Generator):
        self.bounds = fraction * np.asarray(envelope, dtype=float)
        self.rng = rng
        self.offset = np.zeros(3)

    def __call__(self, delta: Pose2D) -> Pose2D:
        if not np.any(self.bounds > 0.0):
            return delta
        offset = self.rng.uniform(-self.bounds, self.bounds)
        delta = Pose2D.from_vector(delta.as_vector() + offset - self.offset)
        self.offset = offset
        return delta


def servo_loop(
    plant: Plant,
    target: Contour,
    config: ControllerConfig = ControllerConfig(),
    rng: Optional[np.random.Generator] = None,
    noise_sigma: float = 0.0,
    max_iterations: int = 1000,
    observer: Optional[Callable[[IterationRecord], None]] = None,
) -> ServoTrace:
    """ Drives the plant's contour towards the target.

        Parameters
        ----------
        plant : Plant
            Owned and mutated by the loop.
        target : Contour
            Desired contour, sampled like the plant's contours.
        config : ControllerConfig
        rng : numpy.random.Generator
            Source of the initialisation motions, the excitation offsets and
            the observation noise.
        noise_sigma : float
            Standard deviation of Gaussian noise added to every observed
            contour coordinate.
        max_iterations : int
            Cap on control iterations. Zero returns an empty trace.
        observer : callable
            Called with an `IterationRecord` after every control iteration.

        Returns
        -------
        ServoTrace

        Raises
        ------
        ServoError
            If the plant or the controller fails; `iteration` holds the
            failing iteration. A window without shape or motion variation is
            not a failure: the loop commands a random motion instead.
    """
    if max_iterations < 0:
        raise ValueError("max_iterations must be >= 0.", max_iterations)
    rng = np.random.default_rng() if rng is None else rng
    trace = ServoTrace(k=config.k)
    envelope = config.envelope(plant.characteristic_length)
    excite = Excitation(config.excitation, envelope, rng)

    def observe():
        return plant.contour().with_noise(noise_sigma, rng)

    def move(delta, iteration):
        try:
            plant.move(delta)
        except AppError as error:
            raise ServoError(
                "Plant failed at iteration {}: {}".format(iteration, error),
                iteration=iteration,
            ) from error

    current = observe()
    trace.final_contour, trace.final_pose = current, plant.pose
    if max_iterations == 0:
        return trace

    window = SlidingWindow.start(config.M, current)
    ase = average_sample_error(current, target)
    trace.append(0, "start", ase)
    logger.info("Servo start: ASE {:.6f}, plant {}".format(ase, plant))

    iteration = 0
    for _ in range(config.M):
        iteration += 1
        delta = random_motion(envelope, rng)
        move(delta, iteration)
        current = observe()
        window = push_sample(window, delta, current)
        ase = average_sample_error(current, target)
        trace.append(iteration, "init", ase, motion=delta)

    for _ in range(max_iterations):
        iteration += 1
        before, ase_before = current, ase
        try:
            basis = fit_basis(window.shape_window(), config.k, config.spectrum)
            if config.use_inverse_form:
                model = estimate_inverse_interaction(window, basis, config.lambda_, envelope)
            else:
                model = estimate_interaction(window, basis, config.lambda_, envelope)
        except (DegenerateWindowError, EstimationError) as error:
            delta = random_motion(envelope, rng)
            logger.warning(
                "Iteration {}: {}, refilling with {}".format(iteration, error, delta)
            )
            move(delta, iteration)
            current = observe()
            window = push_sample(window, delta, current)
            ase = average_sample_error(current, target)
            trace.append(iteration, "refill", ase, motion=delta)
            continue
        try:
            goal = local_target(
                basis, before, target, config.epsilon_psi, config.eta_max
            )
            s = project(basis, before)
            delta = control_step(model, s, goal.features, config.alpha)
        except AppError as error:
            raise ServoError(
                "Controller failed at iteration {}: {}".format(iteration, error),
                iteration=iteration,
            ) from error
        if config.normalise_step:
            delta = normalise_step(delta, envelope, config.step_length)
        if config.clip_motion:
            delta = clip_motion(delta, envelope)
        delta = excite(delta)
        move(delta, iteration)
        current = observe()
        window = push_sample(window, delta, current)
        ase = average_sample_error(current, target)
        trace.append(iteration, "control", ase, s, delta, goal.eta, goal.psi)
        logger.debug(
            "Iteration {}: ASE {:.6f}, eta {}, psi {:.3f}".format(
                iteration, ase, goal.eta, goal.psi
            )
        )
        if observer is not None:
            observer(
                IterationRecord(
                    iteration=iteration,
                    basis=basis,
                    model=model,
                    target=goal,
                    features=s,
                    motion=delta,
                    contour_before=before,
                    contour_after=current,
                    ase_before=ase_before,
                    ase_after=ase,
                )
            )
        if ase_before < config.ase_threshold and ase >= ase_before:
            trace.converged = True
            break

    trace.final_contour, trace.final_pose = current, plant.pose
    if trace.converged:
        logger.info(
            "Converged after {} iterations, ASE {:.6f}".format(trace.iterations, ase)
        )
    else:
        logger.warning(
            "Not converged after {} iterations, ASE {:.6f}".format(trace.iterations, ase)
        )
    return trace
