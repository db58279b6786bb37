""" Scenario configuration and the single run driver.

A scenario file is JSON::

    {
        "name": "reachable",
        "seed": 1,
        "max_iterations": 1500,
        "noise": 0.0,
        "plant": {"kind": "cable", "K": 50, "pose": [0.7, 0.0, 0.0], "pixels_per_unit": 300},
        "target": {"pose": [0.4, 0.3, 60.0]},
        "controller": {"M": 5, "lambda": 0.01, "alpha": 0.01, "ase_threshold": 1.0}
    }

Poses are ``[x, y, theta]`` with theta in degrees. For cables `pose` is the
controlled right end; for rigid shapes it is the grasp point.

Plants are observed through a camera looking straight down on the plane, so
contours, target files and the ASE threshold are in pixels. Poses, lengths and
the noise standard deviation are in plant units; the noise is converted with
`pixels_per_unit` before it is added to the observed contours.
"""
from __future__ import annotations
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Optional, Tuple
import json
import os
import numpy as np
from shapeservo.algorithm.servo import ServoTrace, servo_loop
from shapeservo.common.errors import AppError, ConfigError, ContourError, ServoError
from shapeservo.control.law import ControllerConfig
from shapeservo.data import presets
from shapeservo.geometry.contour import Contour
from shapeservo.geometry.pose import Pose2D
from shapeservo.plant.cable import (
    CableBoundary,
    CableModel,
    CablePlant,
    sample_contour,
    solve_static_shape,
)
from shapeservo.plant.camera import Camera, ImagedPlant
from shapeservo.plant.plant import Plant
from shapeservo.plant.rigid import RigidPlant, RigidShape, rectangle_template, world_contour
import logging

logger = logging.getLogger(__name__)

PLANT_KINDS = ("cable", "rigid")
OUTPUT_ENV = "SHAPESERVO_OUT"
DEFAULT_OUTPUT = "shapeservo_out"


def output_directory(override=None) -> Path:
    """ The command line value if given, else $SHAPESERVO_OUT, else
        ./shapeservo_out.
    """
    directory = override or os.environ.get(OUTPUT_ENV) or DEFAULT_OUTPUT
    return Path(directory)


def pose_from_config(values) -> Pose2D:
    try:
        x, y, theta = (float(v) for v in values)
    except (TypeError, ValueError):
        raise ConfigError("Poses are [x, y, theta_degrees].", values)
    return Pose2D(x, y, np.radians(theta)).wrapped()


def _check_keys(cls, values):
    if not isinstance(values, dict):
        raise ConfigError("{} must be an object.".format(cls.__name__), values)
    unknown = set(values) - set(cls.__dataclass_fields__)
    if unknown:
        raise ConfigError("Unknown {} keys.".format(cls.__name__), sorted(unknown))


@dataclass(frozen=True)
class PlantConfig:
    """ Which object is manipulated and where it starts.
    """

    kind: str = "cable"
    K: int = presets.CONTOUR_SAMPLES
    pose: Tuple[float, float, float] = presets.REACHABLE_INITIAL
    # cable
    length: float = presets.CABLE_LENGTH
    n_seg: int = presets.CABLE_SEGMENTS
    bending_stiffness: float = 1.0
    left: Tuple[float, float, float] = presets.LEFT_END
    # rigid
    width: float = presets.RIGID_WIDTH
    height: float = presets.RIGID_HEIGHT
    # camera, None selects the preset scale of the plant kind
    pixels_per_unit: Optional[float] = None

    def __post_init__(self):
        if self.kind not in PLANT_KINDS:
            raise ConfigError("Plant kind must be one of {}.".format(PLANT_KINDS), self.kind)
        if self.pixels_per_unit is None:
            default = presets.PIXELS_PER_UNIT[self.kind]
            object.__setattr__(self, "pixels_per_unit", default)
        try:
            scale = float(self.pixels_per_unit)
        except (TypeError, ValueError):
            raise ConfigError("pixels_per_unit must be a number.", self.pixels_per_unit)
        if not scale > 0.0:
            raise ConfigError("pixels_per_unit must be positive.", self.pixels_per_unit)
        object.__setattr__(self, "pixels_per_unit", scale)
        if int(self.K) != self.K or self.K < 4:
            raise ConfigError("K must be an integer >= 4.", self.K)
        for name in ("pose", "left"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))
            if len(getattr(self, name)) != 3:
                raise ConfigError("Poses are [x, y, theta_degrees].", name)

    @classmethod
    def from_dict(cls, values: dict) -> PlantConfig:
        _check_keys(cls, values)
        return cls(**values)

    def cable_model(self) -> CableModel:
        try:
            return CableModel(self.length, self.n_seg, self.bending_stiffness)
        except ValueError as error:
            raise ConfigError(str(error))

    def rigid_template(self) -> Contour:
        try:
            return rectangle_template(self.width, self.height, self.K)
        except ValueError as error:
            raise ConfigError(str(error))

    @property
    def characteristic_length(self) -> float:
        return self.length if self.kind == "cable" else self.width

    def camera(self) -> Camera:
        return Camera(float(self.pixels_per_unit))


@dataclass(frozen=True)
class TargetConfig:
    """ How the target contour is made: by forward simulation of `pose`
    (optionally with a different fixed cable end) or read from a CSV file.
    """

    pose: Optional[Tuple[float, float, float]] = presets.REACHABLE_TARGET
    left: Optional[Tuple[float, float, float]] = None
    contour: Optional[str] = None

    def __post_init__(self):
        if self.pose is None and self.contour is None:
            raise ConfigError("A target needs a pose or a contour file.")
        for name in ("pose", "left"):
            if getattr(self, name) is not None:
                object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))

    @classmethod
    def from_dict(cls, values: dict) -> TargetConfig:
        _check_keys(cls, values)
        return cls(**values)


@dataclass(frozen=True)
class Scenario:
    """ A fully specified servo run.
    """

    name: str = "scenario"
    seed: int = 0
    max_iterations: int = 1500
    noise: float = 0.0
    plant: PlantConfig = field(default_factory=PlantConfig)
    target: TargetConfig = field(default_factory=TargetConfig)
    controller: ControllerConfig = field(default_factory=ControllerConfig)

    def __post_init__(self):
        if not self.name or any(c in self.name for c in "/\\"):
            raise ConfigError("Scenario names must be plain file name stems.", self.name)
        if int(self.seed) != self.seed or self.seed < 0:
            raise ConfigError("seed must be a non-negative integer.", self.seed)
        if int(self.max_iterations) != self.max_iterations or self.max_iterations < 0:
            raise ConfigError("max_iterations must be an integer >= 0.", self.max_iterations)
        if self.noise < 0.0:
            raise ConfigError("noise must be >= 0.", self.noise)

    @classmethod
    def from_dict(cls, values: dict) -> Scenario:
        _check_keys(cls, values)
        values = dict(values)
        if "seed" not in values:
            raise ConfigError("Scenarios need an explicit seed.")
        values["plant"] = PlantConfig.from_dict(values.get("plant", {}))
        values["target"] = TargetConfig.from_dict(values.get("target", {}))
        try:
            values["controller"] = ControllerConfig.from_dict(values.get("controller", {}))
        except TypeError as error:
            raise ConfigError(str(error))
        return cls(**values)

    def to_dict(self) -> dict:
        values = asdict(self)
        values["controller"] = self.controller.to_dict()
        return values

    @property
    def noise_pixels(self) -> float:
        """ The observation noise standard deviation in pixels.
        """
        return self.plant.camera().to_pixels(self.noise)

    def with_seed(self, seed: int) -> Scenario:
        return Scenario(
            self.name, int(seed), self.max_iterations, self.noise,
            self.plant, self.target, self.controller,
        )


def load_scenario(path) -> Scenario:
    """ Reads a scenario JSON file.

        Raises
        ------
        ConfigError
            If the file cannot be parsed or holds invalid values.
    """
    try:
        with open(path) as fp:
            values = json.load(fp)
    except (OSError, json.JSONDecodeError) as error:
        raise ConfigError("Cannot read scenario {}: {}".format(path, error))
    return Scenario.from_dict(values)


def build_plant(config: PlantConfig) -> Plant:
    """ Makes the plant in its initial configuration, seen through the
        scenario's camera.
    """
    if config.kind == "cable":
        boundary = CableBoundary(pose_from_config(config.left), pose_from_config(config.pose))
        plant = CablePlant(config.cable_model(), boundary, K=config.K)
    else:
        plant = RigidPlant(RigidShape(config.rigid_template(), pose_from_config(config.pose)))
    return ImagedPlant(plant, config.camera())


def make_target(scenario: Scenario) -> Contour:
    """ The target contour in pixels, forward simulated from the target pose
        and imaged, or read from the target file.
    """
    target = scenario.target
    plant = scenario.plant
    if target.contour is not None:
        try:
            contour = Contour.read_csv(target.contour)
        except (OSError, ContourError) as error:
            raise ConfigError("Cannot read target contour {}: {}".format(target.contour, error))
        if contour.K != plant.K:
            raise ConfigError(
                "Target contour has {} samples, plant has {}.".format(contour.K, plant.K)
            )
        return contour
    if plant.kind == "cable":
        left = target.left if target.left is not None else plant.left
        boundary = CableBoundary(pose_from_config(left), pose_from_config(target.pose))
        state = solve_static_shape(plant.cable_model(), boundary)
        contour = sample_contour(state, plant.K)
    else:
        contour = world_contour(RigidShape(plant.rigid_template(), pose_from_config(target.pose)))
    return plant.camera().image(contour)


@dataclass
class ScenarioResult:
    scenario: Scenario
    trace: ServoTrace

    def summary(self) -> dict:
        row = {
            "scenario": self.scenario.name,
            "seed": self.scenario.seed,
            "plant": self.scenario.plant.kind,
            "noise": self.scenario.noise,
        }
        row.update(self.trace.summary())
        return row


def run_scenario(scenario: Scenario, out_dir=None, observer=None) -> ScenarioResult:
    """ Runs one scenario from its seed.

        Parameters
        ----------
        scenario : Scenario
        out_dir : path or None
            If given, the trace is written to ``trace_<name>.csv`` there.
        observer : callable
            Passed to the servo loop.

        Raises
        ------
        ServoError
            If setting up the plant or the target fails (iteration 0) or the
            loop fails.
    """
    logger.info("Running scenario {} (seed {})".format(scenario.name, scenario.seed))
    try:
        plant = build_plant(scenario.plant)
        target = make_target(scenario)
    except ConfigError:
        raise
    except AppError as error:
        raise ServoError("Scenario setup failed: {}".format(error), iteration=0) from error
    rng = np.random.default_rng(scenario.seed)
    trace = servo_loop(
        plant,
        target,
        scenario.controller,
        rng=rng,
        noise_sigma=scenario.noise_pixels,
        max_iterations=scenario.max_iterations,
        observer=observer,
    )
    result = ScenarioResult(scenario, trace)
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        trace.to_csv(out_dir / "trace_{}.csv".format(scenario.name))
    return result
