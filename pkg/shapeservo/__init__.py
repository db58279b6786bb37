__version__ = "0.1.0"
"""
Shape servoing of deformable and rigid planar objects with receding horizon
estimation of a PCA feature interaction matrix
"""
import logging

logger = logging.getLogger("shapeservo")


# Import commonly used classes to shapeservo namespace so users don't
# have to understand module layout.

# geometry
from .geometry.pose import Pose2D
from .geometry.contour import (
    Contour,
    ResampleParams,
    resample_uniform,
    average_sample_error,
    interpolate_toward,
)

# plants
from .plant.plant import Plant
from .plant.cable import (
    CableModel,
    CableBoundary,
    CableState,
    CablePlant,
    solve_static_shape,
    sample_contour,
    apply_tip_motion,
)
from .plant.rigid import RigidShape, RigidPlant, rectangle_template, world_contour, apply_motion
from .plant.linear import LinearPlant
from .plant.camera import Camera, ImagedPlant

# features
from .feature.pca import ShapeWindow, ProjectionBasis, fit_basis, project, project_full, explained_variance

# control
from .control.window import SlidingWindow, push_sample
from .control.local_target import LocalTarget, local_target
from .control.estimation import (
    InteractionModel,
    estimate_interaction,
    estimate_inverse_interaction,
    broyden_update,
    predict_one_step,
)
from .control.law import ControllerConfig, control_step, normalise_step

# algorithm
from .algorithm.servo import ServoTrace, IterationRecord, servo_loop

# harness
from .harness.scenario import Scenario, load_scenario, run_scenario
from .harness.studies import (
    StudyReport,
    StudyConfig,
    load_study,
    run_study,
    study_explained_variance,
    study_estimator_comparison,
    study_rigid_correlation,
    study_control_forms,
)
