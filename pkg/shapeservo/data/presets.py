""" Reference configurations used by the studies and the tests.

Cables have unit length with the fixed end at the origin pointing along +x.
Poses are (x, y, theta in degrees) as in the scenario files.
"""
import numpy as np

CABLE_LENGTH = 1.0
CABLE_SEGMENTS = 100
CONTOUR_SAMPLES = 50
LEFT_END = (0.0, 0.0, 0.0)

# Right end poses of the six explained variance trials.
VARIANCE_TRIALS = (
    (0.7, 0.0, 0.0),
    (0.6, 0.2, 30.0),
    (0.8, -0.1, -20.0),
    (0.5, 0.3, 90.0),
    (0.65, -0.25, -45.0),
    (0.75, 0.15, 60.0),
)

# Small motion envelope: fraction of the cable length and degrees.
SMALL_TRANSLATION = 0.05
SMALL_ROTATION_DEG = 5.0

# Large motion envelope.
LARGE_TRANSLATION = 1.06
LARGE_ROTATION_DEG = 90.0

# Servo scenario with a target reached by moving the right end.
REACHABLE_INITIAL = (0.7, 0.0, 0.0)
REACHABLE_TARGET = (0.4, 0.3, 60.0)

# Same right end target, but the target shape is generated with the fixed end
# rotated, so no right end motion reproduces it.
UNREACHABLE_LEFT_END = (0.0, 0.15, 60.0)

# Contour noise in plant units, and the termination threshold in pixels.
NOISE_SIGMA = 0.01
ASE_THRESHOLD = 1.0

# Camera scale of each plant kind. A unit cable spans 300 pixels.
PIXELS_PER_UNIT = {"cable": 300.0, "rigid": 200.0}

BROYDEN_BETAS = (0.1, 0.5, 1.0)

# Rigid rectangle and the motion envelope of the correlation study. Bounds
# are fractions of the rectangle's extent along each body axis, and radians.
RIGID_WIDTH = 1.0
RIGID_HEIGHT = 0.5
RIGID_INITIAL = (0.0, 0.0, 0.0)
RIGID_TARGET = (0.3, 0.2, 20.0)
CORRELATION_X_FRACTION = 0.15
CORRELATION_Y_FRACTION = 0.15
CORRELATION_ROTATION = (-0.11, 0.09)
CORRELATION_MOTIONS = 100


def pose_tuple_to_radians(pose):
    """ (x, y, degrees) to (x, y, radians).
    """
    x, y, theta = pose
    return (float(x), float(y), float(np.radians(theta)))
