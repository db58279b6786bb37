""" Planar inextensible elastic cable whose static shape minimises bending energy
under position and angle constraints at both ends.

The cable is described by its tangent angle at N_seg + 1 equally spaced arc
length stations. Segment j runs between stations j and j + 1 with direction
``(theta_j + theta_{j+1}) / 2``, so positions follow from a midpoint quadrature
and the arc length is exactly L for any profile. Bending energy is

    E = stiffness * sum_j ((theta_{j+1} - theta_j) / ds)^2 ds

The two end angles are fixed by substitution; the two position closure
constraints are enforced with an augmented Lagrangian whose inner problems are
solved with a damped Newton method.
"""
from __future__ import annotations
from dataclasses import dataclass, field
from typing import Optional
import numpy as np
import scipy.linalg
import scipy.optimize
from shapeservo.common.errors import SolverError, UnreachablePoseError
from shapeservo.geometry.contour import Contour, ResampleParams, resample_uniform
from shapeservo.geometry.pose import Pose2D
from shapeservo.geometry.utils import wrap_angle
from shapeservo.plant.plant import Plant
import logging

logger = logging.getLogger(__name__)

# Boundaries closer than this fraction of L to full extension are treated as
# the straight-line case.
FEASIBILITY_MARGIN = 1e-9
# Constraint residual accepted, relative to L.
CONSTRAINT_TOL = 1e-10
CONSTRAINT_LIMIT = 1e-8


@dataclass(frozen=True)
class CableModel:
    """ Material and discretisation of a cable.

    Attributes
    ----------
    length : float
        Arc length L.
    n_seg : int
        Number of discretisation segments.
    bending_stiffness : float
        Scales the energy only; the minimising shape does not depend on it.
    """

    length: float = 1.0
    n_seg: int = 100
    bending_stiffness: float = 1.0

    def __post_init__(self):
        if not self.length > 0.0:
            raise ValueError("Cable length must be positive.", self.length)
        if int(self.n_seg) != self.n_seg or self.n_seg < 10:
            raise ValueError("n_seg must be an integer >= 10.", self.n_seg)
        if not self.bending_stiffness > 0.0:
            raise ValueError("Bending stiffness must be positive.")

    @property
    def ds(self) -> float:
        return self.length / self.n_seg

    @property
    def stations(self) -> np.ndarray:
        return np.linspace(0.0, self.length, self.n_seg + 1)


@dataclass(frozen=True)
class CableBoundary:
    """ End constraints: the fixed left end and the controlled right end. The
    pose angles are the cable tangent angles at the ends.
    """

    left_pose: Pose2D
    right_pose: Pose2D

    @property
    def chord(self) -> np.ndarray:
        return self.right_pose.position - self.left_pose.position

    def moved(self, delta: Pose2D) -> CableBoundary:
        return CableBoundary(self.left_pose, self.right_pose.moved(delta))


@dataclass(frozen=True, eq=False)
class CableState:
    """ A solved static shape.

    Attributes
    ----------
    model : CableModel
    boundary : CableBoundary
    theta : numpy.ndarray
        Tangent angle at the N_seg + 1 stations.
    multipliers : numpy.ndarray
        Lagrange multipliers of the two closure constraints, reused when
        warm starting.
    energy : float
        Bending energy of the profile.
    residual : float
        Largest closure error, in length units.
    """

    model: CableModel
    boundary: CableBoundary
    theta: np.ndarray = field(repr=False)
    multipliers: np.ndarray = field(repr=False)
    energy: float
    residual: float
    _positions: Optional[np.ndarray] = field(default=None, repr=False)

    def positions(self) -> np.ndarray:
        """ The (N_seg + 1, 2) centreline vertices, integrated from the left end.
        """
        if self._positions is None:
            object.__setattr__(
                self, "_positions", integrate_positions(self.model, self.boundary, self.theta)
            )
        return self._positions


# Discrete operators


def _averaging(n_seg):
    """ (n_seg, n_seg + 1) matrix mapping station angles to segment angles.
    """
    A = np.zeros((n_seg, n_seg + 1))
    idx = np.arange(n_seg)
    A[idx, idx] = 0.5
    A[idx, idx + 1] = 0.5
    return A


def _difference_hessian(n_seg):
    """ Hessian of sum_j (theta_{j+1} - theta_j)^2 / 2 over the interior stations.
    """
    n_free = n_seg - 1
    return (
        2.0 * np.identity(n_free)
        - np.eye(n_free, k=1)
        - np.eye(n_free, k=-1)
    )


def integrate_positions(model: CableModel, boundary: CableBoundary, theta) -> np.ndarray:
    phi = 0.5 * (theta[:-1] + theta[1:])
    steps = model.ds * np.column_stack((np.cos(phi), np.sin(phi)))
    origin = boundary.left_pose.position
    return np.vstack([origin, origin + np.cumsum(steps, axis=0)])


def bending_energy(model: CableModel, theta) -> float:
    return float(model.bending_stiffness * np.sum(np.diff(theta) ** 2) / model.ds)


class _Problem(object):
    """ The dimensionless constrained problem for one boundary.

    Variables are the interior angles u = theta[1:-1]. The objective is
    f = N/2 sum (dtheta)^2, so that E = 2 stiffness / L * f, and the closure
    constraints are divided by L.
    """

    def __init__(self, model: CableModel, boundary: CableBoundary):
        self.model = model
        self.n = model.n_seg
        self.theta_left = boundary.left_pose.theta
        # Unwrap the right angle so the profile does not jump by 2 pi.
        self.theta_right = self.theta_left + wrap_angle(
            boundary.right_pose.theta - boundary.left_pose.theta
        )
        self.target = boundary.chord / model.length
        self.A = _averaging(self.n)
        self.A_free = self.A[:, 1:-1]
        self.H_f = self.n * _difference_hessian(self.n)

    def full(self, u):
        return np.concatenate([[self.theta_left], u, [self.theta_right]])

    def objective(self, u):
        return 0.5 * self.n * np.sum(np.diff(self.full(u)) ** 2)

    def gradient(self, u):
        theta = self.full(u)
        d = np.diff(theta)
        return self.n * (d[:-1] - d[1:])

    def constraints(self, u):
        phi = np.dot(self.A, self.full(u))
        return np.array([np.mean(np.cos(phi)), np.mean(np.sin(phi))]) - self.target

    def jacobian(self, u):
        phi = np.dot(self.A, self.full(u))
        jx = -np.dot(self.A_free.T, np.sin(phi)) / self.n
        jy = np.dot(self.A_free.T, np.cos(phi)) / self.n
        return np.vstack([jx, jy])

    def weighted_constraint_hessian(self, u, weights):
        """ sum_i weights_i * Hessian(h_i).
        """
        phi = np.dot(self.A, self.full(u))
        diag = -(weights[0] * np.cos(phi) + weights[1] * np.sin(phi)) / self.n
        return np.dot(self.A_free.T * diag, self.A_free)


def _initial_guess(problem: _Problem) -> np.ndarray:
    """ Linear angle interpolation plus the two lowest bending modes, with mode
    amplitudes chosen to close the constraints. The bump mode breaks the
    symmetry of straight profiles, which are saddle points when compressed.
    """
    s = np.linspace(0.0, 1.0, problem.n + 1)[1:-1]
    linear = problem.theta_left + (problem.theta_right - problem.theta_left) * s
    modes = np.vstack([np.sin(2.0 * np.pi * s), np.sin(np.pi * s)])

    def closure(amplitudes):
        return problem.constraints(linear + np.dot(amplitudes, modes))

    # Candidates are the linear profile and a bump sized to take up the slack,
    # tried in order of their closure error.
    slack = max(1.0 - np.linalg.norm(problem.target), 0.0)
    starts = sorted(
        ([0.0, 0.0], [2.0 * np.sqrt(slack), 0.0]),
        key=lambda x0: np.linalg.norm(closure(x0)),
    )
    fallback = None
    for x0 in starts:
        result = scipy.optimize.root(closure, x0=x0, method="hybr")
        closed = np.max(np.abs(closure(result.x))) < 1e-8
        if result.success and closed and np.all(np.abs(result.x) < np.pi):
            return linear + np.dot(result.x, modes)
        fallback = result.x
    logger.debug("No closed initial profile, starting from {}".format(fallback))
    return linear + np.dot(fallback, modes)


def _newton_inner(problem, u, mu, rho, tol=1e-11, max_iterations=100):
    """ Minimises the augmented Lagrangian for fixed multipliers `mu` and
    penalty `rho` with a damped Newton method.
    """

    def merit(v):
        h = problem.constraints(v)
        return problem.objective(v) + np.dot(mu, h) + 0.5 * rho * np.dot(h, h)

    value = merit(u)
    for iteration in range(max_iterations):
        h = problem.constraints(u)
        J = problem.jacobian(u)
        weights = mu + rho * h
        grad = problem.gradient(u) + np.dot(J.T, weights)
        if np.max(np.abs(grad)) < tol:
            break
        hess = (
            problem.H_f
            + problem.weighted_constraint_hessian(u, weights)
            + rho * np.dot(J.T, J)
        )
        shift = 0.0
        while True:
            try:
                factor = scipy.linalg.cho_factor(hess + shift * np.identity(len(u)))
                break
            except scipy.linalg.LinAlgError:
                shift = max(10.0 * shift, 1e-6 * problem.n)
        step = -scipy.linalg.cho_solve(factor, grad)
        slope = np.dot(grad, step)
        t = 1.0
        while True:
            candidate = u + t * step
            candidate_value = merit(candidate)
            if candidate_value <= value + 1e-4 * t * slope or t < 1e-10:
                break
            t *= 0.5
        u, value = candidate, candidate_value
        if np.max(np.abs(t * step)) < 1e-14:
            break
    return u, iteration + 1


def solve_static_shape(
    model: CableModel,
    boundary: CableBoundary,
    warm_start: Optional[CableState] = None,
    max_iterations: int = 60,
) -> CableState:
    """ Returns the minimum bending energy shape for the boundary.

        Parameters
        ----------
        model : CableModel
        boundary : CableBoundary
        warm_start : CableState or None
            A nearby solution. Its profile and multipliers seed the solver,
            which selects the equilibrium branch continuously.
        max_iterations : int
            Cap on augmented Lagrangian outer iterations.

        Raises
        ------
        UnreachablePoseError
            If the ends are further apart than the cable allows.
        SolverError
            If the closure constraints are not met after `max_iterations`.
    """
    L = model.length
    chord = boundary.chord
    separation = float(np.linalg.norm(chord))
    if separation > L * (1.0 - FEASIBILITY_MARGIN):
        # Only the straight cable along the chord reaches full extension.
        chord_angle = np.arctan2(chord[1], chord[0])
        aligned = all(
            abs(wrap_angle(pose.theta - chord_angle)) < 1e-9
            for pose in (boundary.left_pose, boundary.right_pose)
        )
        if separation <= L * (1.0 + FEASIBILITY_MARGIN) and aligned:
            theta = np.full(model.n_seg + 1, chord_angle)
            return CableState(
                model=model,
                boundary=boundary,
                theta=theta,
                multipliers=np.zeros(2),
                energy=0.0,
                residual=abs(separation - L),
            )
        raise UnreachablePoseError(
            "unreachable end pose",
            {"separation": separation, "length": L, "boundary": boundary},
        )

    problem = _Problem(model, boundary)
    # Straight profiles are saddles under compression, so they are not used
    # as warm starts.
    if warm_start is not None and warm_start.model == model and warm_start.energy > 0.0:
        u = np.array(warm_start.theta[1:-1])
        # Follow the right angle continuously from the warm start.
        problem.theta_right = warm_start.theta[-1] + wrap_angle(
            boundary.right_pose.theta - warm_start.theta[-1]
        )
        mu = np.array(warm_start.multipliers)
    else:
        u = _initial_guess(problem)
        mu = np.zeros(2)

    rho = float(problem.n ** 2)
    previous = np.inf
    inner_total = 0
    for outer in range(max_iterations):
        u, inner = _newton_inner(problem, u, mu, rho)
        inner_total += inner
        h = problem.constraints(u)
        violation = float(np.max(np.abs(h)))
        mu = mu + rho * h
        if violation < CONSTRAINT_TOL:
            break
        if violation > 0.25 * previous:
            rho = min(10.0 * rho, 1e12)
        previous = violation
    logger.debug(
        "Cable solve: {} outer, {} inner iterations, residual {:.3e}".format(
            outer + 1, inner_total, violation * L
        )
    )
    if violation > CONSTRAINT_LIMIT:
        raise SolverError("Cable statics did not converge.", residual=violation * L)
    theta = problem.full(u)
    return CableState(
        model=model,
        boundary=boundary,
        theta=theta,
        multipliers=mu,
        energy=bending_energy(model, theta),
        residual=violation * L,
    )


def sample_contour(state: CableState, K: int = 50) -> Contour:
    """ Returns K arc-length-uniform samples of the solved centreline, starting
        at the fixed end.
    """
    return resample_uniform(state.positions(), ResampleParams(K)).contour


def apply_tip_motion(model: CableModel, state: CableState, delta: Pose2D) -> CableState:
    """ Moves the controlled end by a world-frame increment and re-solves the
        statics, warm started from the current shape.
    """
    return solve_static_shape(model, state.boundary.moved(delta), warm_start=state)


class CablePlant(Plant):
    """ A cable with a fixed left end and a robot holding the right end.
    """

    def __init__(self, model: CableModel, boundary: CableBoundary, K: int = 50):
        super(CablePlant, self).__init__()
        self.model = model
        self.K = K
        self.state = solve_static_shape(model, boundary)

    def __repr__(self):
        return "CablePlant(L={}, right={})".format(
            self.model.length, self.state.boundary.right_pose
        )

    @property
    def pose(self) -> Pose2D:
        return self.state.boundary.right_pose

    @property
    def characteristic_length(self) -> float:
        return self.model.length

    def contour(self) -> Contour:
        return sample_contour(self.state, self.K)

    def move(self, delta: Pose2D) -> None:
        self.state = apply_tip_motion(self.model, self.state, delta)
