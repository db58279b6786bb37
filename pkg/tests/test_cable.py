import pytest
import numpy as np
import scipy.optimize
from shapeservo.common.errors import UnreachablePoseError
from shapeservo.geometry.pose import Pose2D
from shapeservo.geometry.utils import polyline_length
from shapeservo.plant.cable import (
    CableBoundary,
    CableModel,
    CablePlant,
    apply_tip_motion,
    bending_energy,
    sample_contour,
    solve_static_shape,
)


def boundary(x, y, degrees, left=(0.0, 0.0, 0.0)):
    return CableBoundary(
        Pose2D(left[0], left[1], np.radians(left[2])),
        Pose2D(x, y, np.radians(degrees)),
    )


class TestCableModel:

    def test_defaults(self):
        model = CableModel()
        assert model.length == 1.0
        assert model.n_seg == 100
        assert np.isclose(model.ds, 0.01)

    def test_invalid(self):
        with pytest.raises(ValueError):
            CableModel(length=0.0)
        with pytest.raises(ValueError):
            CableModel(n_seg=3)


class TestSolveStaticShape:

    def test_straight(self):
        model = CableModel()
        state = solve_static_shape(model, boundary(1.0, 0.0, 0.0))
        assert state.energy == 0.0
        contour = sample_contour(state, 5)
        assert np.allclose(contour.points[:, 0], [0.0, 0.2, 0.4, 0.6, 0.8])
        assert np.allclose(contour.points[:, 1], 0.0)

    def test_unreachable(self):
        model = CableModel()
        with pytest.raises(UnreachablePoseError, match="unreachable end pose"):
            solve_static_shape(model, boundary(1.2, 0.0, 0.0))
        # fully extended but not aligned with the chord
        with pytest.raises(UnreachablePoseError):
            solve_static_shape(model, boundary(1.0, 0.0, 20.0))

    def test_boundary_satisfied(self):
        model = CableModel()
        b = boundary(0.6, 0.2, 30.0)
        state = solve_static_shape(model, b)
        positions = state.positions()
        assert np.allclose(positions[0], (0.0, 0.0))
        assert np.allclose(positions[-1], (0.6, 0.2), atol=1e-8)
        assert np.isclose(state.theta[0], 0.0)
        assert np.isclose(state.theta[-1], np.radians(30.0))
        assert np.isclose(polyline_length(positions), 1.0)
        assert state.residual < 1e-8

    def test_symmetric_bump(self):
        model = CableModel()
        state = solve_static_shape(model, boundary(0.7, 0.0, 0.0))
        p = state.positions()
        assert np.allclose(p[:, 0] + p[::-1, 0], 0.7, atol=1e-6)
        assert np.allclose(p[:, 1], p[::-1, 1], atol=1e-6)
        assert p[:, 1].max() > 0.1

    def test_circular_arc(self):
        # Clamped ends compatible with a semicircle: zero constraint force
        # and energy stiffness * L / R^2.
        model = CableModel()
        state = solve_static_shape(model, boundary(0.0, 2.0 / np.pi, 180.0))
        assert np.isclose(state.energy, np.pi ** 2, rtol=1e-3)
        assert np.allclose(np.diff(state.theta), np.pi / model.n_seg, rtol=1e-2)

    def test_stiffness_scales_energy_only(self):
        b = boundary(0.65, -0.25, -45.0)
        soft = solve_static_shape(CableModel(bending_stiffness=1.0), b)
        stiff = solve_static_shape(CableModel(bending_stiffness=3.0), b)
        assert np.allclose(soft.positions(), stiff.positions(), atol=1e-8)
        assert np.isclose(stiff.energy, 3.0 * soft.energy)

    def test_warm_start_agrees(self):
        model = CableModel()
        cold = solve_static_shape(model, boundary(0.7, 0.02, 2.0))
        start = solve_static_shape(model, boundary(0.7, 0.0, 0.0))
        warm = solve_static_shape(model, boundary(0.7, 0.02, 2.0), warm_start=start)
        assert np.allclose(warm.positions(), cold.positions(), atol=1e-6)

    def test_local_optimality(self):
        # No constrained local minimiser started next to our solution finds
        # a lower energy.
        model = CableModel(n_seg=20)
        b = boundary(0.8, 0.1, 0.0)
        state = solve_static_shape(model, b)
        n = model.n_seg

        def full(u):
            return np.concatenate([[state.theta[0]], u, [state.theta[-1]]])

        def energy(u):
            return bending_energy(model, full(u))

        def closure(u):
            theta = full(u)
            phi = 0.5 * (theta[:-1] + theta[1:])
            return np.array([np.mean(np.cos(phi)) - 0.8, np.mean(np.sin(phi)) - 0.1])

        rng = np.random.default_rng(5)
        u0 = state.theta[1:-1] + rng.normal(0.0, 0.02, n - 1)
        result = scipy.optimize.minimize(
            energy,
            u0,
            method="SLSQP",
            constraints=[{"type": "eq", "fun": closure}],
            options={"ftol": 1e-12, "maxiter": 500},
        )
        assert np.max(np.abs(closure(result.x))) < 1e-6
        assert state.energy <= result.fun + 1e-6


class TestTipMotion:

    def test_zero_motion(self):
        model = CableModel()
        state = solve_static_shape(model, boundary(0.6, 0.2, 30.0))
        moved = apply_tip_motion(model, state, Pose2D())
        assert np.allclose(moved.positions(), state.positions(), atol=1e-8)

    def test_motion_moves_end(self):
        model = CableModel()
        state = solve_static_shape(model, boundary(0.7, 0.0, 0.0))
        moved = apply_tip_motion(model, state, Pose2D(-0.02, 0.03, np.radians(3.0)))
        assert np.allclose(moved.positions()[-1], (0.68, 0.03), atol=1e-8)
        assert np.isclose(moved.theta[-1], np.radians(3.0))


class TestCablePlant:

    def test_plant(self):
        plant = CablePlant(CableModel(), boundary(0.7, 0.0, 0.0), K=30)
        assert plant.characteristic_length == 1.0
        assert plant.contour().K == 30
        before = plant.contour()
        plant.move(Pose2D(0.01, 0.0, 0.0))
        assert np.isclose(plant.pose.x, 0.71)
        assert not np.allclose(plant.contour().points, before.points)
        assert np.allclose(plant.contour().points[0], (0.0, 0.0))


def arc_stations(polyline, points):
    """ Arc length of each point along the polyline it lies on. """
    a, b = polyline[:-1], polyline[1:]
    seg = b - a
    lengths = np.linalg.norm(seg, axis=1)
    starts = np.concatenate([[0.0], np.cumsum(lengths)[:-1]])
    stations = []
    for p in points:
        s = np.clip(np.sum((p - a) * seg, axis=1) / lengths ** 2, 0.0, 1.0)
        distance = np.linalg.norm(a + s[:, None] * seg - p, axis=1)
        i = int(np.argmin(distance))
        stations.append(starts[i] + s[i] * lengths[i])
    return np.array(stations)


class TestCableInvariance:

    def test_rigid_frame_change(self):
        # Moving both ends by one rigid transform moves the shape with them.
        model = CableModel()
        angle, shift = np.radians(40.0), np.array([0.3, -0.2])
        rotation = np.array([[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]])
        right = np.dot(rotation, (0.6, 0.2)) + shift
        state = solve_static_shape(model, boundary(0.6, 0.2, 30.0))
        moved = solve_static_shape(
            model, boundary(right[0], right[1], 70.0, left=(shift[0], shift[1], 40.0))
        )
        expected = np.dot(state.positions(), rotation.T) + shift
        assert np.allclose(moved.positions(), expected, atol=1e-6)
        assert np.isclose(moved.energy, state.energy, rtol=1e-6)

    def test_motion_and_return(self):
        plant = CablePlant(CableModel(), boundary(0.7, 0.0, 0.0))
        start = plant.contour()
        delta = Pose2D(0.02, -0.03, np.radians(4.0))
        plant.move(delta)
        assert not np.allclose(plant.contour().points, start.points, atol=1e-3)
        plant.move(-delta)
        assert np.allclose(plant.pose.as_vector(), (0.7, 0.0, 0.0), atol=1e-12)
        assert np.allclose(plant.contour().points, start.points, atol=1e-6)

    @pytest.mark.parametrize("right", [(0.7, 0.0, 0.0), (0.6, 0.2, 30.0), (0.5, 0.3, 90.0)])
    def test_samples_uniform_in_arc_length(self, right):
        model = CableModel()
        state = solve_static_shape(model, boundary(*right))
        K = 50
        contour = sample_contour(state, K)
        stations = arc_stations(state.positions(), contour.points)
        assert np.isclose(stations[0], 0.0)
        assert np.allclose(np.diff(stations), model.length / K, atol=1e-6 * model.length)
