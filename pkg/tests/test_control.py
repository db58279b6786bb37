import pytest
import numpy as np
from shapeservo.common.errors import ConfigError, ControlError
from shapeservo.control.estimation import InteractionModel
from shapeservo.control.law import ControllerConfig, clip_motion, control_step, normalise_step
from shapeservo.geometry.pose import Pose2D


class TestControllerConfig:

    def test_defaults(self):
        config = ControllerConfig()
        assert config.M == 5
        assert config.lambda_ == 0.01
        assert config.epsilon_psi == 0.8
        assert config.alpha == 0.01
        assert config.k == 3
        assert config.eta_max == 64
        assert not config.use_inverse_form
        assert not config.clip_motion
        assert config.normalise_step
        assert config.excitation == 0.5
        assert config.ase_threshold == 1.0
        assert np.isclose(config.step_length, 0.2)

    def test_invalid(self):
        with pytest.raises(ConfigError):
            ControllerConfig(M=0)
        with pytest.raises(ConfigError):
            ControllerConfig(lambda_=-1.0)
        with pytest.raises(ConfigError):
            ControllerConfig(epsilon_psi=1.5)
        with pytest.raises(ConfigError):
            ControllerConfig(alpha=0.0)
        with pytest.raises(ConfigError):
            ControllerConfig(spectrum="bogus")
        with pytest.raises(ConfigError):
            ControllerConfig(excitation=1.5)
        with pytest.raises(ConfigError):
            ControllerConfig(ase_threshold=0.0)

    def test_dict_round_trip(self):
        config = ControllerConfig.from_dict({"lambda": 0.1, "alpha": 0.5})
        assert config.lambda_ == 0.1
        assert ControllerConfig.from_dict(config.to_dict()) == config
        with pytest.raises(ConfigError):
            ControllerConfig.from_dict({"gain": 1.0})

    def test_envelope(self):
        config = ControllerConfig()
        assert np.allclose(config.envelope(2.0), (0.1, 0.1, np.radians(5.0)))


class TestClipMotion:

    def test_clip(self):
        delta = clip_motion(Pose2D(0.5, -0.5, 0.01), (0.1, 0.1, 0.1))
        assert np.allclose(delta.as_vector(), (0.1, -0.1, 0.01))


class TestNormaliseStep:

    def test_length_in_scale_units(self):
        scale = np.array([0.05, 0.05, 0.1])
        delta = normalise_step(Pose2D(0.3, -0.4, 0.0), scale, 0.2)
        assert np.isclose(np.linalg.norm(delta.as_vector() / scale), 0.2)
        assert np.allclose(delta.as_vector(), (0.006, -0.008, 0.0))

    def test_direction_kept(self):
        scale = np.array([0.05, 0.05, 0.1])
        delta = Pose2D(0.01, 0.02, -0.3)
        scaled = normalise_step(delta, scale, 1.0).as_vector() / scale
        direction = delta.as_vector() / scale
        assert np.allclose(scaled, direction / np.linalg.norm(direction))

    def test_zero(self):
        delta = Pose2D(0.0, 0.0, 0.0)
        assert normalise_step(delta, (1.0, 1.0, 1.0), 0.2) is delta


class TestControlStep:

    def test_zero_error(self):
        model = InteractionModel(np.random.default_rng(0).normal(size=(3, 3)))
        s = np.array([0.3, -0.1, 0.2])
        delta = control_step(model, s, s, 0.5)
        assert np.allclose(delta.as_vector(), 0.0)

    def test_direct_form(self):
        L = np.diag([2.0, 4.0, 0.5])
        delta = control_step(InteractionModel(L), np.array([1.0, 1.0, 1.0]), np.zeros(3), 0.5)
        assert np.allclose(delta.as_vector(), (-0.25, -0.125, -1.0))

    def test_inverse_form(self):
        L_inv = np.diag([0.5, 0.25, 2.0])
        model = InteractionModel(L_inv, form="inverse")
        delta = control_step(model, np.array([1.0, 1.0, 1.0]), np.zeros(3), 0.5)
        assert np.allclose(delta.as_vector(), (-0.25, -0.125, -1.0))

    def test_motion_scale(self):
        L = np.diag([2.0, 4.0, 0.5])
        model = InteractionModel(L, motion_scale=np.array([0.1, 0.1, 2.0]))
        delta = control_step(model, np.ones(3), np.zeros(3), 0.5)
        assert np.allclose(delta.as_vector(), (-0.025, -0.0125, -2.0))

    def test_pseudo_inverse_truncation(self):
        L = np.diag([1.0, 1.0, 1e-14])
        delta = control_step(InteractionModel(L), np.ones(3), np.zeros(3), 1.0)
        assert np.allclose(delta.as_vector(), (-1.0, -1.0, 0.0))

    @pytest.mark.parametrize("alpha", [0.1, 0.5, 1.0])
    @pytest.mark.parametrize("form", ["direct", "inverse"])
    def test_contraction(self, alpha, form):
        # Features of an exactly linear plant, s = L r.
        rng = np.random.default_rng(1)
        L = rng.normal(size=(3, 3)) + 3.0 * np.identity(3)
        model = InteractionModel(L if form == "direct" else np.linalg.inv(L), form=form)
        s_star = rng.normal(size=3)
        s = rng.normal(size=3)
        error = np.linalg.norm(s - s_star)
        lyapunov = error ** 2
        for _ in range(10):
            delta = control_step(model, s, s_star, alpha)
            s = s + np.dot(L, delta.as_vector())
            new_error = np.linalg.norm(s - s_star)
            assert np.isclose(new_error, (1.0 - alpha) * error, atol=1e-9)
            if alpha < 1.0:
                assert new_error ** 2 < lyapunov
            error, lyapunov = new_error, new_error ** 2

    def test_non_finite(self):
        model = InteractionModel(np.full((3, 3), 1e308), form="inverse")
        with np.errstate(over="ignore", invalid="ignore"):
            with pytest.raises(ControlError):
                control_step(model, np.full(3, 10.0), np.zeros(3), 1.0)
