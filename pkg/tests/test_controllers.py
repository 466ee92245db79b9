"""Controller tests: moment law, thrust laws, and the computed attitude."""

import numpy as np
import pytest

from conftest import random_rotation
from geomquad.controllers import (
    AttitudeCommand,
    Gains,
    PositionCommand,
    VelocityCommand,
    altitude_thrust,
    attitude_moment,
    compute_attitude_setpoint,
    position_control,
    position_hold_thrust,
    velocity_control,
)
from geomquad.dynamics import QuadParams, VehicleState
from geomquad.errors import (
    DegenerateProjection,
    ThrustSingularity,
    ThrustVectorSingularity,
    ValidationError,
)
from geomquad.mission import (
    build_case2,
    default_gains,
    default_params,
    evaluate_command,
    upside_down_initial_state,
)
from geomquad.so3 import attitude_error, exp_so3, psi

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])


def hover_cmd(x_d=np.zeros(3), xdd_d=np.zeros(3), b1d=E1):
    rows = np.zeros((5, 3))
    rows[0] = x_d
    rows[2] = xdd_d
    b1 = np.zeros((3, 3))
    b1[0] = b1d
    return PositionCommand(x_d_derivs=rows, b1d_derivs=b1)


def rest_state(x=np.zeros(3), R=None, v=np.zeros(3), omega=np.zeros(3)):
    return VehicleState(x, v, np.eye(3) if R is None else R, omega)


class TestGains:
    def test_positive_required(self):
        with pytest.raises(ValidationError):
            Gains(k_x=0.0, k_v=1.0, k_R=1.0, k_Omega=1.0)


class TestAttitudeMoment:
    def setup_method(self):
        self.p = default_params()
        self.gains = default_gains()

    def test_exact_tracking_constant(self):
        rng = np.random.default_rng(41)
        rd = random_rotation(rng)
        s = rest_state(R=rd)
        cmd = AttitudeCommand(R_d=rd, Omega_d=np.zeros(3), dOmega_d=np.zeros(3))
        assert np.abs(attitude_moment(s, cmd, self.gains, self.p)).max() < 1e-12

    def test_exact_tracking_spin_feedforward(self):
        rng = np.random.default_rng(42)
        rd = random_rotation(rng)
        om_d = rng.normal(size=3)
        dom_d = rng.normal(size=3)
        s = rest_state(R=rd, omega=om_d)
        cmd = AttitudeCommand(R_d=rd, Omega_d=om_d, dOmega_d=dom_d)
        expected = np.cross(om_d, self.p.J @ om_d) + self.p.J @ dom_d
        m = attitude_moment(s, cmd, self.gains, self.p)
        assert np.abs(m - expected).max() < 1e-12

    def test_pure_attitude_error(self):
        p = QuadParams(m=1.0, J=np.eye(3), d=0.3, c_tau_f=0.01, g=9.81)
        s = rest_state(R=exp_so3(np.array([0.0, 0, np.pi / 2])))
        cmd = AttitudeCommand(R_d=np.eye(3), Omega_d=np.zeros(3), dOmega_d=np.zeros(3))
        m = attitude_moment(s, cmd, self.gains, p)
        assert np.abs(m - np.array([0.0, 0.0, -self.gains.k_R])).max() < 1e-12


class TestThrustLaws:
    def setup_method(self):
        self.p = default_params()
        self.gains = default_gains()

    def test_altitude_hover(self):
        f = altitude_thrust(rest_state(), 0.0, 0.0, 0.0, self.gains, self.p)
        assert f == pytest.approx(self.p.m * self.p.g)

    def test_altitude_horizontal_singularity(self):
        s = rest_state(R=exp_so3(np.array([0.0, np.pi / 2, 0.0])))
        with pytest.raises(ThrustSingularity):
            altitude_thrust(s, 0.0, 0.0, 0.0, self.gains, self.p)

    def test_altitude_unit_error(self):
        s = rest_state(x=np.array([0.0, 0, 1.0]))
        f = altitude_thrust(s, 0.0, 0.0, 0.0, self.gains, self.p)
        assert f == pytest.approx(self.gains.k_x + self.p.m * self.p.g)

    def test_position_hold_at_target(self):
        f = position_hold_thrust(rest_state(), np.zeros(3), self.gains, self.p)
        assert f == pytest.approx(self.p.m * self.p.g)

    def test_position_hold_upside_down(self):
        s = rest_state(R=np.diag([1.0, -1.0, -1.0]))
        f = position_hold_thrust(s, np.zeros(3), self.gains, self.p)
        assert f == pytest.approx(-self.p.m * self.p.g)

    def test_position_hold_horizontal_error_invisible(self):
        s = rest_state(x=E1)
        f = position_hold_thrust(s, np.zeros(3), self.gains, self.p)
        assert f == pytest.approx(self.p.m * self.p.g)


class TestComputedAttitude:
    def setup_method(self):
        self.p = default_params()
        self.gains = default_gains()

    def test_hover_setpoint(self):
        sp = compute_attitude_setpoint(rest_state(), hover_cmd(), self.gains, self.p)
        assert np.abs(sp.b3c - E3).max() < 1e-12
        assert np.abs(sp.R_c - np.eye(3)).max() < 1e-12
        assert np.abs(sp.Omega_c).max() < 1e-12

    def test_commanded_free_fall_singularity(self):
        # xdd_d = +g e3 cancels gravity exactly: A = 0 with zero errors
        cmd = hover_cmd(xdd_d=self.p.g * E3)
        with pytest.raises(ThrustVectorSingularity):
            compute_attitude_setpoint(rest_state(), cmd, self.gains, self.p)

    def test_lateral_acceleration_tilt(self):
        cmd = hover_cmd(xdd_d=self.p.g * E1)
        sp = compute_attitude_setpoint(rest_state(), cmd, self.gains, self.p)
        expected = np.array([-1.0, 0.0, 1.0]) / np.sqrt(2.0)
        assert np.abs(sp.b3c - expected).max() < 1e-12

    def test_degenerate_projection_without_history(self):
        # b1d = e3 is parallel to the hover thrust axis b3c = e3
        cmd = hover_cmd(b1d=E3)
        with pytest.raises(DegenerateProjection):
            compute_attitude_setpoint(rest_state(), cmd, self.gains, self.p)

    def test_degenerate_projection_uses_history(self):
        prev = compute_attitude_setpoint(rest_state(), hover_cmd(), self.gains, self.p)
        cmd = hover_cmd(b1d=E3)
        sp = compute_attitude_setpoint(rest_state(), cmd, self.gains, self.p, prev=prev)
        assert np.abs(sp.b1c - prev.b1c).max() < 1e-12

    def test_structure_invariants(self):
        rng = np.random.default_rng(43)
        for _ in range(200):
            s = VehicleState(
                rng.normal(size=3),
                rng.normal(size=3),
                random_rotation(rng),
                rng.normal(size=3),
            )
            sp = compute_attitude_setpoint(s, hover_cmd(), self.gains, self.p)
            assert abs(sp.b1c @ sp.b3c) < 1e-12
            assert np.abs(sp.R_c.T @ sp.R_c - np.eye(3)).max() < 1e-10
            assert np.linalg.det(sp.R_c) == pytest.approx(1.0, abs=1e-10)

    def test_thrust_projection_identity(self):
        # ||(e3' Rc' R e3) R e3 - Rc e3|| equals the sine of the angle
        # between the actual and commanded body-3 axes
        rng = np.random.default_rng(44)
        for _ in range(500):
            r, rc = random_rotation(rng), random_rotation(rng)
            cos3 = float(E3 @ (rc.T @ r @ E3))
            lhs = np.linalg.norm(cos3 * (r @ E3) - rc @ E3)
            assert lhs == pytest.approx(np.sqrt(1.0 - cos3**2), abs=1e-12)


class TestPositionControl:
    def setup_method(self):
        self.p = default_params()
        self.gains = default_gains()

    def test_perfect_hover(self):
        out, sp = position_control(rest_state(), hover_cmd(), self.gains, self.p)
        assert out.f == pytest.approx(self.p.m * self.p.g)
        assert np.abs(out.M).max() < 1e-12

    def test_case1_initial_attitude_error(self):
        s = upside_down_initial_state()
        _, sp = position_control(s, hover_cmd(), self.gains, self.p)
        assert psi(s.R, sp.R_c) == pytest.approx(1.995, abs=5e-3)

    def test_thrust_projection_identity(self):
        # f = ||A|| (e3' Rc' R e3) for any state
        rng = np.random.default_rng(45)
        for _ in range(200):
            s = VehicleState(
                rng.normal(size=3),
                rng.normal(size=3),
                random_rotation(rng),
                rng.normal(size=3),
            )
            out, sp = position_control(s, hover_cmd(), self.gains, self.p)
            proj = float(E3 @ (sp.R_c.T @ s.R @ E3))
            assert out.f == pytest.approx(np.linalg.norm(sp.A) * proj, abs=1e-10)

    def test_thrust_equals_norm_a_when_aligned(self):
        s = rest_state(x=E1)
        _, sp = position_control(s, hover_cmd(), self.gains, self.p)
        s_aligned = VehicleState(s.x, s.v, sp.R_c, s.omega)
        out, sp2 = position_control(s_aligned, hover_cmd(), self.gains, self.p)
        assert out.f == pytest.approx(np.linalg.norm(sp2.A), abs=1e-10)


class TestVelocityControl:
    def setup_method(self):
        self.p = default_params()
        self.gains = default_gains()

    def vel_cmd(self, v_d, dv_d=np.zeros(3), b1d=E1):
        rows = np.zeros((4, 3))
        rows[0] = v_d
        rows[1] = dv_d
        b1 = np.zeros((3, 3))
        b1[0] = b1d
        return VelocityCommand(v_d_derivs=rows, b1d_derivs=b1)

    def test_constant_velocity_cruise(self):
        v = np.array([1.0, 0.0, 0.0])
        s = rest_state(v=v)
        out, _ = velocity_control(s, self.vel_cmd(v), self.gains, self.p)
        assert out.f == pytest.approx(self.p.m * self.p.g)
        assert np.abs(out.M).max() < 1e-12

    def test_velocity_error_tilts_setpoint(self):
        s = rest_state(v=E1)  # e_v = +e1
        out, sp = velocity_control(s, self.vel_cmd(np.zeros(3)), self.gains, self.p)
        a = -self.gains.k_v * E1 - self.p.m * self.p.g * E3
        expected = -a / np.linalg.norm(a)
        assert np.abs(sp.b3c - expected).max() < 1e-12

    def test_case2_entry_regression(self):
        # frozen first-call output; locks determinism, not ground truth
        mis = build_case2()
        cmd = evaluate_command(mis.segments[0], 0.0)
        out, _ = velocity_control(
            upside_down_initial_state(), cmd, mis.gains, mis.params
        )
        assert np.isfinite(out.f) and np.isfinite(out.M).all()
        assert out.f == pytest.approx(-44.8123566100798, rel=1e-12)
        assert out.M == pytest.approx(
            [0.5945164633582918, 0.5916779947217041, 0.4574805247447356], rel=1e-12
        )
