"""Tracking controllers for the three flight modes.

The moment law is shared across modes; position and velocity modes build a
computed attitude R_c whose third column aligns the thrust axis with the
acceleration-producing direction, with Omega_c and dOmega_c obtained by
analytically differentiating that construction twice (fdot is exact,
fdot = -Adot . R e3 - A . R hat(Omega) e3, so no finite differencing or
controller memory enters the chain).

The optional ``prev`` argument only supplies the heading-continuity
fallback when the commanded b1d becomes parallel to b3c mid-flight.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from . import _kernels, so3
from .dynamics import E3, ControlOutput, QuadParams, VehicleState
from .errors import (
    DegenerateProjection,
    ThrustSingularity,
    ThrustVectorSingularity,
    ValidationError,
)

Vec3 = NDArray[np.float64]


@dataclass(frozen=True)
class Gains:
    k_x: float
    k_v: float
    k_R: float
    k_Omega: float

    def __post_init__(self):
        if min(self.k_x, self.k_v, self.k_R, self.k_Omega) <= 0:
            raise ValidationError("all gains must be strictly positive")


@dataclass(frozen=True)
class AttitudeCommand:
    R_d: NDArray[np.float64]
    Omega_d: Vec3
    dOmega_d: Vec3

    def __post_init__(self):
        object.__setattr__(self, "R_d", so3.check_rotation(self.R_d))
        object.__setattr__(self, "Omega_d", np.asarray(self.Omega_d, float))
        object.__setattr__(self, "dOmega_d", np.asarray(self.dOmega_d, float))


@dataclass(frozen=True)
class PositionCommand:
    """x_d with analytic derivatives up to 4th order, plus heading target.

    x_d_derivs has shape (5, 3): rows x_d, dx_d, ..., d4x_d.
    b1d_derivs has shape (3, 3): rows b1d, db1d, ddb1d.
    """

    x_d_derivs: NDArray[np.float64]
    b1d_derivs: NDArray[np.float64]

    def __post_init__(self):
        xd = np.asarray(self.x_d_derivs, float)
        b1 = np.asarray(self.b1d_derivs, float)
        if xd.shape != (5, 3) or b1.shape != (3, 3):
            raise ValidationError("bad command derivative array shapes")
        if not (np.isfinite(xd).all() and np.isfinite(b1).all()):
            raise ValidationError("command derivatives must be finite")
        if abs(np.linalg.norm(b1[0]) - 1.0) > 1e-9:
            raise ValidationError("b1d must be a unit vector")
        object.__setattr__(self, "x_d_derivs", xd)
        object.__setattr__(self, "b1d_derivs", b1)


@dataclass(frozen=True)
class VelocityCommand:
    """v_d with analytic derivatives up to 3rd order, plus heading target.

    v_d_derivs has shape (4, 3): rows v_d, dv_d, ddv_d, d3v_d.
    """

    v_d_derivs: NDArray[np.float64]
    b1d_derivs: NDArray[np.float64]

    def __post_init__(self):
        vd = np.asarray(self.v_d_derivs, float)
        b1 = np.asarray(self.b1d_derivs, float)
        if vd.shape != (4, 3) or b1.shape != (3, 3):
            raise ValidationError("bad command derivative array shapes")
        if not (np.isfinite(vd).all() and np.isfinite(b1).all()):
            raise ValidationError("command derivatives must be finite")
        if abs(np.linalg.norm(b1[0]) - 1.0) > 1e-9:
            raise ValidationError("b1d must be a unit vector")
        object.__setattr__(self, "v_d_derivs", vd)
        object.__setattr__(self, "b1d_derivs", b1)

    def as_position_rows(self) -> NDArray[np.float64]:
        """Pack into the (5, 3) kernel layout with row 0 unused."""
        out = np.zeros((5, 3))
        out[1:5] = self.v_d_derivs
        return out


@dataclass(frozen=True)
class ComputedAttitude:
    """Computed attitude setpoint and its first two time derivatives."""

    R_c: NDArray[np.float64]
    Omega_c: Vec3
    dOmega_c: Vec3
    b3c: Vec3
    A: Vec3
    b1c: Vec3


def attitude_moment(
    s: VehicleState, cmd: AttitudeCommand, gains: Gains, p: QuadParams
) -> Vec3:
    """Moment law of the attitude-controlled flight mode."""
    e_r = so3.attitude_error(s.R, cmd.R_d)
    e_om = so3.angular_velocity_error(s.omega, s.R, cmd.R_d, cmd.Omega_d)
    rtrd = s.R.T @ cmd.R_d
    return (
        -gains.k_R * e_r
        - gains.k_Omega * e_om
        + np.cross(s.omega, p.J @ s.omega)
        - p.J @ (so3.hat(s.omega) @ (rtrd @ cmd.Omega_d) - rtrd @ cmd.dOmega_d)
    )


def altitude_thrust(
    s: VehicleState,
    x3d: float,
    dx3d: float,
    ddx3d: float,
    gains: Gains,
    p: QuadParams,
) -> float:
    """Thrust making the altitude error obey a stable linear 2nd-order ODE."""
    denom = float(E3 @ (s.R @ E3))
    if abs(denom) <= _kernels.ALT_DENOM_MIN:
        raise ThrustSingularity("e3 . R e3 too close to zero")
    return (
        gains.k_x * (s.x[2] - x3d)
        + gains.k_v * (s.v[2] - dx3d)
        + p.m * p.g
        - p.m * ddx3d
    ) / denom


def position_hold_thrust(s: VehicleState, x_c, gains: Gains, p: QuadParams) -> float:
    """Thrust that keeps the vehicle near x_c during attitude maneuvers."""
    x_c = np.asarray(x_c, dtype=float)
    return float(
        (gains.k_x * (s.x - x_c) + gains.k_v * s.v + p.m * p.g * E3) @ (s.R @ E3)
    )


def _traj_kernel_call(
    s: VehicleState,
    cmd: PositionCommand | VelocityCommand,
    gains: Gains,
    p: QuadParams,
    prev: ComputedAttitude | None,
):
    if isinstance(cmd, PositionCommand):
        rows = cmd.x_d_derivs
        mode = _kernels.MODE_POSITION
    else:
        rows = cmd.as_position_rows()
        mode = _kernels.MODE_VELOCITY
    prev_b1c = prev.b1c if prev is not None else np.zeros(3)
    out = _kernels.trajectory_mode_control(
        s.x,
        s.v,
        s.R,
        s.omega,
        rows,
        cmd.b1d_derivs,
        gains.k_x,
        gains.k_v,
        gains.k_R,
        gains.k_Omega,
        p.m,
        p.g,
        p.J,
        mode,
        prev_b1c,
        1 if prev is not None else 0,
    )
    status = out[0]
    if status == _kernels.ERR_THRUST_VECTOR:
        raise ThrustVectorSingularity("||A|| below threshold")
    if status == _kernels.ERR_DEGENERATE_PROJECTION:
        raise DegenerateProjection("b1d parallel to b3c and no usable history")
    return out


def compute_attitude_setpoint(
    s: VehicleState,
    cmd: PositionCommand | VelocityCommand,
    gains: Gains,
    p: QuadParams,
    prev: ComputedAttitude | None = None,
) -> ComputedAttitude:
    """Computed attitude R_c with analytic Omega_c and dOmega_c."""
    (_, _, _, rc, omc, domc, a_vec, b1c, _, _, _) = _traj_kernel_call(
        s, cmd, gains, p, prev
    )
    return ComputedAttitude(rc, omc, domc, rc[:, 2].copy(), a_vec, b1c)


def position_control(
    s: VehicleState,
    cmd: PositionCommand,
    gains: Gains,
    p: QuadParams,
    prev: ComputedAttitude | None = None,
) -> tuple[ControlOutput, ComputedAttitude]:
    """Thrust and moment for the position-controlled flight mode."""
    (_, f, moment, rc, omc, domc, a_vec, b1c, _, _, _) = _traj_kernel_call(
        s, cmd, gains, p, prev
    )
    setpoint = ComputedAttitude(rc, omc, domc, rc[:, 2].copy(), a_vec, b1c)
    return ControlOutput(f=float(f), M=moment), setpoint


def velocity_control(
    s: VehicleState,
    cmd: VelocityCommand,
    gains: Gains,
    p: QuadParams,
    prev: ComputedAttitude | None = None,
) -> tuple[ControlOutput, ComputedAttitude]:
    """Thrust and moment for the velocity-controlled flight mode."""
    (_, f, moment, rc, omc, domc, a_vec, b1c, _, _, _) = _traj_kernel_call(
        s, cmd, gains, p, prev
    )
    setpoint = ComputedAttitude(rc, omc, domc, rc[:, 2].copy(), a_vec, b1c)
    return ControlOutput(f=float(f), M=moment), setpoint
