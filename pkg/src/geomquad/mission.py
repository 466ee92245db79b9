"""Flight-mode segments, switching schedule, and the two built-in maneuvers.

Commands are represented by small "track" dataclasses that evaluate the
commanded output and its analytic derivatives at any time inside the
segment window.  Tracks are plain value objects so missions compare
structurally, which the config round-trip tests rely on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np
from numpy.typing import NDArray

from . import so3
from .controllers import AttitudeCommand, Gains, PositionCommand, VelocityCommand
from .dynamics import QuadParams, VehicleState
from .errors import OutOfWindow, ValidationError

Vec3 = NDArray[np.float64]

_TWO_PI = 2.0 * np.pi


def _vec(v) -> NDArray[np.float64]:
    return np.asarray(v, dtype=float)


@dataclass(frozen=True)
class PositionTrack:
    """x_d(t) = x0 + rate*(t-t0) + amp*sin(2*pi*freq*(t-t0)), per component.

    Covers constant, linear, and sinusoidal position commands; derivatives
    beyond the sinusoid terms are exactly zero.
    """

    x0: Vec3
    rate: Vec3 = field(default_factory=lambda: np.zeros(3))
    amp: Vec3 = field(default_factory=lambda: np.zeros(3))
    freq: float = 0.0
    b1d: Vec3 = field(default_factory=lambda: np.array([1.0, 0.0, 0.0]))
    t0: float = 0.0

    def __post_init__(self):
        for name in ("x0", "rate", "amp", "b1d"):
            object.__setattr__(self, name, _vec(getattr(self, name)))
        if abs(np.linalg.norm(self.b1d) - 1.0) > 1e-9:
            raise ValidationError("b1d must be a unit vector")

    def sample(self, t: float) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        tau = t - self.t0
        w = _TWO_PI * self.freq
        rows = np.zeros((5, 3))
        rows[0] = self.x0 + self.rate * tau
        rows[1] = self.rate
        if w != 0.0:
            s, c = np.sin(w * tau), np.cos(w * tau)
            rows[0] += self.amp * s
            rows[1] += self.amp * (w * c)
            rows[2] = self.amp * (-w * w * s)
            rows[3] = self.amp * (-w * w * w * c)
            rows[4] = self.amp * (w * w * w * w * s)
        b1 = np.zeros((3, 3))
        b1[0] = self.b1d
        return rows, b1


@dataclass(frozen=True)
class VelocityTrack:
    """v_d(t) = v0 + rate*(t-t0) + amp*sin(2*pi*freq*(t-t0)), per component."""

    v0: Vec3
    rate: Vec3 = field(default_factory=lambda: np.zeros(3))
    amp: Vec3 = field(default_factory=lambda: np.zeros(3))
    freq: float = 0.0
    b1d: Vec3 = field(default_factory=lambda: np.array([1.0, 0.0, 0.0]))
    t0: float = 0.0

    def __post_init__(self):
        for name in ("v0", "rate", "amp", "b1d"):
            object.__setattr__(self, name, _vec(getattr(self, name)))
        if abs(np.linalg.norm(self.b1d) - 1.0) > 1e-9:
            raise ValidationError("b1d must be a unit vector")

    def sample(self, t: float) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        tau = t - self.t0
        w = _TWO_PI * self.freq
        rows = np.zeros((5, 3))  # kernel layout: rows 1..4 hold v_d..d3v_d
        rows[1] = self.v0 + self.rate * tau
        rows[2] = self.rate
        if w != 0.0:
            s, c = np.sin(w * tau), np.cos(w * tau)
            rows[1] += self.amp * s
            rows[2] += self.amp * (w * c)
            rows[3] = self.amp * (-w * w * s)
            rows[4] = self.amp * (-w * w * w * c)
        b1 = np.zeros((3, 3))
        b1[0] = self.b1d
        return rows, b1


@dataclass(frozen=True)
class SpinAttitudeTrack:
    """R_d(t) = R0 exp(rate*(t-t0)*hat(axis)): constant-rate eigen-axis spin.

    Omega_d = rate*axis exactly and dOmega_d = 0, since hat(Omega_d)
    commutes with the exponential.
    """

    axis: Vec3
    rate: float
    t0: float = 0.0
    R0: NDArray[np.float64] = field(default_factory=lambda: np.eye(3))

    def __post_init__(self):
        axis = _vec(self.axis)
        n = np.linalg.norm(axis)
        if n == 0:
            raise ValidationError("spin axis must be nonzero")
        object.__setattr__(self, "axis", axis / n)
        object.__setattr__(self, "R0", so3.check_rotation(self.R0))

    def sample(self, t: float) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        rd = self.R0 @ so3.exp_so3(self.rate * (t - self.t0) * self.axis)
        att = np.zeros(15)
        att[0:9] = rd.reshape(9)
        att[9:12] = self.rate * self.axis
        return rd, att


@dataclass(frozen=True)
class AltitudeTracking:
    """Attitude-mode thrust policy: track x3d(t) = x3d0 + rate*(t-t0)."""

    x3d0: float
    rate: float = 0.0
    t0: float = 0.0

    def sample(self, t: float) -> NDArray[np.float64]:
        return np.array([self.x3d0 + self.rate * (t - self.t0), self.rate, 0.0])


@dataclass(frozen=True)
class PositionHold:
    """Attitude-mode thrust policy: position-hold feedback about x_c."""

    x_c: Vec3

    def __post_init__(self):
        object.__setattr__(self, "x_c", _vec(self.x_c))

    def sample(self, t: float) -> NDArray[np.float64]:
        return self.x_c


Track = Union[PositionTrack, VelocityTrack, SpinAttitudeTrack]
ThrustPolicy = Union[AltitudeTracking, PositionHold]


@dataclass(frozen=True)
class FlightSegment:
    t_start: float
    t_end: float
    track: Track
    thrust: ThrustPolicy | None = None

    def __post_init__(self):
        if self.t_end <= self.t_start:
            raise ValidationError("segment must have t_end > t_start")
        is_attitude = isinstance(self.track, SpinAttitudeTrack)
        if is_attitude and self.thrust is None:
            raise ValidationError("attitude segment needs a thrust policy")
        if not is_attitude and self.thrust is not None:
            raise ValidationError("thrust policy only valid for attitude segments")

    @property
    def mode(self) -> str:
        if isinstance(self.track, SpinAttitudeTrack):
            return "attitude"
        if isinstance(self.track, PositionTrack):
            return "position"
        return "velocity"


def evaluate_command(
    seg: FlightSegment, t: float
) -> AttitudeCommand | PositionCommand | VelocityCommand:
    """Command with all derivatives the segment's controller needs."""
    if not (seg.t_start <= t <= seg.t_end):
        raise OutOfWindow(
            f"t={t} outside segment window [{seg.t_start}, {seg.t_end}]"
        )
    if isinstance(seg.track, SpinAttitudeTrack):
        rd, att = seg.track.sample(t)
        return AttitudeCommand(R_d=rd, Omega_d=att[9:12], dOmega_d=att[12:15])
    rows, b1 = seg.track.sample(t)
    if isinstance(seg.track, PositionTrack):
        return PositionCommand(x_d_derivs=rows, b1d_derivs=b1)
    return VelocityCommand(v_d_derivs=rows[1:5], b1d_derivs=b1)


@dataclass(frozen=True)
class Mission:
    segments: tuple[FlightSegment, ...]
    initial_state: VehicleState
    params: QuadParams
    gains: Gains

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        if not self.segments:
            raise ValidationError("mission needs at least one segment")
        if abs(self.segments[0].t_start) > 0:
            raise ValidationError("first segment must start at t = 0")
        for a, b in zip(self.segments, self.segments[1:]):
            if abs(a.t_end - b.t_start) > 1e-12:
                raise ValidationError("segments must be contiguous in time")

    @property
    def duration(self) -> float:
        return self.segments[-1].t_end

    def segment_at(self, t: float) -> FlightSegment:
        """Active segment (start-inclusive; final segment owns its end)."""
        for seg in self.segments:
            if t < seg.t_end:
                return seg
        return self.segments[-1]


# vehicle and gain set used by both built-in maneuvers
def default_params() -> QuadParams:
    return QuadParams(
        m=4.34,
        J=np.diag([0.0820, 0.0845, 0.1377]),
        d=0.315,
        c_tau_f=8.004e-3,
        g=9.81,
    )


def default_gains(m: float = 4.34) -> Gains:
    return Gains(k_x=16.0 * m, k_v=5.6 * m, k_R=8.81, k_Omega=2.54)


def upside_down_initial_state() -> VehicleState:
    r0 = np.array(
        [
            [1.0, 0.0, 0.0],
            [0.0, -0.9995, -0.0314],
            [0.0, 0.0314, -0.9995],
        ]
    )
    # entries above are rounded to 4 digits; snap to the rotation manifold
    r0 = so3.orthonormalize(r0)
    return VehicleState(x=np.zeros(3), v=np.zeros(3), R=r0, omega=np.zeros(3))


def build_case1(duration: float = 10.0) -> Mission:
    """Hover recovery from upside down, position mode throughout."""
    p = default_params()
    seg = FlightSegment(
        t_start=0.0,
        t_end=duration,
        track=PositionTrack(x0=np.zeros(3), b1d=np.array([1.0, 0.0, 0.0])),
    )
    return Mission(
        segments=(seg,),
        initial_state=upside_down_initial_state(),
        params=p,
        gains=default_gains(p.m),
    )


def build_case2() -> Mission:
    """Five-segment maneuver with a 720 deg and a 360 deg flip."""
    p = default_params()
    e1 = np.array([1.0, 0.0, 0.0])
    e2 = np.array([0.0, 1.0, 0.0])
    segments = (
        FlightSegment(
            0.0,
            4.0,
            VelocityTrack(
                v0=np.array([1.0, 0.0, -0.1]),
                rate=np.array([0.5, 0.0, 0.0]),
                amp=np.array([0.0, 0.2, 0.0]),
                freq=1.0,
                b1d=e1,
            ),
        ),
        FlightSegment(
            4.0,
            6.0,
            SpinAttitudeTrack(axis=e2, rate=_TWO_PI, t0=4.0),
            thrust=PositionHold(x_c=np.array([8.0, 0.0, 0.0])),
        ),
        FlightSegment(
            6.0,
            8.0,
            PositionTrack(
                x0=np.array([8.0, 0.0, 0.0]),
                rate=np.array([-1.0, 0.0, 0.0]),
                b1d=e1,
                t0=6.0,
            ),
        ),
        FlightSegment(
            8.0,
            9.0,
            SpinAttitudeTrack(axis=e1, rate=_TWO_PI, t0=8.0),
            thrust=PositionHold(x_c=np.array([6.0, 0.0, 0.0])),
        ),
        FlightSegment(
            9.0,
            12.0,
            PositionTrack(
                x0=np.array([5.0, 0.0, 0.0]),
                rate=np.array([-5.0 / 3.0, 0.0, 0.0]),
                b1d=e2,
                t0=9.0,
            ),
        ),
    )
    return Mission(
        segments=segments,
        initial_state=upside_down_initial_state(),
        params=p,
        gains=default_gains(p.m),
    )
