"""Fixed-step RK4 simulation of a mission with full trace logging.

The rotation block is integrated as an embedded 3x3 matrix; whenever its
orthogonality drift exceeds ``ortho_tolerance`` after a step it is snapped
back to SO(3) by the polar factor.  Control is recomputed at every RK4
stage, so the closed loop is a plain smooth ODE and the stepper keeps its
4th-order accuracy.  Runs are strictly sequential and deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from . import _kernels, monitor, so3
from .controllers import Gains
from .dynamics import ControlOutput, QuadParams, VehicleState, mixing_to_rotors
from .errors import (
    DegenerateProjection,
    SimulationAbort,
    ThrustSingularity,
    ThrustVectorSingularity,
    ValidationError,
)
from .mission import (
    AltitudeTracking,
    FlightSegment,
    Mission,
    PositionTrack,
    SpinAttitudeTrack,
    VelocityTrack,
)

_STATUS_ERRORS = {
    _kernels.ERR_THRUST_VECTOR: ThrustVectorSingularity,
    _kernels.ERR_DEGENERATE_PROJECTION: DegenerateProjection,
    _kernels.ERR_ALTITUDE_SINGULARITY: ThrustSingularity,
}


@dataclass(frozen=True)
class SimConfig:
    dt: float = 1e-3
    duration: float | None = None  # None: use the mission duration
    ortho_tolerance: float = 1e-9
    log_decimation: int = 10

    def __post_init__(self):
        if self.dt <= 0:
            raise ValidationError("dt must be positive")
        if self.duration is not None and self.duration < 0:
            raise ValidationError("duration must be nonnegative")
        if self.log_decimation < 1:
            raise ValidationError("log_decimation must be a positive integer")


@dataclass(frozen=True)
class TraceRecord:
    t: float
    x: NDArray[np.float64]
    v: NDArray[np.float64]
    R: NDArray[np.float64]
    omega: NDArray[np.float64]
    f: float
    M: NDArray[np.float64]
    rotor_thrusts: NDArray[np.float64]
    mode: str
    psi: float
    e_R: NDArray[np.float64]
    e_Omega: NDArray[np.float64]
    e_x: NDArray[np.float64]
    e_v: NDArray[np.float64]
    # computed-attitude diagnostics (equal to the command in attitude mode)
    R_c: NDArray[np.float64]
    Omega_c: NDArray[np.float64]
    dOmega_c: NDArray[np.float64]


@dataclass
class RunResult:
    records: list[TraceRecord]
    negative_thrust_steps: int = 0
    projection_fallbacks: int = 0
    max_ortho_drift: float = 0.0
    segment_boundaries: list[float] = field(default_factory=list)
    report: "monitor.MonitorReport | None" = None


def _segment_mode_code(seg: FlightSegment) -> int:
    if isinstance(seg.track, SpinAttitudeTrack):
        return _kernels.MODE_ATTITUDE
    if isinstance(seg.track, PositionTrack):
        return _kernels.MODE_POSITION
    return _kernels.MODE_VELOCITY


class _SegmentContext:
    """Packed command buffers and one-step controller memory for a segment."""

    def __init__(self, seg: FlightSegment):
        self.seg = seg
        self.mode = _segment_mode_code(seg)
        self.cmd3 = np.zeros((3, 5, 3))
        self.b1d3 = np.zeros((3, 3, 3))
        self.att3 = np.zeros((3, 15))
        self.thrust_params3 = np.zeros((3, 3))
        self.thrust_code = _kernels.THRUST_POSITION_HOLD
        if isinstance(seg.thrust, AltitudeTracking):
            self.thrust_code = _kernels.THRUST_ALTITUDE
        # memory resets at each switch: no history entering a segment
        self.prev_b1c = np.zeros(3)
        self.have_prev = 0

    def fill(self, times) -> None:
        track = self.seg.track
        t_end = self.seg.t_end
        for i, t in enumerate(times):
            t = min(t, t_end)
            if self.mode == _kernels.MODE_ATTITUDE:
                _, att = track.sample(t)
                self.att3[i] = att
                self.thrust_params3[i] = self.seg.thrust.sample(t)
            else:
                rows, b1 = track.sample(t)
                self.cmd3[i] = rows
                self.b1d3[i] = b1


def step(
    state: VehicleState,
    ctx: _SegmentContext,
    t: float,
    dt: float,
    gains: Gains,
    params: QuadParams,
    ortho_tolerance: float = 1e-9,
):
    """One RK4 step under the segment's controller; returns the new state,
    the step-start control values, and diagnostics."""
    ctx.fill((t, t + 0.5 * dt, t + dt))
    out = _kernels.rk4_step(
        state.x,
        state.v,
        state.R,
        state.omega,
        dt,
        ctx.mode,
        ctx.cmd3,
        ctx.b1d3,
        ctx.att3,
        ctx.thrust_code,
        ctx.thrust_params3,
        gains.k_x,
        gains.k_v,
        gains.k_R,
        gains.k_Omega,
        params.m,
        params.g,
        params.J,
        params.J_inv,
        ctx.prev_b1c,
        ctx.have_prev,
    )
    status = out[0]
    if status != _kernels.OK:
        raise SimulationAbort(_STATUS_ERRORS[status].__name__, t)
    (_, x1, v1, r1, om1, f0, m0, rc0, omc0, domc0, b1c0, ex0, ev0, fb) = out
    drift = _kernels.ortho_drift(r1)
    if drift > ortho_tolerance:
        r1 = _kernels.polar_orthonormalize(r1)
    new_state = VehicleState.__new__(VehicleState)
    object.__setattr__(new_state, "x", x1)
    object.__setattr__(new_state, "v", v1)
    object.__setattr__(new_state, "R", r1)
    object.__setattr__(new_state, "omega", om1)
    ctx.prev_b1c = b1c0
    if ctx.mode != _kernels.MODE_ATTITUDE:
        ctx.have_prev = 1
    return new_state, (f0, m0, rc0, omc0, domc0, ex0, ev0), drift, fb


def _log_eval(state: VehicleState, ctx: _SegmentContext, t: float, gains, params):
    """Control evaluation at an exact time, used for trace records."""
    ctx.fill((t, t, t))
    out = _kernels.control_eval(
        state.x,
        state.v,
        state.R,
        state.omega,
        ctx.mode,
        ctx.cmd3[0],
        ctx.b1d3[0],
        ctx.att3[0],
        ctx.thrust_code,
        ctx.thrust_params3[0],
        gains.k_x,
        gains.k_v,
        gains.k_R,
        gains.k_Omega,
        params.m,
        params.g,
        params.J,
        ctx.prev_b1c,
        ctx.have_prev,
    )
    status = out[0]
    if status != _kernels.OK:
        raise SimulationAbort(_STATUS_ERRORS[status].__name__, t)
    return out


def _make_record(mission: Mission, seg: FlightSegment, state, t, ctrl_out):
    (_, f, moment, rc, omc, domc, _a, _b1c, e_x, e_v, _fb) = ctrl_out
    e_r = so3.attitude_error(state.R, rc)
    e_om = state.omega - state.R.T @ (rc @ omc)
    return TraceRecord(
        t=t,
        x=state.x.copy(),
        v=state.v.copy(),
        R=state.R.copy(),
        omega=state.omega.copy(),
        f=float(f),
        M=moment.copy(),
        rotor_thrusts=mixing_to_rotors(float(f), moment, mission.params),
        mode=seg.mode,
        psi=float(_kernels.psi_value(state.R, rc)),
        e_R=e_r,
        e_Omega=e_om,
        e_x=e_x.copy(),
        e_v=e_v.copy(),
        R_c=rc.copy(),
        Omega_c=omc.copy(),
        dOmega_c=domc.copy(),
    )


def run(
    mission: Mission, cfg: SimConfig | None = None, with_report: bool = True
) -> RunResult:
    """Integrate the mission; deterministic for identical inputs.

    Attaches the stability-monitor report unless ``with_report`` is False.
    """
    cfg = cfg or SimConfig()
    duration = cfg.duration if cfg.duration is not None else mission.duration
    if duration == 0:
        return RunResult(records=[])
    n_steps = int(round(duration / cfg.dt))
    state = mission.initial_state
    result = RunResult(records=[])
    contexts = {id(seg): _SegmentContext(seg) for seg in mission.segments}
    current_seg = None
    for k in range(n_steps + 1):
        t = k * cfg.dt
        seg = mission.segment_at(min(t, duration))
        if seg is not current_seg:
            current_seg = seg
            if t > 0:
                result.segment_boundaries.append(t)
        ctx = contexts[id(seg)]
        if k % cfg.log_decimation == 0 or k == n_steps:
            ctrl_out = _log_eval(state, ctx, t, mission.gains, mission.params)
            rec = _make_record(mission, seg, state, t, ctrl_out)
            if not np.isfinite(rec.f) or not np.isfinite(rec.x).all():
                raise SimulationAbort("non-finite state or control", t)
            result.records.append(rec)
            if np.any(rec.rotor_thrusts < 0):
                result.negative_thrust_steps += 1
        if k == n_steps:
            break
        state, _, drift, fb = step(
            state,
            ctx,
            t,
            cfg.dt,
            mission.gains,
            mission.params,
            cfg.ortho_tolerance,
        )
        result.projection_fallbacks += fb
        result.max_ortho_drift = max(result.max_ortho_drift, drift)
        if not np.isfinite(state.x).all() or not np.isfinite(state.omega).all():
            raise SimulationAbort("non-finite state", t + cfg.dt)
    if with_report:
        result.report = monitor.analyze(result.records, mission)
    return result
