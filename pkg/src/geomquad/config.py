"""Scenario configuration: YAML parsing, validation, and the registry.

A config names a built-in scenario (``scenario: case1``) or describes a
mission inline (``mission:`` with an initial state and segment list), and
may override vehicle parameters, gains, and simulation settings.  Unknown
keys are rejected so typos fail loudly.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import yaml

from .controllers import Gains
from .dynamics import QuadParams, VehicleState
from .errors import ParseError, ValidationError
from .mission import (
    AltitudeTracking,
    FlightSegment,
    Mission,
    PositionHold,
    PositionTrack,
    SpinAttitudeTrack,
    VelocityTrack,
    build_case1,
    build_case2,
    upside_down_initial_state,
)
from .sim import SimConfig

SCENARIOS = {
    "case1": build_case1,
    "case2": build_case2,
}


def list_scenarios() -> list[str]:
    return sorted(SCENARIOS)


@dataclass(frozen=True)
class ScenarioConfig:
    mission: Mission
    sim: SimConfig
    name: str | None = None
    out_prefix: str | None = None


def _check_keys(d: dict, allowed: set[str], where: str) -> None:
    for k in d:
        if k not in allowed:
            raise ValidationError(f"unknown key {k!r} in {where}")


def _vec(v, where: str) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.shape != (3,):
        raise ValidationError(f"{where} must be a 3-vector")
    return arr


def _params_from(d: dict, base: QuadParams) -> QuadParams:
    _check_keys(d, {"m", "J", "d", "c_tau_f", "g"}, "params")
    j = base.J
    if "J" in d:
        arr = np.asarray(d["J"], dtype=float)
        j = np.diag(arr) if arr.shape == (3,) else arr
    return QuadParams(
        m=float(d.get("m", base.m)),
        J=j,
        d=float(d.get("d", base.d)),
        c_tau_f=float(d.get("c_tau_f", base.c_tau_f)),
        g=float(d.get("g", base.g)),
    )


def _gains_from(d: dict, base: Gains) -> Gains:
    _check_keys(d, {"k_x", "k_v", "k_R", "k_Omega"}, "gains")
    return Gains(
        k_x=float(d.get("k_x", base.k_x)),
        k_v=float(d.get("k_v", base.k_v)),
        k_R=float(d.get("k_R", base.k_R)),
        k_Omega=float(d.get("k_Omega", base.k_Omega)),
    )


def _sim_from(d: dict, base: SimConfig) -> SimConfig:
    _check_keys(
        d, {"dt", "duration", "ortho_tolerance", "log_decimation"}, "sim"
    )
    return SimConfig(
        dt=float(d.get("dt", base.dt)),
        duration=(
            float(d["duration"]) if "duration" in d else base.duration
        ),
        ortho_tolerance=float(d.get("ortho_tolerance", base.ortho_tolerance)),
        log_decimation=int(d.get("log_decimation", base.log_decimation)),
    )


def _initial_from(d: dict) -> VehicleState:
    _check_keys(d, {"x", "v", "R", "omega"}, "mission.initial")
    r_spec = d.get("R", "identity")
    if r_spec == "identity":
        r = np.eye(3)
    elif r_spec == "upside_down":
        r = upside_down_initial_state().R
    else:
        r = np.asarray(r_spec, dtype=float)
    return VehicleState(
        x=_vec(d.get("x", (0, 0, 0)), "initial.x"),
        v=_vec(d.get("v", (0, 0, 0)), "initial.v"),
        R=r,
        omega=_vec(d.get("omega", (0, 0, 0)), "initial.omega"),
    )


def _segment_from(d: dict) -> FlightSegment:
    if "mode" not in d:
        raise ValidationError("segment must declare a mode")
    mode = d["mode"]
    common = {"mode", "t_start", "t_end"}
    t_start = float(d.get("t_start", 0.0))
    t_end = float(d["t_end"]) if "t_end" in d else None
    if t_end is None:
        raise ValidationError("segment must declare t_end")
    if mode == "position":
        _check_keys(d, common | {"x0", "rate", "amp", "freq", "b1d"}, "segment")
        track = PositionTrack(
            x0=_vec(d.get("x0", (0, 0, 0)), "segment.x0"),
            rate=_vec(d.get("rate", (0, 0, 0)), "segment.rate"),
            amp=_vec(d.get("amp", (0, 0, 0)), "segment.amp"),
            freq=float(d.get("freq", 0.0)),
            b1d=_vec(d.get("b1d", (1, 0, 0)), "segment.b1d"),
            t0=t_start,
        )
        return FlightSegment(t_start, t_end, track)
    if mode == "velocity":
        _check_keys(d, common | {"v0", "rate", "amp", "freq", "b1d"}, "segment")
        track = VelocityTrack(
            v0=_vec(d.get("v0", (0, 0, 0)), "segment.v0"),
            rate=_vec(d.get("rate", (0, 0, 0)), "segment.rate"),
            amp=_vec(d.get("amp", (0, 0, 0)), "segment.amp"),
            freq=float(d.get("freq", 0.0)),
            b1d=_vec(d.get("b1d", (1, 0, 0)), "segment.b1d"),
            t0=t_start,
        )
        return FlightSegment(t_start, t_end, track)
    if mode == "attitude":
        _check_keys(d, common | {"axis", "rate", "R0", "thrust"}, "segment")
        r0 = np.asarray(d["R0"], dtype=float) if "R0" in d else np.eye(3)
        track = SpinAttitudeTrack(
            axis=_vec(d.get("axis", (0, 0, 1)), "segment.axis"),
            rate=float(d.get("rate", 0.0)),
            t0=t_start,
            R0=r0,
        )
        thrust_spec = d.get("thrust")
        if not isinstance(thrust_spec, dict):
            raise ValidationError("attitude segment needs a thrust policy")
        _check_keys(thrust_spec, {"hold", "altitude"}, "segment.thrust")
        if "hold" in thrust_spec:
            thrust = PositionHold(x_c=_vec(thrust_spec["hold"], "thrust.hold"))
        else:
            alt = thrust_spec["altitude"]
            _check_keys(alt, {"x3d0", "rate"}, "segment.thrust.altitude")
            thrust = AltitudeTracking(
                x3d0=float(alt["x3d0"]), rate=float(alt.get("rate", 0.0)), t0=t_start
            )
        return FlightSegment(t_start, t_end, track, thrust=thrust)
    raise ValidationError(f"unknown segment mode {mode!r}")


def parse_config(text: str) -> ScenarioConfig:
    """Parse and fully validate a scenario config document."""
    try:
        doc = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        line = mark.line + 1 if mark else "?"
        column = mark.column + 1 if mark else "?"
        raise ParseError(
            f"line {line}, column {column}: {exc.problem or exc}"
        ) from exc
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ParseError("config root must be a mapping")
    _check_keys(
        doc, {"scenario", "mission", "params", "gains", "sim", "out"}, "config"
    )
    name = doc.get("scenario")
    if name is not None and "mission" in doc:
        raise ValidationError("give either a scenario name or an inline mission")
    if name is not None:
        if name not in SCENARIOS:
            raise ValidationError(f"unknown scenario {name!r}")
        mission = SCENARIOS[name]()
    elif "mission" in doc:
        spec = doc["mission"]
        _check_keys(spec, {"initial", "segments"}, "mission")
        segs = tuple(_segment_from(s) for s in spec.get("segments", []))
        initial = _initial_from(spec.get("initial", {}))
        base = SCENARIOS["case1"]()
        mission = Mission(
            segments=segs,
            initial_state=initial,
            params=base.params,
            gains=base.gains,
        )
    else:
        raise ValidationError("config needs a scenario name or a mission")
    if "params" in doc:
        mission = replace(mission, params=_params_from(doc["params"], mission.params))
    if "gains" in doc:
        mission = replace(mission, gains=_gains_from(doc["gains"], mission.gains))
    sim = _sim_from(doc.get("sim", {}), SimConfig())
    return ScenarioConfig(
        mission=mission, sim=sim, name=name, out_prefix=doc.get("out")
    )


def _track_spec(seg: FlightSegment) -> dict:
    t = seg.track
    d: dict = {"t_start": seg.t_start, "t_end": seg.t_end, "mode": seg.mode}
    if isinstance(t, PositionTrack):
        d.update(x0=t.x0.tolist(), rate=t.rate.tolist(), amp=t.amp.tolist(),
                 freq=t.freq, b1d=t.b1d.tolist())
    elif isinstance(t, VelocityTrack):
        d.update(v0=t.v0.tolist(), rate=t.rate.tolist(), amp=t.amp.tolist(),
                 freq=t.freq, b1d=t.b1d.tolist())
    else:
        d.update(axis=t.axis.tolist(), rate=t.rate, R0=t.R0.tolist())
        if isinstance(seg.thrust, PositionHold):
            d["thrust"] = {"hold": seg.thrust.x_c.tolist()}
        else:
            d["thrust"] = {
                "altitude": {"x3d0": seg.thrust.x3d0, "rate": seg.thrust.rate}
            }
    return d


def mission_to_spec(mission: Mission) -> dict:
    """Inline-mission document equivalent to the given mission."""
    s0 = mission.initial_state
    return {
        "mission": {
            "initial": {
                "x": s0.x.tolist(),
                "v": s0.v.tolist(),
                "R": s0.R.tolist(),
                "omega": s0.omega.tolist(),
            },
            "segments": [_track_spec(s) for s in mission.segments],
        },
        "params": {
            "m": mission.params.m,
            "J": mission.params.J.tolist(),
            "d": mission.params.d,
            "c_tau_f": mission.params.c_tau_f,
            "g": mission.params.g,
        },
        "gains": {
            "k_x": mission.gains.k_x,
            "k_v": mission.gains.k_v,
            "k_R": mission.gains.k_R,
            "k_Omega": mission.gains.k_Omega,
        },
    }


def missions_equal(a: Mission, b: Mission, tol: float = 0.0) -> bool:
    """Structural equality of two missions (exact by default)."""
    spec_a, spec_b = mission_to_spec(a), mission_to_spec(b)
    if tol == 0.0:
        return spec_a == spec_b

    def close(u, v):
        if isinstance(u, dict):
            return u.keys() == v.keys() and all(close(u[k], v[k]) for k in u)
        if isinstance(u, list):
            return len(u) == len(v) and all(close(x, y) for x, y in zip(u, v))
        if isinstance(u, float) and isinstance(v, float):
            return abs(u - v) <= tol
        return u == v

    return close(spec_a, spec_b)
