"""Geometric flight control and deterministic quadrotor simulation on SE(3)."""

from .controllers import (
    AttitudeCommand,
    ComputedAttitude,
    Gains,
    PositionCommand,
    VelocityCommand,
)
from .config import ScenarioConfig, list_scenarios, parse_config
from .dynamics import ControlOutput, QuadParams, VehicleState
from .mission import FlightSegment, Mission, build_case1, build_case2
from .monitor import (
    GainCertificate,
    MonitorReport,
    RoaCheck,
    check_attitude_roa,
    fit_exponential_envelope,
    lyapunov_series,
    search_certificate,
)
from .sim import RunResult, SimConfig, TraceRecord, run
from .trace_io import read_trace_csv, write_trace_csv

__version__ = "0.1.0"

__all__ = [
    "AttitudeCommand",
    "ComputedAttitude",
    "ControlOutput",
    "FlightSegment",
    "GainCertificate",
    "Gains",
    "Mission",
    "MonitorReport",
    "PositionCommand",
    "QuadParams",
    "RoaCheck",
    "RunResult",
    "ScenarioConfig",
    "SimConfig",
    "TraceRecord",
    "VehicleState",
    "VelocityCommand",
    "build_case1",
    "build_case2",
    "check_attitude_roa",
    "fit_exponential_envelope",
    "list_scenarios",
    "lyapunov_series",
    "parse_config",
    "read_trace_csv",
    "run",
    "search_certificate",
    "write_trace_csv",
]
