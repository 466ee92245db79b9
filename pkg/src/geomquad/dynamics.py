"""Quadrotor parameters, state, rotor mixing, and rigid-body dynamics.

Axis convention: the inertial third axis e3 points *down* (gravity is
+g*e3), so hovering thrust f = m*g acts along -b3 = -R e3.  Altitude gains
in plots must flip the sign of x3 for an upward-positive reading.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from . import _kernels, so3
from .errors import SingularMixing, ValidationError

E3 = np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True)
class QuadParams:
    """Physical constants of the vehicle.

    J may be any symmetric positive-definite inertia; diagonal is the
    common case but nothing downstream assumes it.
    """

    m: float
    J: NDArray[np.float64]
    d: float
    c_tau_f: float
    g: float = 9.81

    def __post_init__(self):
        if self.m <= 0:
            raise ValidationError("mass must be positive")
        if self.d <= 0:
            raise ValidationError("arm length d must be positive")
        if self.c_tau_f == 0:
            raise ValidationError("c_tau_f must be nonzero")
        if self.g <= 0:
            raise ValidationError("gravity must be positive")
        j = np.asarray(self.J, dtype=float)
        if j.shape != (3, 3):
            raise ValidationError("inertia must be a 3x3 matrix")
        if not np.allclose(j, j.T, atol=1e-12):
            raise ValidationError("inertia must be symmetric")
        if np.any(np.linalg.eigvalsh(j) <= 0):
            raise ValidationError("inertia must be positive definite")
        object.__setattr__(self, "J", j)

    @property
    def J_inv(self) -> NDArray[np.float64]:
        return np.linalg.inv(self.J)


@dataclass(frozen=True)
class VehicleState:
    """Position/velocity in the inertial frame, attitude, body rates."""

    x: NDArray[np.float64]
    v: NDArray[np.float64]
    R: NDArray[np.float64]
    omega: NDArray[np.float64]

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float))
        object.__setattr__(self, "R", so3.check_rotation(self.R))
        object.__setattr__(self, "omega", np.asarray(self.omega, dtype=float))


@dataclass(frozen=True)
class ControlOutput:
    """Total thrust along -b3, body moment, optional per-rotor split."""

    f: float
    M: NDArray[np.float64]
    rotor_thrusts: NDArray[np.float64] | None = None

    def __post_init__(self):
        object.__setattr__(self, "M", np.asarray(self.M, dtype=float))
        if self.rotor_thrusts is not None:
            rt = np.asarray(self.rotor_thrusts, dtype=float)
            if abs(self.f - rt.sum()) > 1e-9:
                raise ValidationError("rotor thrusts do not sum to f")
            object.__setattr__(self, "rotor_thrusts", rt)


def mixing_matrix(p: QuadParams) -> NDArray[np.float64]:
    """4x4 map from per-rotor thrusts to (f, M); determinant 8*c_tau_f*d^2."""
    d, c = p.d, p.c_tau_f
    return np.array(
        [
            [1.0, 1.0, 1.0, 1.0],
            [0.0, -d, 0.0, d],
            [d, 0.0, -d, 0.0],
            [-c, c, -c, c],
        ]
    )


def mixing_from_rotors(rotor_thrusts, p: QuadParams) -> tuple[float, NDArray[np.float64]]:
    fm = mixing_matrix(p) @ np.asarray(rotor_thrusts, dtype=float)
    return float(fm[0]), fm[1:]


def mixing_to_rotors(f: float, M, p: QuadParams) -> NDArray[np.float64]:
    """Invert the mixing map; thrusts may come out negative (no saturation)."""
    if abs(p.d) <= 1e-12 or abs(p.c_tau_f) <= 1e-12:
        raise SingularMixing("mixing matrix singular: d or c_tau_f near zero")
    rhs = np.array([f, *np.asarray(M, dtype=float)])
    return np.linalg.solve(mixing_matrix(p), rhs)


@dataclass(frozen=True)
class StateDerivative:
    x_dot: NDArray[np.float64]
    v_dot: NDArray[np.float64]
    R_dot: NDArray[np.float64]
    omega_dot: NDArray[np.float64]


def state_derivative(s: VehicleState, u: ControlOutput, p: QuadParams) -> StateDerivative:
    """Continuous-time equations of motion of the vehicle."""
    xd, vd, rd, omd = _kernels.state_derivative(
        s.x, s.v, s.R, s.omega, u.f, u.M, p.m, p.g, p.J, p.J_inv
    )
    return StateDerivative(xd, vd, rd, omd)


def mechanical_energy(s: VehicleState, p: QuadParams) -> float:
    """Conserved by the unforced flow (f = 0, M = 0); integrator oracle."""
    kinetic = 0.5 * p.m * float(s.v @ s.v) + 0.5 * float(s.omega @ (p.J @ s.omega))
    potential = -p.m * p.g * float(E3 @ s.x)  # e3 points down
    return kinetic + potential
