"""Coordinate-free rotation math on SO(3).

Vectors are plain float ndarrays of shape (3,), matrices of shape (3, 3).
Rotations are represented as ndarrays; ``check_rotation`` enforces the
orthogonality and determinant invariants at API boundaries.  Everything
here is pure and allocation-only, safe to call from any thread.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

from . import _kernels
from .errors import DegenerateProjection, NotARotation, NotSkewSymmetric, SingularInput

Vec3 = NDArray[np.float64]
Mat3 = NDArray[np.float64]

ROTATION_TOL = 1e-9
SKEW_TOL = 1e-8


def check_rotation(r: Mat3, tol: float = ROTATION_TOL) -> Mat3:
    """Validate ||R^T R - I||_F <= tol and det(R) within tol of 1."""
    r = np.asarray(r, dtype=float)
    if r.shape != (3, 3):
        raise NotARotation(f"expected 3x3 matrix, got shape {r.shape}")
    drift = _kernels.ortho_drift(r)
    if drift > tol:
        raise NotARotation(f"orthogonality drift {drift:.3e} exceeds {tol:.1e}")
    det = np.linalg.det(r)
    if abs(det - 1.0) > tol:
        raise NotARotation(f"det(R) = {det!r} not within {tol:.1e} of 1")
    return r


def hat(v: Vec3) -> Mat3:
    """Skew matrix of v, satisfying hat(v) @ w = cross(v, w)."""
    return _kernels.hat(np.asarray(v, dtype=float))


def vee(m: Mat3) -> Vec3:
    """Inverse of hat; raises NotSkewSymmetric if m is not skew."""
    m = np.asarray(m, dtype=float)
    sym = m + m.T
    if np.sqrt(np.sum(sym * sym)) > SKEW_TOL:
        raise NotSkewSymmetric("matrix symmetric part exceeds tolerance")
    return _kernels.vee_skew(m)


def exp_so3(v: Vec3) -> Mat3:
    """Rodrigues exponential: rotation by ||v|| about v/||v||."""
    return _kernels.rodrigues(np.asarray(v, dtype=float))


def psi(r: Mat3, rd: Mat3) -> float:
    """Attitude error function 0.5 * tr(I - rd^T r), in [0, 3]."""
    return float(_kernels.psi_value(np.asarray(r, float), np.asarray(rd, float)))


def attitude_error(r: Mat3, rd: Mat3) -> Vec3:
    """e_R = 0.5 * vee(rd^T r - r^T rd)."""
    return _kernels.attitude_error(np.asarray(r, float), np.asarray(rd, float))


def angular_velocity_error(omega: Vec3, r: Mat3, rd: Mat3, omega_d: Vec3) -> Vec3:
    """e_Omega = Omega - R^T R_d Omega_d."""
    return _kernels.angular_velocity_error(
        np.asarray(omega, float),
        np.asarray(r, float),
        np.asarray(rd, float),
        np.asarray(omega_d, float),
    )


def normalized_projection(b1d: Vec3, b3c: Vec3) -> Vec3:
    """Unit projection of b1d onto the plane normal to unit vector b3c."""
    b1d = np.asarray(b1d, dtype=float)
    b3c = np.asarray(b3c, dtype=float)
    if abs(np.linalg.norm(b3c) - 1.0) > 1e-9:
        raise ValueError("b3c must be a unit vector")
    w = np.cross(b3c, b1d)
    s = np.linalg.norm(w)
    if s <= _kernels.PROJ_MIN:
        raise DegenerateProjection("b1d nearly parallel to b3c")
    return -np.cross(b3c, w) / s


def orthonormalize(m: Mat3) -> Mat3:
    """Closest rotation to m in Frobenius norm (polar factor)."""
    m = np.asarray(m, dtype=float)
    if np.linalg.det(m) <= 1e-12:
        raise SingularInput("determinant must be positive")
    return _kernels.polar_orthonormalize(m)
