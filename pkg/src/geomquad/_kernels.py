"""Hot numeric kernels for the controllers and the RK4 stepper.

Every function here is written in numba-compatible numpy and compiled with
``@njit`` by default.  Setting the environment variable ``GEOMQUAD_NUMBA=0``
skips compilation and runs the same functions as plain numpy, which is
useful for debugging and on platforms without a working numba.  Both
backends produce identical results up to floating-point nondeterminism of
the underlying BLAS (none is used in these 3x3 kernels, so traces are
byte-identical in practice).

Status codes returned by the control kernels:
    0  ok
    1  thrust-vector singularity (||A|| below threshold)
    2  degenerate heading projection with no usable history
    3  altitude-thrust singularity (|e3 . R e3| below threshold)
"""

from __future__ import annotations

import os

import numpy as np

USE_NUMBA = os.environ.get("GEOMQUAD_NUMBA", "1").lower() not in ("0", "false", "no")

if USE_NUMBA:
    from numba import njit as _njit

    def njit(func):
        return _njit(cache=True, fastmath=False)(func)
else:

    def njit(func):
        return func


OK = 0
ERR_THRUST_VECTOR = 1
ERR_DEGENERATE_PROJECTION = 2
ERR_ALTITUDE_SINGULARITY = 3

MODE_ATTITUDE = 0
MODE_POSITION = 1
MODE_VELOCITY = 2

THRUST_ALTITUDE = 0
THRUST_POSITION_HOLD = 1

# ||A|| threshold below which the computed-attitude construction is singular
A_NORM_MIN = 1e-6
# ||b3c x b1d|| threshold for the heading projection
PROJ_MIN = 1e-6
# |e3 . R e3| threshold for the altitude-thrust denominator
ALT_DENOM_MIN = 1e-3


@njit
def hat(v):
    out = np.zeros((3, 3))
    out[0, 1] = -v[2]
    out[0, 2] = v[1]
    out[1, 0] = v[2]
    out[1, 2] = -v[0]
    out[2, 0] = -v[1]
    out[2, 1] = v[0]
    return out


@njit
def vee_skew(m):
    # vee of the explicit skew part; callers check skewness where required
    return np.array(
        [
            0.5 * (m[2, 1] - m[1, 2]),
            0.5 * (m[0, 2] - m[2, 0]),
            0.5 * (m[1, 0] - m[0, 1]),
        ]
    )


@njit
def rodrigues(v):
    """exp: so(3) -> SO(3), series expansion below theta = 1e-4."""
    theta2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2]
    theta = np.sqrt(theta2)
    K = hat(v)
    if theta < 1e-4:
        a = 1.0 - theta2 / 6.0
        b = 0.5 - theta2 / 24.0
    else:
        a = np.sin(theta) / theta
        b = (1.0 - np.cos(theta)) / theta2
    return np.eye(3) + a * K + b * (K @ K)


@njit
def ortho_drift(r):
    """Frobenius norm of R^T R - I."""
    e = r.T @ r - np.eye(3)
    return np.sqrt(np.sum(e * e))


@njit
def polar_orthonormalize(r):
    """Nearest rotation in Frobenius norm (polar factor via SVD)."""
    u, s, vt = np.linalg.svd(r)
    d = np.linalg.det(u @ vt)
    c = np.eye(3)
    c[2, 2] = d
    return u @ c @ vt


@njit
def psi_value(r, rd):
    return 0.5 * np.trace(np.eye(3) - rd.T @ r)


@njit
def attitude_error(r, rd):
    return 0.5 * vee_skew(rd.T @ r - r.T @ rd)


@njit
def angular_velocity_error(omega, r, rd, omega_d):
    return omega - r.T @ (rd @ omega_d)


@njit
def state_derivative(x, v, r, omega, f, moment, m, g, inertia, inertia_inv):
    e3 = np.array([0.0, 0.0, 1.0])
    xdot = v.copy()
    vdot = g * e3 - (f / m) * (r @ e3)
    rdot = r @ hat(omega)
    omdot = inertia_inv @ (moment - np.cross(omega, inertia @ omega))
    return xdot, vdot, rdot, omdot


@njit
def attitude_mode_control(
    x,
    v,
    r,
    omega,
    rd,
    omega_d,
    domega_d,
    k_x,
    k_v,
    k_r,
    k_omega,
    m,
    g,
    inertia,
    thrust_code,
    thrust_params,
):
    """Moment law of the attitude mode plus the selected thrust policy.

    thrust_params: [x3d, dx3d, ddx3d] for altitude tracking, or the hold
    point x_c for position-hold thrust.
    """
    e3 = np.array([0.0, 0.0, 1.0])
    e_r = attitude_error(r, rd)
    e_om = omega - r.T @ (rd @ omega_d)
    moment = (
        -k_r * e_r
        - k_omega * e_om
        + np.cross(omega, inertia @ omega)
        - inertia @ (hat(omega) @ (r.T @ (rd @ omega_d)) - r.T @ (rd @ domega_d))
    )
    status = OK
    f = 0.0
    if thrust_code == THRUST_ALTITUDE:
        denom = r[2, 2]  # e3 . R e3
        if np.abs(denom) <= ALT_DENOM_MIN:
            status = ERR_ALTITUDE_SINGULARITY
        else:
            f = (
                k_x * (x[2] - thrust_params[0])
                + k_v * (v[2] - thrust_params[1])
                + m * g
                - m * thrust_params[2]
            ) / denom
    else:
        f = (k_x * (x - thrust_params) + k_v * v + m * g * e3) @ (r @ e3)
    return status, f, moment, e_r, e_om


@njit
def trajectory_mode_control(
    x,
    v,
    r,
    omega,
    cmd,
    b1d_derivs,
    k_x,
    k_v,
    k_r,
    k_omega,
    m,
    g,
    inertia,
    mode,
    prev_b1c,
    have_prev,
):
    """Position- or velocity-mode control with analytic Omega_c chain.

    cmd rows: [x_d, dx_d, ddx_d, d3x_d, d4x_d] for position mode; for
    velocity mode row 0 is unused and rows 1..4 hold v_d .. d3v_d.
    b1d_derivs rows: [b1d, db1d, ddb1d].

    Returns (status, f, M, R_c, Omega_c, dOmega_c, A, b1c, e_x, e_v,
    used_fallback).
    """
    e3 = np.array([0.0, 0.0, 1.0])
    re3 = r @ e3
    kx_eff = k_x
    if mode == MODE_VELOCITY:
        kx_eff = 0.0
        e_x = np.zeros(3)
    else:
        e_x = x - cmd[0]
    e_v = v - cmd[1]
    acc = cmd[2]
    jerk = cmd[3]
    snap = cmd[4]

    zero3 = np.zeros(3)
    zero33 = np.zeros((3, 3))

    a_vec = -kx_eff * e_x - k_v * e_v - m * g * e3 + m * acc
    a_norm = np.sqrt(a_vec @ a_vec)
    if a_norm <= A_NORM_MIN:
        return (
            ERR_THRUST_VECTOR,
            0.0,
            zero3,
            zero33,
            zero3,
            zero3,
            a_vec,
            zero3,
            e_x,
            e_v,
            0,
        )
    f = -(a_vec @ re3)

    # exact derivative chain: e_v from the translational dynamics, fdot
    # from differentiating f = -A . R e3
    edot_v = g * e3 - (f / m) * re3 - acc
    adot = -kx_eff * e_v - k_v * edot_v + m * jerk
    r_om_e3 = r @ np.cross(omega, e3)
    fdot = -(adot @ re3) - a_vec @ r_om_e3
    eddot_v = -(fdot / m) * re3 - (f / m) * r_om_e3 - jerk
    addot = -kx_eff * edot_v - k_v * eddot_v + m * snap

    # b3c = N/||N|| with N = -A, differentiated twice
    n_vec = -a_vec
    ndot_vec = -adot
    nddot_vec = -addot
    n = a_norm
    ndot = (n_vec @ ndot_vec) / n
    nddot = (ndot_vec @ ndot_vec + n_vec @ nddot_vec) / n - ndot * ndot / n
    b3c = n_vec / n
    db3c = ndot_vec / n - n_vec * (ndot / (n * n))
    ddb3c = (
        nddot_vec / n
        - 2.0 * ndot_vec * (ndot / (n * n))
        - n_vec * (nddot / (n * n))
        + 2.0 * n_vec * (ndot * ndot / (n * n * n))
    )

    b1d = b1d_derivs[0]
    db1d = b1d_derivs[1]
    ddb1d = b1d_derivs[2]
    used_fallback = 0
    w = np.cross(b3c, b1d)
    s = np.sqrt(w @ w)
    if s <= PROJ_MIN:
        if have_prev == 0:
            return (
                ERR_DEGENERATE_PROJECTION,
                f,
                zero3,
                zero33,
                zero3,
                zero3,
                a_vec,
                zero3,
                e_x,
                e_v,
                0,
            )
        # continuity fallback: freeze the heading target at the previous b1c
        used_fallback = 1
        b1d = prev_b1c
        db1d = zero3
        ddb1d = zero3
        w = np.cross(b3c, b1d)
        s = np.sqrt(w @ w)
        if s <= PROJ_MIN:
            return (
                ERR_DEGENERATE_PROJECTION,
                f,
                zero3,
                zero33,
                zero3,
                zero3,
                a_vec,
                zero3,
                e_x,
                e_v,
                1,
            )

    wdot = np.cross(db3c, b1d) + np.cross(b3c, db1d)
    wddot = (
        np.cross(ddb3c, b1d) + 2.0 * np.cross(db3c, db1d) + np.cross(b3c, ddb1d)
    )
    q = -np.cross(b3c, w)
    qdot = -(np.cross(db3c, w) + np.cross(b3c, wdot))
    qddot = -(
        np.cross(ddb3c, w) + 2.0 * np.cross(db3c, wdot) + np.cross(b3c, wddot)
    )
    sdot = (w @ wdot) / s
    sddot = (wdot @ wdot + w @ wddot) / s - sdot * sdot / s
    b1c = q / s
    db1c = qdot / s - q * (sdot / (s * s))
    ddb1c = (
        qddot / s
        - 2.0 * qdot * (sdot / (s * s))
        - q * (sddot / (s * s))
        + 2.0 * q * (sdot * sdot / (s * s * s))
    )

    b2c = np.cross(b3c, b1c)
    db2c = np.cross(db3c, b1c) + np.cross(b3c, db1c)
    ddb2c = np.cross(ddb3c, b1c) + 2.0 * np.cross(db3c, db1c) + np.cross(b3c, ddb1c)

    rc = np.empty((3, 3))
    rcdot = np.empty((3, 3))
    rcddot = np.empty((3, 3))
    for i in range(3):
        rc[i, 0] = b1c[i]
        rc[i, 1] = b2c[i]
        rc[i, 2] = b3c[i]
        rcdot[i, 0] = db1c[i]
        rcdot[i, 1] = db2c[i]
        rcdot[i, 2] = db3c[i]
        rcddot[i, 0] = ddb1c[i]
        rcddot[i, 1] = ddb2c[i]
        rcddot[i, 2] = ddb3c[i]

    omc = vee_skew(rc.T @ rcdot)
    hat_omc = hat(omc)
    domc = vee_skew(rc.T @ rcddot - hat_omc @ hat_omc)

    e_r = attitude_error(r, rc)
    e_om = omega - r.T @ (rc @ omc)
    moment = (
        -k_r * e_r
        - k_omega * e_om
        + np.cross(omega, inertia @ omega)
        - inertia @ (hat(omega) @ (r.T @ (rc @ omc)) - r.T @ (rc @ domc))
    )
    return (
        OK,
        f,
        moment,
        rc,
        omc,
        domc,
        a_vec,
        b1c,
        e_x,
        e_v,
        used_fallback,
    )


@njit
def control_eval(
    x,
    v,
    r,
    omega,
    mode,
    cmd,
    b1d_derivs,
    att_cmd,
    thrust_code,
    thrust_params,
    k_x,
    k_v,
    k_r,
    k_omega,
    m,
    g,
    inertia,
    prev_b1c,
    have_prev,
):
    """Dispatch one control evaluation for any flight mode.

    att_cmd is the 15-vector [R_d.flat, Omega_d, dOmega_d] (attitude mode
    only).  Returns the same tuple layout for every mode; in attitude mode
    R_c is R_d and the computed-attitude extras are zero.
    """
    if mode == MODE_ATTITUDE:
        rd = att_cmd[0:9].copy().reshape(3, 3)
        omega_d = att_cmd[9:12]
        domega_d = att_cmd[12:15]
        status, f, moment, e_r, e_om = attitude_mode_control(
            x,
            v,
            r,
            omega,
            rd,
            omega_d,
            domega_d,
            k_x,
            k_v,
            k_r,
            k_omega,
            m,
            g,
            inertia,
            thrust_code,
            thrust_params,
        )
        if thrust_code == THRUST_ALTITUDE:
            e_x = np.array([0.0, 0.0, x[2] - thrust_params[0]])
            e_v = np.array([0.0, 0.0, v[2] - thrust_params[1]])
        else:
            e_x = x - thrust_params
            e_v = v.copy()
        return (
            status,
            f,
            moment,
            rd,
            omega_d.copy(),
            domega_d.copy(),
            np.zeros(3),
            np.zeros(3),
            e_x,
            e_v,
            0,
        )
    return trajectory_mode_control(
        x,
        v,
        r,
        omega,
        cmd,
        b1d_derivs,
        k_x,
        k_v,
        k_r,
        k_omega,
        m,
        g,
        inertia,
        mode,
        prev_b1c,
        have_prev,
    )


@njit
def rk4_step(
    x,
    v,
    r,
    omega,
    dt,
    mode,
    cmd3,
    b1d3,
    att3,
    thrust_code,
    thrust_params3,
    k_x,
    k_v,
    k_r,
    k_omega,
    m,
    g,
    inertia,
    inertia_inv,
    prev_b1c,
    have_prev,
):
    """One classical RK4 step with control recomputed at every stage.

    cmd3/b1d3/att3/thrust_params3 carry the command samples at the three
    stage times (t, t + dt/2, t + dt) in their leading axis.

    Returns (status, x1, v1, r1, omega1, f0, M0, Rc0, Omc0, dOmc0, b1c0,
    e_x0, e_v0, fallback_count) where the 0-suffixed values come from the
    first stage (time t, pre-step state) for logging and memory update.
    """
    stage_cmd = np.array([0, 1, 1, 2])
    stage_coef = np.array([0.0, 0.5, 0.5, 1.0])
    weights = np.array([1.0, 2.0, 2.0, 1.0]) / 6.0

    kx_acc = np.zeros(3)
    kv_acc = np.zeros(3)
    kr_acc = np.zeros((3, 3))
    kom_acc = np.zeros(3)

    xd_prev = np.zeros(3)
    vd_prev = np.zeros(3)
    rd_prev = np.zeros((3, 3))
    omd_prev = np.zeros(3)

    f0 = 0.0
    m0 = np.zeros(3)
    rc0 = np.zeros((3, 3))
    omc0 = np.zeros(3)
    domc0 = np.zeros(3)
    b1c0 = np.zeros(3)
    ex0 = np.zeros(3)
    ev0 = np.zeros(3)
    fallback = 0

    for stage in range(4):
        c = stage_coef[stage]
        if stage == 0:
            xs = x
            vs = v
            rs = r
            oms = omega
        else:
            xs = x + dt * c * xd_prev
            vs = v + dt * c * vd_prev
            rs = r + dt * c * rd_prev
            oms = omega + dt * c * omd_prev
        ci = stage_cmd[stage]
        (
            status,
            f,
            moment,
            rc,
            omc,
            domc,
            _a,
            b1c,
            e_x,
            e_v,
            fb,
        ) = control_eval(
            xs,
            vs,
            rs,
            oms,
            mode,
            cmd3[ci],
            b1d3[ci],
            att3[ci],
            thrust_code,
            thrust_params3[ci],
            k_x,
            k_v,
            k_r,
            k_omega,
            m,
            g,
            inertia,
            prev_b1c,
            have_prev,
        )
        if status != OK:
            return (
                status,
                x,
                v,
                r,
                omega,
                f0,
                m0,
                rc0,
                omc0,
                domc0,
                b1c0,
                ex0,
                ev0,
                fallback,
            )
        fallback += fb
        if stage == 0:
            f0 = f
            m0 = moment
            rc0 = rc
            omc0 = omc
            domc0 = domc
            b1c0 = b1c
            ex0 = e_x
            ev0 = e_v
        xd_prev, vd_prev, rd_prev, omd_prev = state_derivative(
            xs, vs, rs, oms, f, moment, m, g, inertia, inertia_inv
        )
        kx_acc = kx_acc + weights[stage] * xd_prev
        kv_acc = kv_acc + weights[stage] * vd_prev
        kr_acc = kr_acc + weights[stage] * rd_prev
        kom_acc = kom_acc + weights[stage] * omd_prev

    x1 = x + dt * kx_acc
    v1 = v + dt * kv_acc
    r1 = r + dt * kr_acc
    om1 = omega + dt * kom_acc
    return (
        OK,
        x1,
        v1,
        r1,
        om1,
        f0,
        m0,
        rc0,
        omc0,
        domc0,
        b1c0,
        ex0,
        ev0,
        fallback,
    )
