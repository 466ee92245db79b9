"""Runtime stability monitoring: Lyapunov values, gain certificates,
region-of-attraction tests, and exponential-envelope fits.

Everything here is an executable check over a simulation trace, not a
proof.  The certificate conditions are sufficient and conservative, so
violations are recorded in the report rather than aborting a run.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .controllers import AttitudeCommand, Gains
from .dynamics import E3, QuadParams, VehicleState
from .errors import FitFailed, InfeasibleInputs
from .so3 import attitude_error, psi

Mat2 = NDArray[np.float64]

#: relative slack used when flagging increases of a nonincreasing series
JITTER_REL = 1e-9


def eig2x2_sym(m: Mat2) -> tuple[float, float]:
    """Closed-form (min, max) eigenvalues of a symmetric 2x2 matrix."""
    a, b, d = m[0, 0], 0.5 * (m[0, 1] + m[1, 0]), m[1, 1]
    half_tr = 0.5 * (a + d)
    disc = np.hypot(0.5 * (a - d), b)
    return half_tr - disc, half_tr + disc


def _pd(m: Mat2) -> bool:
    return eig2x2_sym(m)[0] > 0.0


@dataclass(frozen=True)
class RoaCheck:
    """Region-of-attraction test for the attitude subsystem."""

    inside: bool
    psi0: float
    psi_margin: float  # 2 - psi0
    e_omega_margin: float  # bound - ||e_Omega(0)||^2


def check_attitude_roa(
    s0: VehicleState, cmd0: AttitudeCommand, gains: Gains, p: QuadParams
) -> RoaCheck:
    """Initial-condition test: psi(0) < 2 and the angular-rate bound."""
    psi0 = psi(s0.R, cmd0.R_d)
    e_om = s0.omega - s0.R.T @ (cmd0.R_d @ cmd0.Omega_d)
    lam_max_j = float(np.linalg.eigvalsh(p.J).max())
    bound = (2.0 / lam_max_j) * gains.k_R * (2.0 - psi0)
    e_om_sq = float(e_om @ e_om)
    return RoaCheck(
        inside=bool(psi0 < 2.0 and e_om_sq < bound),
        psi0=float(psi0),
        psi_margin=float(2.0 - psi0),
        e_omega_margin=float(bound - e_om_sq),
    )


@dataclass(frozen=True)
class GainCertificate:
    """Gain-condition matrices for a chosen (c1, c2) pair.

    ``feasible`` requires positive definiteness of W1, W2 and the M
    matrices together with lambda_m(W2) > 4 ||W12||^2 / lambda_m(W1);
    ``margin`` is the amount by which that last inequality holds.
    """

    c1: float
    c2: float
    psi1: float
    e_x_max: float
    B: float
    alpha: float
    W1: Mat2
    W12: Mat2
    W2: Mat2
    M11: Mat2
    M12: Mat2
    M21: Mat2
    M22: Mat2
    M22prime: Mat2
    feasible: bool
    margin: float


def c1_bound(gains: Gains, p: QuadParams, alpha: float) -> float:
    kx, kv, m = gains.k_x, gains.k_v, p.m
    return min(
        kv * (1.0 - alpha),
        4.0 * m * kx * kv * (1.0 - alpha) ** 2
        / (kv**2 * (1.0 + alpha) ** 2 + 4.0 * m * kx * (1.0 - alpha)),
        np.sqrt(kx * m),
    )


def c2_bound(gains: Gains, p: QuadParams) -> float:
    kr, kw = gains.k_R, gains.k_Omega
    lam = np.linalg.eigvalsh(p.J)
    lm, lM = float(lam.min()), float(lam.max())
    return min(
        kw,
        4.0 * kw * kr * lm**2 / (kw**2 * lM + 4.0 * kr * lm**2),
        np.sqrt(kr * lm),
    )


def certificate_matrices(
    gains: Gains,
    p: QuadParams,
    c1: float,
    c2: float,
    psi1: float,
    e_x_max: float,
    B: float,
    psi2: float = 2.0,
) -> dict[str, Mat2]:
    kx, kv, kr, kw = gains.k_x, gains.k_v, gains.k_R, gains.k_Omega
    m = p.m
    lam = np.linalg.eigvalsh(p.J)
    lm, lM = float(lam.min()), float(lam.max())
    alpha = np.sqrt(psi1 * (2.0 - psi1))
    w1 = np.array(
        [
            [c1 * kx / m * (1.0 - alpha), -c1 * kv / (2.0 * m) * (1.0 + alpha)],
            [-c1 * kv / (2.0 * m) * (1.0 + alpha), kv * (1.0 - alpha) - c1],
        ]
    )
    w12 = np.array([[c1 / m * B, 0.0], [B + kx * e_x_max, 0.0]])
    w2 = np.array(
        [
            [c2 * kr / lM, -c2 * kw / (2.0 * lm)],
            [-c2 * kw / (2.0 * lm), kw - c2],
        ]
    )
    m11 = 0.5 * np.array([[kx, -c1], [-c1, m]])
    m12 = 0.5 * np.array([[kx, c1], [c1, m]])
    m21 = 0.5 * np.array([[kr, -c2], [-c2, lm]])
    m22 = 0.5 * np.array([[2.0 * kr / (2.0 - min(psi2, 2.0 - 1e-12)), c2], [c2, lM]])
    m22p = 0.5 * np.array([[2.0 * kr / (2.0 - psi1), c2], [c2, lM]])
    return {
        "W1": w1,
        "W12": w12,
        "W2": w2,
        "M11": m11,
        "M12": m12,
        "M21": m21,
        "M22": m22,
        "M22prime": m22p,
    }


def search_certificate(
    gains: Gains, p: QuadParams, psi1: float, e_x_max: float, B: float
) -> GainCertificate:
    """Log-grid search over admissible (c1, c2) maximizing the coupling margin.

    The returned pair maximizes lambda_m(W2) - 4 ||W12||^2 / lambda_m(W1)
    over a 100x100 logarithmic grid inside the closed-form upper bounds;
    ``feasible`` is True iff the maximized margin is positive with all
    matrices positive definite.
    """
    if psi1 <= 0.0 or psi1 >= 1.0:
        raise InfeasibleInputs("psi1 must lie in (0, 1)")
    if e_x_max <= 0.0:
        raise InfeasibleInputs("e_x_max must be positive")
    alpha = float(np.sqrt(psi1 * (2.0 - psi1)))
    b1 = c1_bound(gains, p, alpha)
    b2 = c2_bound(gains, p)
    c1_grid = np.geomspace(b1 * 1e-4, b1 * (1.0 - 1e-9), 100)
    c2_grid = np.geomspace(b2 * 1e-4, b2 * (1.0 - 1e-9), 100)
    # the margin separates: W2 depends only on c2, W1/W12 only on c1
    best = None
    lam_w2 = np.empty(100)
    couplings = np.empty(100)
    for j, c2 in enumerate(c2_grid):
        w2 = certificate_matrices(gains, p, c1_grid[0], c2, psi1, e_x_max, B)["W2"]
        lam_w2[j] = eig2x2_sym(w2)[0]
    for i, c1 in enumerate(c1_grid):
        mats = certificate_matrices(gains, p, c1, c2_grid[0], psi1, e_x_max, B)
        lam_w1 = eig2x2_sym(mats["W1"])[0]
        if lam_w1 <= 0.0:
            couplings[i] = np.inf
            continue
        norm_w12 = float(np.linalg.norm(mats["W12"], 2))
        couplings[i] = 4.0 * norm_w12**2 / lam_w1
    valid2 = lam_w2 > 0.0
    if np.any(valid2) and np.any(np.isfinite(couplings)):
        i = int(np.argmin(couplings))
        j = int(np.flatnonzero(valid2)[np.argmax(lam_w2[valid2])])
        best = (float(lam_w2[j] - couplings[i]), float(c1_grid[i]), float(c2_grid[j]))
    if best is None:
        # no grid point kept W1 and W2 definite; report the midpoint pair
        best = (-np.inf, float(np.sqrt(b1 * 1e-4 * b1)), float(np.sqrt(b2 * 1e-4 * b2)))
    margin, c1, c2 = best
    mats = certificate_matrices(gains, p, c1, c2, psi1, e_x_max, B)
    pd_ok = all(
        _pd(mats[k]) for k in ("W1", "W2", "M11", "M12", "M21", "M22prime")
    )
    return GainCertificate(
        c1=c1,
        c2=c2,
        psi1=psi1,
        e_x_max=e_x_max,
        B=B,
        alpha=alpha,
        feasible=bool(pd_ok and margin > 0.0),
        margin=float(margin),
        **mats,
    )


def fit_exponential_envelope(
    t: NDArray[np.float64], psi_series: NDArray[np.float64]
) -> tuple[float, float]:
    """Fit psi(t) <= alpha * exp(-beta * t) over the given window.

    beta comes from a least-squares line fit of log(psi); alpha is then
    inflated to the smallest value making the bound hold pointwise, so an
    exact sampled exponential is recovered exactly.
    """
    t = np.asarray(t, dtype=float)
    psi_series = np.asarray(psi_series, dtype=float)
    if len(psi_series) < 3:
        raise FitFailed("series too short for an envelope fit")
    if np.any(psi_series <= 0.0):
        raise FitFailed("series must be positive")
    slope, intercept = np.polyfit(t, np.log(psi_series), 1)
    beta = -float(slope)
    alpha = float(np.max(psi_series * np.exp(beta * t)))
    bound = np.minimum(2.0, alpha * np.exp(-beta * t)) * (1.0 + 1e-6)
    assert np.all(psi_series <= bound), "envelope must hold pointwise"
    return alpha, beta


def default_psi1(psi0: float) -> float:
    """Certificate threshold: two-phase value 0.9 when starting outside."""
    if psi0 >= 1.0:
        return 0.9
    return min(max(psi0 + 0.05, 0.9), 1.0 - 1e-9)


def default_e_x_max(e_x0: NDArray[np.float64]) -> float:
    return 2.0 * float(np.linalg.norm(e_x0)) + 1.0


def compute_B(mission) -> float:
    """Bound on the commanded-acceleration vector -m*g*e3 + m*xdd_d.

    Sampled over the non-attitude segments at 1 kHz with a 1% margin.
    """
    p = mission.params
    best = p.m * p.g  # hover command magnitude, floor for pure attitude missions
    for seg in mission.segments:
        if seg.mode == "attitude":
            continue
        ts = np.arange(seg.t_start, seg.t_end, 1e-3)
        for t in ts:
            rows, _ = seg.track.sample(t)
            a_cmd = -p.m * p.g * E3 + p.m * rows[2]
            best = max(best, float(np.linalg.norm(a_cmd)))
    return 1.01 * best


@dataclass
class MonitorReport:
    """Per-run stability summary: Lyapunov series and flagged conditions."""

    t: NDArray[np.float64]
    mode: list[str]
    psi: NDArray[np.float64]
    V1: NDArray[np.float64]
    V2: NDArray[np.float64]
    V2prime: NDArray[np.float64]
    V: NDArray[np.float64]
    certificate: GainCertificate | None
    roa: RoaCheck | None
    t_star: float | None
    psi2: float
    psi2_clamped: bool
    envelope: tuple[float, float] | None
    envelope_note: str | None
    violations: list[tuple[float, str]] = field(default_factory=list)


def _flag_increases(ts, series, mask, label, violations):
    if not np.any(mask):
        return
    tol = JITTER_REL * max(float(np.max(series[mask])), 1.0)
    idx = np.flatnonzero(mask)
    for a, b in zip(idx, idx[1:]):
        if b != a + 1:
            continue
        if series[b] > series[a] + tol:
            violations.append((float(ts[b]), f"{label} increased"))


def lyapunov_series(
    records,
    certificate: GainCertificate,
    gains: Gains,
    p: QuadParams,
) -> MonitorReport:
    """Evaluate the Lyapunov candidates along a trace and flag violations.

    Uses the two-phase protocol when psi starts at or above 1: the full
    candidate V is only monitored after psi first drops below the
    certificate's psi1 threshold (time t*).
    """
    if not records:
        raise FitFailed("trace is empty")
    ts = np.array([r.t for r in records])
    modes = [r.mode for r in records]
    psis = np.array([r.psi for r in records])
    e_r = np.array([r.e_R for r in records])
    e_om = np.array([r.e_Omega for r in records])
    e_x = np.array([r.e_x for r in records])
    e_v = np.array([r.e_v for r in records])
    c1, c2 = certificate.c1, certificate.c2
    v2p = 0.5 * np.einsum("ij,jk,ik->i", e_om, p.J, e_om) + gains.k_R * psis
    v2 = v2p + c2 * np.einsum("ij,ij->i", e_r, e_om)
    v1 = (
        0.5 * gains.k_x * np.einsum("ij,ij->i", e_x, e_x)
        + 0.5 * p.m * np.einsum("ij,ij->i", e_v, e_v)
        + c1 * np.einsum("ij,ij->i", e_x, e_v)
    )
    v = v1 + v2

    if psis[0] >= 1.0:
        below = np.flatnonzero(psis < certificate.psi1)
        t_star = float(ts[below[0]]) if len(below) else None
    else:
        t_star = float(ts[0])

    violations: list[tuple[float, str]] = []
    att_mask = np.array([m == "attitude" for m in modes])
    _flag_increases(ts, v2p, att_mask, "V2' (attitude mode)", violations)
    if t_star is not None and certificate.feasible:
        pos_mask = np.array([m != "attitude" for m in modes]) & (ts >= t_star)
        _flag_increases(ts, v, pos_mask, "V (position mode, post-t*)", violations)
    pre_star = ts < (t_star if t_star is not None else np.inf)
    if np.any(~np.isfinite(e_x[pre_star])) or np.any(~np.isfinite(e_v[pre_star])):
        violations.append((float(ts[0]), "non-finite translation errors pre-t*"))

    psi2_raw = float(v2p[0] / gains.k_R)
    psi2 = min(psi2_raw, 2.0)

    envelope = None
    note = None
    if t_star is not None:
        window = ts >= t_star
        try:
            envelope = fit_exponential_envelope(ts[window], psis[window])
            if envelope[1] <= 1e-12:
                note = "non-decaying (beta ~ 0)"
        except FitFailed as exc:
            note = str(exc)
    else:
        note = "psi never dropped below psi1; no envelope window"

    return MonitorReport(
        t=ts,
        mode=modes,
        psi=psis,
        V1=v1,
        V2=v2,
        V2prime=v2p,
        V=v,
        certificate=certificate,
        roa=None,
        t_star=t_star,
        psi2=psi2,
        psi2_clamped=psi2_raw > 2.0,
        envelope=envelope,
        envelope_note=note,
        violations=violations,
    )


def analyze(records, mission) -> MonitorReport:
    """Full monitor pass for a finished run: certificate search + series."""
    gains, p = mission.gains, mission.params
    first = records[0]
    psi0 = float(first.psi)
    psi1 = default_psi1(psi0)
    e_x_max = default_e_x_max(first.e_x)
    cert = search_certificate(gains, p, psi1, e_x_max, compute_B(mission))
    report = lyapunov_series(records, cert, gains, p)
    cmd0 = AttitudeCommand(
        R_d=first.R_c, Omega_d=first.Omega_c, dOmega_d=first.dOmega_c
    )
    s0 = VehicleState(x=first.x, v=first.v, R=first.R, omega=first.omega)
    report.roa = check_attitude_roa(s0, cmd0, gains, p)
    return report


def report_to_text(report: MonitorReport, extra: dict | None = None) -> str:
    """Structured-text serialization written next to the CSV trace."""
    lines = ["[monitor-report]"]
    if extra:
        for k, v in extra.items():
            lines.append(f"{k} = {v}")
    lines.append(f"samples = {len(report.t)}")
    if len(report.t):
        lines.append(f"t_final = {report.t[-1]:.6f}")
        lines.append(f"psi_initial = {report.psi[0]:.6f}")
        lines.append(f"psi_final = {report.psi[-1]:.6e}")
    seg_modes = [m for m, prev in zip(report.mode, [None] + report.mode[:-1]) if m != prev]
    lines.append(f"segments = {len(seg_modes)}")
    lines.append(f"segment_modes = {','.join(seg_modes)}")
    lines.append(f"t_star = {report.t_star}")
    lines.append(f"psi2 = {report.psi2:.6f}{' (clamped to 2)' if report.psi2_clamped else ''}")
    if report.roa is not None:
        lines.append(f"roa_inside = {report.roa.inside}")
        lines.append(f"roa_psi_margin = {report.roa.psi_margin:.6f}")
        lines.append(f"roa_e_omega_margin = {report.roa.e_omega_margin:.6f}")
    cert = report.certificate
    if cert is not None:
        lines.append(f"certificate_feasible = {cert.feasible}")
        lines.append(f"certificate_c1 = {cert.c1:.6e}")
        lines.append(f"certificate_c2 = {cert.c2:.6e}")
        lines.append(f"certificate_margin = {cert.margin:.6e}")
        lines.append(f"certificate_psi1 = {cert.psi1}")
        lines.append(f"certificate_B = {cert.B:.6f}")
    if report.envelope is not None:
        lines.append(f"envelope_alpha = {report.envelope[0]:.6e}")
        lines.append(f"envelope_beta = {report.envelope[1]:.6e}")
    if report.envelope_note:
        lines.append(f"envelope_note = {report.envelope_note}")
    lines.append(f"violations = {len(report.violations)}")
    for t, what in report.violations:
        lines.append(f"violation @ t={t:.3f}: {what}")
    return "\n".join(lines) + "\n"
