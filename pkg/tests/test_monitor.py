"""Stability-monitor tests: certificates, envelopes, trace invariants."""

import numpy as np
import pytest

from conftest import random_rotation
from geomquad import SimConfig, build_case1
from geomquad.controllers import AttitudeCommand, Gains
from geomquad.dynamics import QuadParams, VehicleState
from geomquad.errors import FitFailed, InfeasibleInputs
from geomquad.mission import (
    AltitudeTracking,
    FlightSegment,
    Mission,
    SpinAttitudeTrack,
    default_gains,
    default_params,
)
from geomquad.monitor import (
    check_attitude_roa,
    compute_B,
    default_psi1,
    eig2x2_sym,
    fit_exponential_envelope,
    lyapunov_series,
    search_certificate,
)
from geomquad.sim import run
from geomquad.so3 import exp_so3


def feasible_setup():
    """Low-gravity vehicle whose gain certificate is actually feasible."""
    p = QuadParams(m=1.0, J=0.5 * np.eye(3), d=0.3, c_tau_f=0.01, g=0.1)
    gains = Gains(k_x=1.0, k_v=2.0, k_R=5.0, k_Omega=2.0)
    psi1 = 0.05
    e_x_max = 0.05
    b_const = 1.01 * p.m * p.g
    return p, gains, psi1, e_x_max, b_const


class TestEig2x2:
    def test_against_lapack(self):
        rng = np.random.default_rng(61)
        for _ in range(1000):
            m = rng.normal(size=(2, 2))
            m = 0.5 * (m + m.T)
            lo, hi = eig2x2_sym(m)
            ref = np.linalg.eigvalsh(m)
            assert abs(lo - ref[0]) < 1e-12
            assert abs(hi - ref[1]) < 1e-12


class TestRoa:
    def setup_method(self):
        self.p = default_params()
        self.gains = default_gains()

    def test_rest_at_target(self):
        rng = np.random.default_rng(62)
        rd = random_rotation(rng)
        s = VehicleState(np.zeros(3), np.zeros(3), rd, np.zeros(3))
        cmd = AttitudeCommand(R_d=rd, Omega_d=np.zeros(3), dOmega_d=np.zeros(3))
        chk = check_attitude_roa(s, cmd, self.gains, self.p)
        assert chk.inside
        assert chk.psi_margin == pytest.approx(2.0)

    def test_case1_initial_state(self, case1_result):
        assert case1_result.report.roa.inside
        assert case1_result.report.roa.psi0 == pytest.approx(1.995, abs=5e-3)

    def test_antipodal_excluded(self):
        s = VehicleState(
            np.zeros(3), np.zeros(3), np.diag([1.0, -1.0, -1.0]), np.zeros(3)
        )
        cmd = AttitudeCommand(
            R_d=np.eye(3), Omega_d=np.zeros(3), dOmega_d=np.zeros(3)
        )
        assert not check_attitude_roa(s, cmd, self.gains, self.p).inside


class TestCertificate:
    def test_psi1_validation(self):
        p, gains = default_params(), default_gains()
        with pytest.raises(InfeasibleInputs):
            search_certificate(gains, p, psi1=0.0, e_x_max=1.0, B=40.0)
        with pytest.raises(InfeasibleInputs):
            search_certificate(gains, p, psi1=0.9, e_x_max=-1.0, B=40.0)

    def test_case1_gains_regression(self, case1_result):
        # frozen grid-search result for the stock vehicle; the coupling term
        # is dominated by B ~ m*g, so the certificate is not feasible here
        cert = case1_result.report.certificate
        assert not cert.feasible
        assert cert.psi1 == 0.9
        assert cert.c1 == pytest.approx(1.628463011493e-4, rel=1e-9)
        assert cert.c2 == pytest.approx(5.734782484054e-2, rel=1e-9)

    def test_c2_below_closed_form_bound(self):
        p, gains = default_params(), default_gains()
        cert = search_certificate(gains, p, psi1=0.9, e_x_max=1.0, B=43.0)
        lam = np.linalg.eigvalsh(p.J)
        lm, l_max = lam[0], lam[-1]
        bound = min(
            gains.k_Omega,
            4 * gains.k_Omega * gains.k_R * lm**2
            / (gains.k_Omega**2 * l_max + 4 * gains.k_R * lm**2),
            np.sqrt(gains.k_R * lm),
        )
        assert cert.c2 < bound

    def test_vanishing_kr_infeasible(self):
        p = default_params()
        gains = Gains(k_x=69.44, k_v=24.304, k_R=1e-9, k_Omega=2.54)
        cert = search_certificate(gains, p, psi1=0.9, e_x_max=1.0, B=43.0)
        assert not cert.feasible

    def test_feasible_configuration_exists(self):
        p, gains, psi1, e_x_max, b_const = feasible_setup()
        cert = search_certificate(gains, p, psi1, e_x_max, b_const)
        assert cert.feasible
        assert cert.margin > 0.0
        assert eig2x2_sym(cert.W1)[0] > 0.0
        assert eig2x2_sym(cert.W2)[0] > 0.0

    def test_sandwich_bounds_pointwise(self):
        # M11/M21 lower and M12/M22' upper quadratic bounds on V whenever
        # the attitude error stays under the psi1 threshold
        p, gains, psi1, e_x_max, b_const = feasible_setup()
        cert = search_certificate(gains, p, psi1, e_x_max, b_const)
        rng = np.random.default_rng(63)
        checked = 0
        while checked < 300:
            angle = rng.uniform(0.0, 0.31)
            axis = rng.normal(size=3)
            axis /= np.linalg.norm(axis)
            r = exp_so3(axis * angle)
            psi_val = 1.0 - np.cos(angle)
            if psi_val > psi1:
                continue
            from geomquad.so3 import attitude_error

            e_r = attitude_error(r, np.eye(3))
            e_x = rng.normal(scale=0.3, size=3)
            e_v = rng.normal(scale=0.3, size=3)
            e_om = rng.normal(scale=0.3, size=3)
            v = (
                0.5 * gains.k_x * e_x @ e_x
                + 0.5 * p.m * e_v @ e_v
                + cert.c1 * e_x @ e_v
                + 0.5 * e_om @ (p.J @ e_om)
                + gains.k_R * psi_val
                + cert.c2 * e_r @ e_om
            )
            z1 = np.array([np.linalg.norm(e_x), np.linalg.norm(e_v)])
            z2 = np.array([np.linalg.norm(e_r), np.linalg.norm(e_om)])
            lower = z1 @ cert.M11 @ z1 + z2 @ cert.M21 @ z2
            upper = z1 @ cert.M12 @ z1 + z2 @ cert.M22prime @ z2
            assert lower <= v + 1e-12
            assert v <= upper + 1e-12
            checked += 1


class TestEnvelopeFit:
    def test_recovers_exact_exponential(self):
        t = np.linspace(0.0, 5.0, 200)
        alpha, beta = 1.7, 0.9
        a, b = fit_exponential_envelope(t, alpha * np.exp(-beta * t))
        assert a == pytest.approx(alpha, rel=1e-6)
        assert b == pytest.approx(beta, rel=1e-6)

    def test_constant_series_flagged(self):
        t = np.linspace(0.0, 5.0, 50)
        a, b = fit_exponential_envelope(t, np.full(50, 2.0))
        assert abs(b) < 1e-12
        assert a == pytest.approx(2.0)

    def test_too_short(self):
        with pytest.raises(FitFailed):
            fit_exponential_envelope(np.array([0.0, 1.0]), np.array([1.0, 0.5]))

    def test_non_positive(self):
        t = np.linspace(0.0, 1.0, 10)
        with pytest.raises(FitFailed):
            fit_exponential_envelope(t, np.linspace(1.0, -0.1, 10))

    def test_case1_decay_confirmed(self, case1_result):
        envelope = case1_result.report.envelope
        assert envelope is not None
        assert envelope[1] > 0.0


class TestDefaults:
    def test_psi1_two_phase(self):
        assert default_psi1(1.9995) == 0.9
        assert default_psi1(0.2) == 0.9
        assert default_psi1(0.92) == pytest.approx(0.97)
        assert default_psi1(0.999) < 1.0

    def test_b_constant_case1(self):
        assert compute_B(build_case1()) == pytest.approx(1.01 * 4.34 * 9.81, rel=1e-6)


def gentle_attitude_result():
    """Small-error attitude maneuver logged at full rate for FD checks."""
    p = default_params()
    seg = FlightSegment(
        0.0,
        0.5,
        SpinAttitudeTrack(axis=np.array([0.0, 0.0, 1.0]), rate=0.5),
        thrust=AltitudeTracking(x3d0=0.0),
    )
    r0 = exp_so3(np.array([0.12, -0.08, 0.05]))
    mis = Mission(
        segments=(seg,),
        initial_state=VehicleState(np.zeros(3), np.zeros(3), r0, np.zeros(3)),
        params=p,
        gains=default_gains(p.m),
    )
    return run(mis, SimConfig(dt=1e-4, duration=0.5, log_decimation=1))


@pytest.fixture(scope="module")
def gentle():
    return gentle_attitude_result()


class TestTraceInvariants:

    def test_psi_rate_identity(self, gentle):
        # d(psi)/dt = e_R . e_Omega along attitude-mode traces
        recs = gentle.records
        dt = recs[1].t - recs[0].t
        psis = np.array([r.psi for r in recs])
        dot = np.array([r.e_R @ r.e_Omega for r in recs])
        fd = (psis[2:] - psis[:-2]) / (2 * dt)
        assert np.abs(fd - dot[1:-1]).max() < 1e-5

    def test_attitude_error_rate_bound(self, gentle):
        # ||d(e_R)/dt|| <= ||e_Omega||
        recs = gentle.records
        dt = recs[1].t - recs[0].t
        e_r = np.array([r.e_R for r in recs])
        e_om = np.array([r.e_Omega for r in recs])
        fd = (e_r[2:] - e_r[:-2]) / (2 * dt)
        norms = np.linalg.norm(fd, axis=1)
        bound = np.linalg.norm(e_om[1:-1], axis=1)
        assert np.all(norms <= bound + 1e-6)

    def test_v2prime_nonincreasing_attitude_mode(self, gentle):
        rep = gentle.report
        tol = 1e-9 * rep.V2prime.max()
        assert np.all(np.diff(rep.V2prime) <= tol)
        assert not rep.violations

    def test_appendix_sandwich_v2prime(self, gentle):
        rep = gentle.report
        k_r = default_gains().k_R
        assert np.all(k_r * rep.psi <= rep.V2prime * (1 + 1e-9) + 1e-12)
        assert np.all(rep.V2prime <= rep.V2prime[0] * (1 + 1e-9))


class TestLyapunovSeries:
    def test_perfect_tracking_all_zero(self):
        from geomquad.sim import TraceRecord

        p, gains, psi1, e_x_max, b_const = feasible_setup()
        cert = search_certificate(gains, p, psi1, e_x_max, b_const)
        z = np.zeros(3)
        recs = [
            TraceRecord(
                t=0.1 * k, x=z, v=z, R=np.eye(3), omega=z, f=p.m * p.g,
                M=z, rotor_thrusts=np.full(4, p.m * p.g / 4), mode="position",
                psi=0.0, e_R=z, e_Omega=z, e_x=z, e_v=z,
                R_c=np.eye(3), Omega_c=z, dOmega_c=z,
            )
            for k in range(10)
        ]
        rep = lyapunov_series(recs, cert, gains, p)
        assert np.abs(rep.V).max() == 0.0
        assert np.abs(rep.V2prime).max() == 0.0
        assert not rep.violations

    def test_two_phase_t_star(self, case1_result):
        rep = case1_result.report
        assert rep.t_star is not None
        assert rep.psi[rep.t < rep.t_star].min() >= rep.certificate.psi1
        first = np.flatnonzero(rep.psi < rep.certificate.psi1)[0]
        assert rep.t[first] == pytest.approx(rep.t_star)

    def test_psi2_clamped_to_two(self):
        rep_psi2 = build_case1()
        # V2'(0)/k_R slightly above psi(0) because of the feedforward kick
        res = run(rep_psi2, SimConfig(duration=0.1))
        assert res.report.psi2 <= 2.0
