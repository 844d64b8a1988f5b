import numpy as np
import pytest
from scipy.integrate import simpson

from cavitygates.params import InfeasiblePulseError, Pulse, SystemParams
from cavitygates.protocol_a import (asymptotic_infidelity_a, calibrate_Delta,
                                    design_from_shape, design_pulse_a,
                                    effective_drive_params,
                                    feasible_delta_interval, invert_to_alpha,
                                    invert_to_eta, optimal_delta_a,
                                    protocol_a_infidelity, solve_channel_a)

THETA = np.pi / 2


class TestDesign:
    def test_phase_integral_exact(self):
        d = design_pulse_a(THETA, 0.8, 40.0)
        t = np.linspace(0, 40.0, 40001)
        val = 0.8 * simpson(d.f(t) ** 2, x=t)
        assert abs(val - THETA) < 1e-9

    def test_theta_zero_is_silent(self):
        d = design_pulse_a(0.0, 0.8, 40.0)
        t = d.t_grid
        assert np.max(np.abs(d.f(t))) == 0.0
        assert np.max(np.abs(d.zeta(t))) == 0.0

    def test_feasibility_boundary(self):
        # for theta = pi/2 some delta exists iff T g >~ 8.27
        with pytest.raises(InfeasiblePulseError):
            feasible_delta_interval(THETA, 8.2)
        lo, hi = feasible_delta_interval(THETA, 8.35)
        assert 0 < lo < hi

    def test_short_pulse_infeasible_for_every_delta(self):
        for delta in np.geomspace(0.01, 50.0, 40):
            with pytest.raises(InfeasiblePulseError):
                design_pulse_a(THETA, delta, 5.0)

    def test_shape_scaling(self):
        # an arbitrary smooth bump scaled to the same enclosed area
        def bump(t):
            t = np.asarray(t)
            return np.sin(np.pi * t / 30.0) ** 4

        d = design_from_shape(bump, 0.7, 0.9, 30.0)
        t = np.linspace(0, 30.0, 20001)
        assert abs(0.9 * simpson(d.f(t) ** 2, x=t) - 0.7) < 1e-6


class TestInversions:
    def test_alpha_zero_for_zero_zeta(self):
        d = design_pulse_a(0.0, 0.8, 20.0)
        alpha, pulse = invert_to_alpha(d, 50.0)
        assert pulse.max_abs() == 0.0

    def test_forward_relation_round_trip(self):
        d = design_pulse_a(THETA, 0.9, 30.0)
        Delta = 37.0
        alpha, pulse = invert_to_alpha(d, Delta)
        t = np.linspace(0, 30.0, 2001)
        al = alpha(t)
        zeta_back = al / np.sqrt(4.0 * np.abs(al) ** 2 + Delta**2)
        assert np.max(np.abs(zeta_back - d.zeta(t))) < 1e-10

    def test_inversion_pole(self):
        # a design grazing |zeta| = g/2 cannot be inverted
        d = design_pulse_a(THETA, 0.8, 40.0)

        class Hot:
            duration = d.duration
            t_grid = d.t_grid

            def zeta(self, t):
                return 0.5 * (1.0 - 1e-12) * np.ones_like(np.asarray(t, float))

        with pytest.raises(InfeasiblePulseError):
            invert_to_alpha(Hot(), 10.0)

    def test_eta_round_trip_through_drive_ode(self):
        # forward-integrating alpha' = -eta - (i delta + kappa/2) alpha
        # with the inverted eta reproduces alpha
        delta, kappa, T = 0.9, 0.05, 30.0
        d = design_pulse_a(THETA, delta, T)
        Delta = 25.0
        alpha, alpha_pulse = invert_to_alpha(d, Delta)
        eta, _ = invert_to_eta(d, delta, kappa, Delta)
        p = 1j * delta + kappa / 2.0
        n = 60000
        h = T / n
        al = 0.0 + 0.0j
        t = 0.0
        for _ in range(n):
            k1 = -eta(t) - p * al
            k2 = -eta(t + h / 2) - p * (al + h / 2 * k1)
            k3 = -eta(t + h / 2) - p * (al + h / 2 * k2)
            k4 = -eta(t + h) - p * (al + h * k3)
            al += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            t += h
        assert abs(al - alpha(T)) < 1e-8

    def test_eta_round_trip_sampled_pulse(self):
        # central-difference inversion of a sampled alpha
        T, delta, kappa = 20.0, 0.6, 0.02
        t = np.linspace(0, T, 4001)
        alpha_vals = np.sin(np.pi * t / T) ** 2
        pulse = Pulse(t, alpha_vals.astype(complex))
        eta_pulse, _ = invert_to_eta(pulse, delta, kappa)
        p = 1j * delta + kappa / 2.0
        n = 40000
        h = T / n
        al = 0.0 + 0.0j
        tt = 0.0
        for _ in range(n):
            k1 = -eta_pulse(tt) - p * al
            k2 = -eta_pulse(tt + h / 2) - p * (al + h / 2 * k1)
            k3 = -eta_pulse(tt + h / 2) - p * (al + h / 2 * k2)
            k4 = -eta_pulse(tt + h) - p * (al + h * k3)
            al += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            tt += h
        assert abs(al - 0.0) < 1e-6  # alpha(T) = sin^2(pi) = 0

    def test_calibrate_delta_monotone_and_converged(self):
        d = design_pulse_a(THETA, 1.0, 40.0)
        params = SystemParams(n_qubits=2, kappa=0.03, delta=1.0)
        caps = [5.0, 15.0, 45.0]
        deltas = [calibrate_Delta(d, cap, params) for cap in caps]
        assert deltas[0] < deltas[1] < deltas[2]
        for cap, Delta in zip(caps, deltas):
            _, eta_pulse = invert_to_eta(d, 1.0, 0.03, Delta)
            assert abs(eta_pulse.max_abs() - cap) < 2e-3 * cap


class TestEffectiveParams:
    def test_undriven_limit(self):
        p = SystemParams(n_qubits=1, gamma=0.3, Delta=10.0)
        ep = effective_drive_params(0.0, p)
        assert ep.zeta == 0.0
        assert ep.gamma_1 == 0.0
        assert abs(ep.gamma_e - 0.3) < 1e-15
        assert ep.lambda_angle == 0.0
        assert ep.mu_angle == 0.0

    def test_strong_drive_limit(self):
        # the split approaches gamma/2 as gamma Delta / (4 g |alpha|)
        p = SystemParams(n_qubits=1, gamma=0.02, Delta=1.0)
        ep = effective_drive_params(1e4, p)
        assert abs(ep.gamma_1 - 0.01) < 1e-6
        assert abs(ep.gamma_e - 0.01) < 1e-6

    def test_dressed_splitting(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            alpha = rng.normal() + 1j * rng.normal()
            Delta = rng.uniform(0.5, 20.0)
            p = SystemParams(n_qubits=1, gamma=0.1, Delta=Delta)
            ep = effective_drive_params(alpha, p)
            assert abs((ep.eps_e - ep.eps_1)
                       - np.sqrt(Delta**2 + 4 * abs(alpha) ** 2)) < 1e-12
            assert abs(ep.gamma_1 + ep.gamma_e - 0.1) < 1e-14


class TestAnalyticChannel:
    def test_lossless_phases_and_closed_loop(self):
        params = SystemParams(n_qubits=3, delta=0.8)
        sol = solve_channel_a(design_pulse_a(THETA, 0.8, 40.0), params)
        n = np.arange(4, dtype=float)
        ideal = (n[:, None] ** 2 - n[None, :] ** 2) * THETA
        assert np.max(np.abs(sol.phi - ideal)) < 1e-8
        assert np.max(np.abs(sol.beta_final())) < 1e-9

    def test_n0_row_stays_dark(self):
        params = SystemParams(n_qubits=2, gamma=0.01, kappa=0.02, delta=0.7)
        sol = solve_channel_a(design_pulse_a(THETA, 0.7, 30.0), params)
        assert np.max(np.abs(sol.beta[0])) == 0.0

    def test_long_pulse_matches_first_order_formula(self):
        cooperativity = 1500.0
        for ratio in (0.1, 1.0, 10.0):
            kappa = 1.0 / np.sqrt(ratio * cooperativity)
            gamma = ratio * kappa
            ds = optimal_delta_a(2, gamma, kappa)
            params = SystemParams(n_qubits=2, gamma=gamma, kappa=kappa,
                                  delta=ds)
            sol = solve_channel_a(design_pulse_a(THETA, ds, 2000.0), params)
            w = np.array([1.0, 2.0, 1.0])
            lin = (w @ sol.phi.imag.diagonal()
                   + w @ sol.phi.imag @ w) / 20.0
            ref = asymptotic_infidelity_a(2, THETA, cooperativity)
            assert abs(lin - ref) / ref < 0.02

    def test_delta_tradeoff_stationary(self):
        # the trade-off formula is first order in the losses, so its
        # stationarity is checked on the first-order infidelity of the
        # long-pulse channel
        cooperativity, ratio = 1500.0, 1.0
        kappa = 1.0 / np.sqrt(ratio * cooperativity)
        gamma = ratio * kappa
        ds = optimal_delta_a(2, gamma, kappa)
        w = np.array([1.0, 2.0, 1.0])

        def infid(d):
            p = SystemParams(n_qubits=2, gamma=gamma, kappa=kappa, delta=d)
            s = solve_channel_a(design_pulse_a(THETA, d, 2000.0), p)
            return (w @ s.phi.imag.diagonal() + w @ s.phi.imag @ w) / 20.0

        f0 = infid(ds)
        slope = (infid(ds * 1.01) - infid(ds * 0.99)) / (0.02 * ds)
        assert abs(slope * ds / f0) < 0.005

    def test_short_pulse_approaches_asymptote(self):
        cooperativity, ratio = 1500.0, 1.0
        kappa = 1.0 / np.sqrt(ratio * cooperativity)
        gamma = ratio * kappa
        ds = optimal_delta_a(2, gamma, kappa)
        p = SystemParams(n_qubits=2, gamma=gamma, kappa=kappa, delta=ds)
        s = solve_channel_a(design_pulse_a(THETA, ds, 20.0), p)
        val = protocol_a_infidelity(s.channel, THETA)
        ref = asymptotic_infidelity_a(2, THETA, cooperativity)
        assert abs(val - ref) / ref < 0.30

    def test_shape_invariance_of_lossless_channel(self):
        # only the enclosed area matters: sin^2 versus a smoothed
        # trapezoid with equal theta gives the same channel
        params = SystemParams(n_qubits=2, delta=0.85)
        sol_a = solve_channel_a(design_pulse_a(THETA, 0.85, 40.0), params)

        def trapezoid(t):
            t = np.asarray(t, dtype=float)
            ramp = 10.0
            up = np.sin(np.pi * np.clip(t, 0, ramp) / (2 * ramp)) ** 2
            down = np.sin(np.pi * np.clip(40.0 - t, 0, ramp) / (2 * ramp)) ** 2
            return np.where(t < ramp, up, np.where(t > 30.0, down, 1.0))

        d2 = design_from_shape(trapezoid, THETA, 0.85, 40.0,
                               grid_points=40001)
        sol_b = solve_channel_a(d2, params, n_points=100001)
        assert np.max(np.abs(sol_a.phi - sol_b.phi)) < 1e-8


class TestAsymptotics:
    def test_coefficient(self):
        val = asymptotic_infidelity_a(2, THETA, 1.0)
        assert abs(val - np.pi / np.sqrt(2.5)) < 1e-14

    def test_reference_point(self):
        assert abs(asymptotic_infidelity_a(2, THETA, 1500.0) - 0.051) < 5e-4

    def test_zero_theta(self):
        assert asymptotic_infidelity_a(2, 0.0, 1500.0) == 0.0

    def test_general_tradeoff_form(self):
        val = asymptotic_infidelity_a(2, THETA, delta=0.5, gamma=0.01,
                                      kappa=0.02)
        expect = (0.02 / (4 * 1.25 * 0.5) + 0.01 * 0.5 / 2) * 2 * THETA
        assert abs(val - expect) < 1e-14
