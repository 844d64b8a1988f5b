import numpy as np
import pytest

from cavitygates.hilbert import coherent_state, destroy
from cavitygates.lindblad import StepOptions, evolve_master_equation
from cavitygates.params import (ConvergenceError, DensityOperator,
                                FockCutoffError, SystemParams)


def cavity_only_state(vec, n_max):
    rho = np.outer(vec, vec.conj())
    return DensityOperator(rho, "lab-frame", 0, n_max, 3)


class TestIntegrator:
    def test_no_dynamics(self):
        rho0 = cavity_only_state(coherent_state(0.5, 10), 10)
        out = evolve_master_equation(lambda t: np.zeros((11, 11), complex),
                                     0.0, rho0, 3.0)
        assert np.max(np.abs(out.matrix - rho0.matrix)) < 1e-12

    def test_damped_coherent_state(self):
        # H = delta a+a with kappa > 0: |beta> stays coherent with
        # beta(t) = beta0 e^{-(i delta + kappa/2) t}
        delta, kappa, T = 0.8, 0.3, 2.5
        n_max = 18
        beta0 = 1.1 - 0.4j
        a = destroy(n_max)
        h = delta * a.conj().T @ a
        rho0 = cavity_only_state(coherent_state(beta0, n_max), n_max)
        out = evolve_master_equation(lambda t: h, kappa, rho0, T,
                                     StepOptions(h0=0.02, tol=1e-9))
        beta_t = beta0 * np.exp(-(1j * delta + kappa / 2.0) * T)
        expected = np.outer(coherent_state(beta_t, n_max),
                            coherent_state(beta_t, n_max).conj())
        assert np.max(np.abs(out.matrix - expected)) < 1e-8

    def test_rabi_oscillation(self):
        # drive |1> <-> |e> of one qubit at strength omega: P_e = sin^2(w t)
        omega, T = 0.6, 4.0
        h_q = np.zeros((3, 3), complex)
        h_q[1, 2] = omega
        h_q[2, 1] = omega
        h = np.kron(np.eye(2, dtype=complex), h_q)  # n_max = 1 spectator cavity
        psi = np.zeros(6, complex)
        psi[1] = 1.0  # zero photons, qubit |1>
        rho0 = DensityOperator(np.outer(psi, psi.conj()), "lab-frame", 1, 1, 3)
        out = evolve_master_equation(lambda t: h, 0.0, rho0, T,
                                     StepOptions(h0=0.02, tol=1e-10))
        p_e = float(np.real(out.matrix[2, 2]))
        assert abs(p_e - np.sin(omega * T) ** 2) < 1e-8

    def test_trace_monotone_under_leakage(self):
        gamma = 0.4
        h_q = np.diag([0.0, 0.0, -0.5j * gamma])
        h_q[1, 2] = 0.3
        h_q[2, 1] = 0.3
        h = np.kron(np.eye(2, dtype=complex), h_q)
        psi = np.zeros(6, complex)
        psi[1] = 1.0
        rho0 = DensityOperator(np.outer(psi, psi.conj()), "lab-frame", 1, 1, 3)
        traces = []
        evolve_master_equation(lambda t: h, 0.0, rho0, 6.0,
                               StepOptions(h0=0.01, tol=1e-8, check_every=50),
                               observer=lambda t, r: traces.append(
                                   float(np.real(np.trace(r)))))
        diffs = np.diff([1.0] + traces)
        assert np.all(diffs < 1e-10)
        assert traces[-1] < 0.99

    def test_fock_cutoff_violation_reports_time(self):
        # resonant drive walks the cavity up the ladder and out the top
        n_max = 3
        a = destroy(n_max)
        h = 1.5j * a.conj().T - 1.5j * a
        rho0 = cavity_only_state(coherent_state(0.0, n_max), n_max)
        with pytest.raises(FockCutoffError) as err:
            evolve_master_equation(lambda t: h, 0.0, rho0, 5.0,
                                   StepOptions(h0=0.01, tol=1e-8,
                                               check_every=10))
        assert err.value.time is not None
        assert err.value.population > 1e-6

    def test_nonconvergence_raises(self):
        # an integrator that cannot resolve a 1e3-frequency with 2 halvings
        h = np.array([[0.0, 1e3], [1e3, 0.0]], complex)
        rho0 = DensityOperator(np.diag([1.0, 0.0]).astype(complex),
                               "lab-frame", n_qubits=1, fock_cutoff=0,
                               qubit_levels=2)
        with pytest.raises(ConvergenceError):
            evolve_master_equation(lambda t: h, 0.0, rho0, 1.0,
                                   StepOptions(h0=0.5, tol=1e-12,
                                               max_halvings=2,
                                               check_fock=False))

    def test_positivity_and_hermiticity_checkpoints(self):
        gamma, kappa = 0.2, 0.3
        n_max = 10
        a = destroy(n_max)
        h_c = 0.7 * a.conj().T @ a + 0.3 * (a + a.conj().T)
        h = np.kron(h_c, np.eye(3, dtype=complex))
        h_q = np.diag([0.0, 0.0, -0.5j * gamma])
        h_q[1, 2] = 0.5
        h_q[2, 1] = 0.5
        h = h + np.kron(np.eye(n_max + 1), h_q)
        psi = np.zeros(3 * (n_max + 1), complex)
        psi[1] = 1.0
        rho0 = DensityOperator(np.outer(psi, psi.conj()), "lab-frame", 1,
                               n_max, 3)

        def check(t, rho):
            assert np.max(np.abs(rho - rho.conj().T)) < 1e-10
            assert np.linalg.eigvalsh(rho).min() > -1e-8

        evolve_master_equation(lambda t: h, kappa, rho0, 4.0,
                               StepOptions(h0=0.02, tol=1e-8, check_every=40),
                               observer=check)
