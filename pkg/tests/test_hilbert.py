import numpy as np
import pytest

from cavitygates.hilbert import (build_displaced_hamiltonian,
                                 build_lab_hamiltonian, coherent_state,
                                 destroy, excited_number, one_number,
                                 collective_lowering, qubit_basis_index)
from cavitygates.params import DimensionError, SystemParams


def dense_lab_hamiltonian_reference(params, eta):
    """Independent construction by explicit per-site tensor products."""
    n_max, N = params.fock_cutoff, params.n_qubits
    a = np.diag(np.sqrt(np.arange(1, n_max + 1)), 1).astype(complex)
    eye_c = np.eye(n_max + 1)
    s_single = np.zeros((3, 3), complex)
    s_single[1, 2] = 1.0  # |1><e|
    pe = np.zeros((3, 3), complex)
    pe[2, 2] = 1.0

    def site_op(op, j):
        out = np.array([[1.0 + 0j]])
        for k in range(N):
            out = np.kron(out, op if k == j else np.eye(3))
        return out

    sm = sum(site_op(s_single, j) for j in range(N))
    ne = sum(site_op(pe, j) for j in range(N))
    eye_q = np.eye(3**N)
    h = params.delta * np.kron(a.conj().T @ a, eye_q)
    h = h + (params.Delta - 0.5j * params.gamma) * np.kron(eye_c, ne)
    drive = np.kron(a.conj().T, params.g * sm + 1j * eta * eye_q)
    return h + drive + drive.conj().T


class TestLabHamiltonian:
    def test_matches_reference_construction(self):
        params = SystemParams(n_qubits=2, gamma=0.13, kappa=0.0, delta=0.7,
                              Delta=5.0, fock_cutoff=3)
        h = build_lab_hamiltonian(params, eta=0.4 - 0.2j)
        ref = dense_lab_hamiltonian_reference(params, 0.4 - 0.2j)
        assert np.max(np.abs(h - ref)) < 1e-12

    def test_hermitian_spectrum_single_qubit(self):
        # gamma = 0, eta = 0, N = 1, n_max = 1: block-diagonal 6x6
        params = SystemParams(n_qubits=1, delta=0.9, Delta=4.0, fock_cutoff=1)
        h = build_lab_hamiltonian(params, eta=0.0)
        assert np.max(np.abs(h - h.conj().T)) < 1e-14
        evals = np.sort(np.linalg.eigvalsh(h))
        # uncoupled: (0ph,0), (0ph,1), (1ph,0), (1ph,e) [its partner
        # |2ph,1> is truncated]; coupled block: (0ph,e) <-> (1ph,1)
        block = np.array([[4.0, 1.0], [1.0, 0.9]])
        expected = np.sort(np.concatenate([
            [0.0, 0.0, 0.9, 0.9 + 4.0], np.linalg.eigvalsh(block)]))
        assert np.allclose(evals, expected, atol=1e-12)

    def test_decoupled_limit_is_diagonal(self):
        # eta = 0 and g = 0 would decouple everything; emulate g = 0 by
        # subtracting the coupling block and check diagonal entries
        params = SystemParams(n_qubits=2, gamma=0.2, delta=0.5, Delta=3.0,
                              fock_cutoff=2)
        h = build_lab_hamiltonian(params, eta=0.0)
        a = destroy(2)
        coupling = np.kron(a.conj().T, collective_lowering(2))
        h0 = h - coupling - coupling.conj().T
        assert np.max(np.abs(h0 - np.diag(np.diag(h0)))) < 1e-14
        ne = excited_number(2)
        for n_ph in range(3):
            for q in range(9):
                idx = n_ph * 9 + q
                expect = 0.5 * n_ph + (3.0 - 0.1j) * ne[q, q]
                assert abs(h0[idx, idx] - expect) < 1e-12

    def test_drive_matrix_element(self):
        # <1 photon, 00| H |0 photons, 00> = i eta for N = 2, eta = i
        params = SystemParams(n_qubits=2, delta=0.3, Delta=2.0, fock_cutoff=1)
        h = build_lab_hamiltonian(params, eta=1j)
        q00 = qubit_basis_index([0, 0])
        row = 1 * 9 + q00
        col = 0 * 9 + q00
        assert abs(h[row, col] - (1j * 1j)) < 1e-14
        assert abs(h[col, row] - np.conj(1j * 1j)) < 1e-14

    def test_anti_hermitian_part_is_leakage_only(self):
        params = SystemParams(n_qubits=2, gamma=0.3, delta=0.5, Delta=2.0,
                              fock_cutoff=2, extra_one_decay=0.05)
        h = build_lab_hamiltonian(params, eta=0.7 + 0.1j)
        anti = (h - h.conj().T) / 2.0
        expected = -0.5j * (0.3 * excited_number(2) + 0.05 * one_number(2))
        expected = np.kron(np.eye(3), expected)
        assert np.max(np.abs(anti - expected)) < 1e-12

    def test_dimension_guard(self):
        params = SystemParams(n_qubits=9, fock_cutoff=30)
        with pytest.raises(DimensionError):
            build_lab_hamiltonian(params, 0.0)


class TestDisplacedHamiltonian:
    def test_alpha_zero_matches_lab_without_drive(self):
        params = SystemParams(n_qubits=2, gamma=0.1, delta=0.4, Delta=3.0,
                              fock_cutoff=3)
        assert np.max(np.abs(build_displaced_hamiltonian(params, 0.0)
                             - build_lab_hamiltonian(params, 0.0))) < 1e-14

    def test_qubit_drive_block(self):
        # N = 1, alpha = 2: the S- drive carries amplitude -g alpha*
        params = SystemParams(n_qubits=1, delta=0.4, Delta=3.0, fock_cutoff=1)
        h = build_displaced_hamiltonian(params, alpha=2.0)
        i1 = qubit_basis_index([1])
        ie = qubit_basis_index([2])
        assert abs(h[i1, ie] - (-2.0)) < 1e-14  # zero-photon block

    def test_hermitian_after_removing_leakage(self):
        params = SystemParams(n_qubits=2, gamma=0.25, delta=0.4, Delta=3.0,
                              fock_cutoff=2)
        for alpha in (0.3 + 0.4j, -1.2j, 5.0):
            h = build_displaced_hamiltonian(params, alpha)
            h = h + 0.5j * 0.25 * np.kron(np.eye(3), excited_number(2))
            assert np.max(np.abs(h - h.conj().T)) < 1e-12


class TestCoherentState:
    def test_vacuum(self):
        v = coherent_state(0.0, 5)
        assert np.allclose(v, np.eye(6)[:, 0])

    def test_amplitudes(self):
        import math

        v = coherent_state(1.0, 20)
        fact = np.array([math.factorial(k) for k in range(21)], dtype=float)
        expected = np.exp(-0.5) / np.sqrt(fact)
        assert np.max(np.abs(v - expected)) < 1e-12

    def test_annihilation_eigenstate(self):
        beta = 0.7 - 0.3j
        v = coherent_state(beta, 25)
        a = destroy(25)
        resid = a @ v - beta * v
        assert np.linalg.norm(resid) < 1e-10

    def test_truncation_warning(self):
        with pytest.warns(UserWarning):
            coherent_state(3.0, 10)
