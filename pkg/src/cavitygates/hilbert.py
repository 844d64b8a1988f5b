"""Hilbert-space construction for the driven cavity-qubit system.

Each qubit is a three-level system |0>, |1>, |e> (indices 0, 1, 2);
|1> <-> |e> couples to the cavity.  The joint space is ordered
cavity (x) qubit_1 (x) ... (x) qubit_N, so an operator acting on the
cavity alone is ``kron(op_cav, eye(3**N))``.

For validation runs on the effective two-level model (|e> eliminated)
the same builders accept ``qubit_levels=2`` with basis |0>, |1>.
"""

from __future__ import annotations

import numpy as np

from .params import SystemParams, guard_dimension

__all__ = [
    "destroy",
    "number",
    "coherent_state",
    "collective_lowering",
    "excited_number",
    "one_number",
    "qubit_basis_index",
    "representative_state",
    "build_lab_hamiltonian",
    "build_displaced_hamiltonian",
    "build_effective_hamiltonian",
    "cavity_operator",
    "qubit_operator",
]


def destroy(n_max: int) -> np.ndarray:
    """Cavity annihilation operator on the truncated Fock space."""
    return np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), 1).astype(complex)


def number(n_max: int) -> np.ndarray:
    return np.diag(np.arange(n_max + 1, dtype=float)).astype(complex)


def coherent_state(beta: complex, n_max: int, warn_tol: float = 1e-10) -> np.ndarray:
    """Normalized truncated coherent state |beta>.

    Amplitudes are e^(-|beta|^2/2) beta^k / sqrt(k!).  A warning is issued
    when the squared amplitude on the top retained level exceeds
    ``warn_tol``, signalling an inadequate Fock cutoff.
    """
    beta = complex(beta)
    k = np.arange(n_max + 1)
    log_fact = np.cumsum(np.log(np.maximum(k, 1)))
    amp = np.exp(-0.5 * abs(beta) ** 2 + k * np.log(beta) - 0.5 * log_fact) if beta != 0 \
        else np.eye(n_max + 1, dtype=complex)[:, 0]
    amp = np.asarray(amp, dtype=complex)
    if abs(amp[-1]) ** 2 > warn_tol:
        import warnings

        warnings.warn(
            f"coherent state truncation: top-level weight {abs(amp[-1])**2:.2e} "
            f"exceeds {warn_tol:.1e} at |beta|={abs(beta):.3g}, n_max={n_max}",
            stacklevel=2,
        )
    return amp / np.linalg.norm(amp)


# ------------------------------------------------------------------
# qubit-register operators
# ------------------------------------------------------------------

def _single_site(op: np.ndarray, site: int, n_qubits: int, levels: int) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for j in range(n_qubits):
        out = np.kron(out, op if j == site else np.eye(levels, dtype=complex))
    return out


def collective_lowering(n_qubits: int, levels: int = 3) -> np.ndarray:
    """S^- = sum_j |1_j><e_j| (zero matrix in the two-level model)."""
    if levels == 2:
        d = 2**n_qubits
        return np.zeros((d, d), dtype=complex)
    s = np.zeros((3, 3), dtype=complex)
    s[1, 2] = 1.0
    out = np.zeros((3**n_qubits, 3**n_qubits), dtype=complex)
    for j in range(n_qubits):
        out += _single_site(s, j, n_qubits, 3)
    return out


def excited_number(n_qubits: int, levels: int = 3) -> np.ndarray:
    """n_e = sum_j |e_j><e_j|."""
    if levels == 2:
        d = 2**n_qubits
        return np.zeros((d, d), dtype=complex)
    p = np.zeros((3, 3), dtype=complex)
    p[2, 2] = 1.0
    out = np.zeros((3**n_qubits, 3**n_qubits), dtype=complex)
    for j in range(n_qubits):
        out += _single_site(p, j, n_qubits, 3)
    return out


def one_number(n_qubits: int, levels: int = 3) -> np.ndarray:
    """n = sum_j |1_j><1_j| (count of qubits in |1>)."""
    p = np.zeros((levels, levels), dtype=complex)
    p[1, 1] = 1.0
    out = np.zeros((levels**n_qubits, levels**n_qubits), dtype=complex)
    for j in range(n_qubits):
        out += _single_site(p, j, n_qubits, levels)
    return out


def qubit_basis_index(bits, levels: int = 3) -> int:
    """Index of the product basis state given per-qubit levels (msb first)."""
    idx = 0
    for b in bits:
        idx = idx * levels + int(b)
    return idx


def representative_state(n_ones: int, n_qubits: int, levels: int = 3,
                         placement: str = "leading"):
    """Computational basis state with ``n_ones`` qubits in |1>.

    With homogeneous couplings every placement of the 1s is equivalent
    (permutation symmetry); ``placement`` selects which representative is
    simulated ("leading" or "trailing"), which the symmetry tests compare.
    """
    if not 0 <= n_ones <= n_qubits:
        raise ValueError("n_ones out of range")
    if placement == "leading":
        bits = [1] * n_ones + [0] * (n_qubits - n_ones)
    else:
        bits = [0] * (n_qubits - n_ones) + [1] * n_ones
    return bits, qubit_basis_index(bits, levels)


def cavity_operator(op: np.ndarray, n_qubits: int, levels: int = 3) -> np.ndarray:
    return np.kron(op, np.eye(levels**n_qubits, dtype=complex))


def qubit_operator(op: np.ndarray, n_max: int) -> np.ndarray:
    return np.kron(np.eye(n_max + 1, dtype=complex), op)


# ------------------------------------------------------------------
# Hamiltonians
# ------------------------------------------------------------------

def _base_pieces(params: SystemParams, levels: int = 3):
    n_max = params.fock_cutoff
    N = params.n_qubits
    guard_dimension(n_max, N, levels)
    a = destroy(n_max)
    n_cav = cavity_operator(a.conj().T @ a, N, levels)
    sm = qubit_operator(collective_lowering(N, levels), n_max)
    ne = qubit_operator(excited_number(N, levels), n_max)
    n1 = qubit_operator(one_number(N, levels), n_max)
    a_full = cavity_operator(a, N, levels)
    return a_full, n_cav, sm, ne, n1


def build_lab_hamiltonian(params: SystemParams, eta: complex) -> np.ndarray:
    """Non-hermitian lab-frame Hamiltonian at drive amplitude eta.

    H = delta a+a + (Delta - i gamma/2) n_e + [(g S- + i eta) a+ + h.c.]
    plus -i Gamma_1/2 n when the qubit state itself decays.  The
    anti-hermitian part is exactly the leakage term.
    """
    if params.fock_cutoff < 1:
        raise ValueError("lab-frame Hamiltonian needs fock_cutoff >= 1")
    a, n_cav, sm, ne, n1 = _base_pieces(params)
    ad = a.conj().T
    coupling = (params.g * sm + 1j * eta * np.eye(a.shape[0])) @ ad
    h = params.delta * n_cav + (params.Delta - 0.5j * params.gamma) * ne
    h = h + coupling + coupling.conj().T
    if params.extra_one_decay:
        h = h - 0.5j * params.extra_one_decay * n1
    return h


def build_displaced_hamiltonian(params: SystemParams, alpha: complex) -> np.ndarray:
    """Displaced-frame Hamiltonian; the jump operator stays sqrt(kappa) a.

    H~ = delta a+a + (Delta - i gamma/2) n_e + g[(a+ - alpha*) S- + h.c.]
    """
    if params.fock_cutoff < 1:
        raise ValueError("displaced-frame Hamiltonian needs fock_cutoff >= 1")
    a, n_cav, sm, ne, n1 = _base_pieces(params)
    ad = a.conj().T
    drive = params.g * (ad - np.conj(alpha) * np.eye(a.shape[0])) @ sm
    h = params.delta * n_cav + (params.Delta - 0.5j * params.gamma) * ne
    h = h + drive + drive.conj().T
    if params.extra_one_decay:
        h = h - 0.5j * params.extra_one_decay * n1
    return h


def build_effective_hamiltonian(params: SystemParams, zeta: complex,
                                gamma_1: float) -> np.ndarray:
    """Effective two-level-model Hamiltonian after adiabatic elimination.

    H_eff = delta a+a + (-i gamma_1/2 + zeta a+ + zeta* a) n, acting on
    cavity (x) computational qubits (qubit_levels=2).
    """
    a, n_cav, _, _, n1 = _base_pieces(params, levels=2)
    ad = a.conj().T
    h = params.delta * n_cav
    h = h + (zeta * ad + np.conj(zeta) * a - 0.5j * gamma_1 * np.eye(a.shape[0])) @ n1
    return h
