"""Diagonal qubit channels and their extraction from simulations.

Both protocols produce a quantum operation that is diagonal in the
computational basis and permutation symmetric,

    E(|q><q'|) = exp(i phi_nm) |q><q'|,

where n, m count the qubits in |1> in the ket / bra states.  Im phi_nm
>= 0 encodes decay of the matrix element; phases obey phi_mn = -phi_nm*
so that E maps hermitian operators to hermitian operators.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .params import DensityOperator

__all__ = ["DiagonalChannel", "PhaseTarget", "channel_from_simulation",
           "LEAKAGE_NORM_THRESHOLD"]

LEAKAGE_NORM_THRESHOLD = 1e-4


@dataclass(frozen=True)
class PhaseTarget:
    """Target phase vector (phi(0), ..., phi(N)) for a symmetric phase gate.

    mode is "exact" or "up-to-local"; in the latter case fidelities are
    maximized over a global phase and a uniform single-qubit z phase,
    i.e. the comparison is modulo phi(n) -> phi(n) + theta_g + n theta_s.
    """

    phases: np.ndarray
    mode: str = "exact"

    def __post_init__(self):
        p = np.asarray(self.phases, dtype=float)
        if p.ndim != 1 or p.size < 1:
            raise ValueError("phases must be a 1-d vector of length N+1")
        if self.mode not in ("exact", "up-to-local"):
            raise ValueError("mode must be 'exact' or 'up-to-local'")
        object.__setattr__(self, "phases", p)

    @property
    def n_qubits(self) -> int:
        return self.phases.size - 1

    def shifted(self, theta_g: float, theta_s: float) -> "PhaseTarget":
        n = np.arange(self.phases.size)
        return PhaseTarget(self.phases + theta_g + n * theta_s, self.mode)


def target_unitary_a(n_qubits: int, theta: float, mode: str = "up-to-local") -> PhaseTarget:
    """Target for the geometric gate: phi(n) = theta n^2."""
    n = np.arange(n_qubits + 1)
    return PhaseTarget(theta * n.astype(float) ** 2, mode)


@dataclass(frozen=True)
class DiagonalChannel:
    """Diagonal permutation-symmetric channel phi_nm on N qubits."""

    n_qubits: int
    phi: np.ndarray
    leakage_norm: float = 0.0
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        p = np.asarray(self.phi, dtype=complex)
        d = self.n_qubits + 1
        if p.shape != (d, d):
            raise ValueError(f"phi must be {(d, d)}, got {p.shape}")
        object.__setattr__(self, "phi", p)

    def validate(self, tol=1e-8):
        """Check phi_mn = -phi_nm*, Im phi_nn >= 0, |exp(i phi_nn)| <= 1."""
        p = self.phi
        res = np.max(np.abs(p + p.conj().T))
        if res > tol:
            raise ValueError(f"channel phases violate phi_mn = -phi_nm*: {res:.3e}")
        if np.min(p.diagonal().imag) < -tol:
            raise ValueError("diagonal phases must not amplify populations")
        return self

    def element(self, n: int, m: int) -> complex:
        """Channel coefficient exp(i phi_nm)."""
        return np.exp(1j * self.phi[n, m])

    def coefficients(self) -> np.ndarray:
        return np.exp(1j * self.phi)

    def compose(self, other: "DiagonalChannel") -> "DiagonalChannel":
        """Sequential application: phases add, decay factors multiply."""
        if other.n_qubits != self.n_qubits:
            raise ValueError("channel sizes differ")
        return DiagonalChannel(self.n_qubits, self.phi + other.phi,
                               max(self.leakage_norm, other.leakage_norm))

    @classmethod
    def identity(cls, n_qubits: int) -> "DiagonalChannel":
        return cls(n_qubits, np.zeros((n_qubits + 1, n_qubits + 1), complex))

    @classmethod
    def ideal(cls, target: PhaseTarget) -> "DiagonalChannel":
        ph = target.phases
        return cls(target.n_qubits, ph[:, None] - ph[None, :] + 0j)

    @classmethod
    def from_phases_and_coeffs(cls, phases: np.ndarray, c: np.ndarray) -> "DiagonalChannel":
        """Build from per-sector real phases phi_n and coefficients c_nm.

        E(|q><q'|) = c_nm exp(i (phi_n - phi_m)) |q><q'|; requires c > 0.
        """
        phases = np.asarray(phases, float)
        c = np.asarray(c, float)
        n_qubits = phases.size - 1
        if np.any(c <= 0):
            raise ValueError("coefficients must be positive to take logarithms")
        phi = phases[:, None] - phases[None, :] - 1j * np.log(c)
        return cls(n_qubits, phi)

    def apply_to_symmetric_density(self, rho_nm: np.ndarray) -> np.ndarray:
        """Apply elementwise to a matrix indexed by excitation sectors."""
        return self.coefficients() * rho_nm


def channel_from_simulation(simulate, n_qubits: int,
                            leakage_threshold: float = LEAKAGE_NORM_THRESHOLD,
                            representatives: str = "leading") -> DiagonalChannel:
    """Extract the diagonal channel from final-state simulations.

    Parameters
    ----------
    simulate : callable
        (bits_ket, bits_bra) -> DensityOperator on the joint space for the
        initial operator |0_cav> <0_cav| (x) |q><q'|.  Only one
        representative pair per excitation-number pair (n, m) with n <= m
        is requested; permutation symmetry fills in the rest.
    n_qubits : int
        Register size N.
    leakage_threshold : float
        Frobenius norm of the traced qubit matrix outside the expected
        single element above which the channel is flagged as non-diagonal.

    Returns
    -------
    DiagonalChannel with phi_nm = -i log of the traced matrix element and
    the largest observed leakage norm recorded.
    """
    from .hilbert import representative_state

    d = n_qubits + 1
    phi = np.zeros((d, d), dtype=complex)
    worst_leak = 0.0
    for n in range(d):
        for m in range(n, d):
            bits_n, _ = representative_state(n, n_qubits, placement=representatives)
            bits_m, _ = representative_state(m, n_qubits, placement=representatives)
            rho = simulate(bits_n, bits_m)
            coeff, leak = _extract_pair(rho, bits_n, bits_m)
            worst_leak = max(worst_leak, leak)
            val = -1j * np.log(coeff)
            if m == n:
                val = 1j * val.imag  # populations are real: phi_nn purely imaginary
            phi[n, m] = val
            phi[m, n] = -np.conj(val)
    if worst_leak > leakage_threshold:
        warnings.warn(
            f"off-diagonal leakage norm {worst_leak:.2e} exceeds "
            f"{leakage_threshold:.1e}; channel is not diagonal at this accuracy",
            stacklevel=2,
        )
    return DiagonalChannel(n_qubits, phi, worst_leak)


def _extract_pair(rho: DensityOperator, bits_ket, bits_bra):
    """Traced qubit matrix element and off-element leakage norm."""
    from .hilbert import qubit_basis_index

    levels = rho.qubit_levels
    dq = levels**rho.n_qubits
    r4 = rho.matrix.reshape(rho.fock_cutoff + 1, dq, rho.fock_cutoff + 1, dq)
    traced = np.einsum("nanb->ab", r4)
    i = qubit_basis_index(bits_ket, levels)
    j = qubit_basis_index(bits_bra, levels)
    coeff = traced[i, j]
    rest = traced.copy()
    rest[i, j] = 0.0
    return coeff, float(np.linalg.norm(rest))
