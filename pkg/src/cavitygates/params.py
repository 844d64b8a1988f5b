"""Core parameter containers shared by both gate protocols.

All rates and frequencies are expressed in units of the qubit-cavity
coupling g, which is fixed to 1 and defines the time unit 1/g.  Platform
presets convert physical (SI, angular-frequency) numbers to these units
at the boundary, see :mod:`cavitygates.platforms`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "CavityGatesError",
    "DimensionError",
    "FockCutoffError",
    "InfeasiblePulseError",
    "ConvergenceError",
    "SystemParams",
    "Pulse",
    "DensityOperator",
    "DEFAULT_DIMENSION_CAP",
]

DEFAULT_DIMENSION_CAP = 20000


class CavityGatesError(Exception):
    """Base class for errors raised by this package."""


class DimensionError(CavityGatesError):
    """Joint Hilbert-space dimension exceeds the configured cap."""


class FockCutoffError(CavityGatesError):
    """Population reached the top Fock level during an evolution."""

    def __init__(self, message, time=None, population=None):
        super().__init__(message)
        self.time = time
        self.population = population


class InfeasiblePulseError(CavityGatesError):
    """No pulse satisfying the drive-inversion constraints exists."""


class ConvergenceError(CavityGatesError):
    """An iterative routine failed to converge."""


@dataclass(frozen=True)
class SystemParams:
    """Static system rates and detunings, all in units of g.

    Attributes
    ----------
    n_qubits : int
        Number of qubits N coupled to the common cavity mode.
    gamma : float
        Decay rate of the ancillary excited state (pure leakage).
    kappa : float
        Cavity decay rate.
    delta : float
        Drive-cavity detuning.
    Delta : float
        Drive-transition detuning.
    fock_cutoff : int
        Highest retained Fock level n_max (dimension n_max + 1).
    g : float
        Coupling rate; fixed to 1 and kept only to make formulas explicit.
    extra_one_decay : float
        Optional decay rate of the qubit state itself (Rydberg presets),
        modeled as non-hermitian leakage.
    dephasing_time : float or None
        Optional T2* in units of 1/g (fluxonium presets); used only by the
        platform estimators as an additive T/T2* infidelity term.
    """

    n_qubits: int
    gamma: float = 0.0
    kappa: float = 0.0
    delta: float = 0.0
    Delta: float = 0.0
    fock_cutoff: int = 8
    g: float = 1.0
    extra_one_decay: float = 0.0
    dephasing_time: float | None = None

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be >= 1")
        if self.gamma < 0 or self.kappa < 0 or self.extra_one_decay < 0:
            raise ValueError("decay rates must be non-negative")
        if self.fock_cutoff < 0:
            raise ValueError("fock_cutoff must be >= 0")
        if self.g != 1.0:
            raise ValueError("g is the unit of time/frequency and must be 1")

    @property
    def cooperativity(self) -> float:
        """C = g^2 / (gamma * kappa); inf when either rate vanishes."""
        if self.gamma <= 0.0 or self.kappa <= 0.0:
            return np.inf
        return self.g**2 / (self.gamma * self.kappa)

    def replace(self, **changes) -> "SystemParams":
        from dataclasses import replace as _replace

        return _replace(self, **changes)


@dataclass(frozen=True)
class Pulse:
    """Complex time series sampled on a uniform grid from 0 to T."""

    t_grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t_grid, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        if t.ndim != 1 or t.size < 2:
            raise ValueError("pulse grid needs at least 2 points")
        if v.shape != t.shape:
            raise ValueError("values and t_grid must have the same shape")
        dt = np.diff(t)
        if not np.allclose(dt, dt[0], rtol=1e-9, atol=1e-12 * max(t[-1], 1.0)):
            raise ValueError("pulse grid must be uniformly spaced")
        object.__setattr__(self, "t_grid", t)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_callable(cls, func, duration, n_points=2001) -> "Pulse":
        t = np.linspace(0.0, duration, n_points)
        return cls(t, np.asarray([func(ti) for ti in t], dtype=complex))

    @property
    def duration(self) -> float:
        return float(self.t_grid[-1])

    @property
    def dt(self) -> float:
        return float(self.t_grid[1] - self.t_grid[0])

    def derivative(self) -> "Pulse":
        """Central-difference derivative (one-sided at the ends)."""
        return Pulse(self.t_grid, np.gradient(self.values, self.t_grid, edge_order=2))

    def energy(self) -> float:
        """Pulse energy integral of |values|^2 over the grid (Simpson)."""
        from scipy.integrate import simpson

        return float(simpson(np.abs(self.values) ** 2, x=self.t_grid))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def boundary_residual(self) -> float:
        """max(|value(0)|, |value(T)|); zero for well-formed drive pulses."""
        return float(max(abs(self.values[0]), abs(self.values[-1])))

    def __call__(self, t):
        """Linear interpolation between grid points."""
        return np.interp(t, self.t_grid, self.values.real) + 1j * np.interp(
            t, self.t_grid, self.values.imag
        )


@dataclass
class DensityOperator:
    """Density operator on the joint cavity x qubit space.

    The trace may decay below one: excited-state decay is treated as pure
    population leakage through a non-hermitian Hamiltonian term.

    basis_tag is one of ``lab-frame``, ``displaced-frame``, ``effective``.
    """

    matrix: np.ndarray
    basis_tag: str = "lab-frame"
    n_qubits: int = 0
    fock_cutoff: int = 0
    qubit_levels: int = 3
    meta: dict = field(default_factory=dict)
    qubit_dim: int | None = None   # reachable-subspace size, if reduced

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def qubit_factor(self) -> int:
        return self.qubit_dim if self.qubit_dim is not None \
            else self.qubit_levels**self.n_qubits

    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def validate(self, herm_tol=1e-10, trace_tol=1e-9, psd_tol=1e-8):
        """Raise if hermiticity / trace / positivity invariants are violated."""
        m = self.matrix
        herm = np.max(np.abs(m - m.conj().T))
        if herm > herm_tol:
            raise ValueError(f"density operator not hermitian: residual {herm:.3e}")
        tr = self.trace()
        if tr > 1.0 + trace_tol:
            raise ValueError(f"trace {tr!r} exceeds 1")
        evals = np.linalg.eigvalsh((m + m.conj().T) / 2.0)
        if evals.min() < -psd_tol:
            raise ValueError(f"density operator not PSD: min eigenvalue {evals.min():.3e}")
        return self

    def top_fock_population(self) -> float:
        """Total population of the highest retained Fock level."""
        dq = self.qubit_factor
        block = self.matrix[-dq:, -dq:]
        return float(np.real(np.trace(block)))


def guard_dimension(n_max: int, n_qubits: int, qubit_levels: int = 3,
                    cap: int = DEFAULT_DIMENSION_CAP) -> int:
    dim = (n_max + 1) * qubit_levels**n_qubits
    if dim > cap:
        raise DimensionError(
            f"joint dimension {dim} = ({n_max}+1)*{qubit_levels}^{n_qubits} "
            f"exceeds cap {cap}"
        )
    return dim
