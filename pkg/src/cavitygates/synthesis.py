"""Arbitrary symmetric phase gates from sequences of adiabatic pulses.

Each adiabatic pulse with detunings (delta_k, Delta_k) and energy I_k
contributes phases A_nk I_k with

    A_nk = -1 / (delta_k - n g^2 / Delta_k),

so hitting a target phase vector is the linear program

    min b . I   s.t.   A I = phi  (mod local terms),  I >= 0,

where b_k is the first-order infidelity of pulse k per unit energy.
Solutions are simplex vertices, so at most N+1 pulses are active, or
N-1 when the target is only fixed up to a global phase and a uniform
single-qubit z rotation (reduced constraint rows n >= 2).

All candidate detunings share a fixed offset Delta_k - delta_k, so a
pulse sequence only retunes the drive, never the cavity or the qubit
transition.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import comb

from .channels import DiagonalChannel, PhaseTarget
from .params import CavityGatesError, SystemParams
from .protocol_b import POLE_GUARD, cz_design_b, loss_coefficients
from .simplex import InfeasibleError, simplex_solve

__all__ = [
    "SynthesisGrid",
    "SynthesisProblem",
    "SynthesisPlan",
    "default_offset",
    "build_synthesis_lp",
    "synthesize",
    "plan_channel",
    "target_phase_rotation",
    "target_cnz",
    "cz_count_phase_rotation",
    "cz_count_gray_code",
]


def target_phase_rotation(alpha: float, n_qubits: int,
                          mode: str = "up-to-local") -> PhaseTarget:
    """Phases of exp(-i alpha Z x ... x Z): phi_n = -alpha (-1)^n."""
    n = np.arange(n_qubits + 1)
    return PhaseTarget(-alpha * (-1.0) ** n, mode)


def target_cnz(n_qubits: int, mode: str = "up-to-local") -> PhaseTarget:
    """Multi-controlled Z: phi_N = pi, phi_n = 0 for n < N."""
    p = np.zeros(n_qubits + 1)
    p[-1] = np.pi
    return PhaseTarget(p, mode)


def cz_count_phase_rotation(n_qubits: int) -> int:
    """CZ count of the CNOT-ladder decomposition of exp(-i a Z...Z).

    External input: the standard ladder circuit compiles to 2 (N - 1)
    CNOTs around one z rotation, each CNOT one CZ plus single-qubit
    gates.
    """
    return 2 * (n_qubits - 1)


def cz_count_gray_code(n_qubits: int) -> int:
    """CZ count of the ancilla-free Gray-code C_{N-1}Z decomposition.

    External input: the Gray-code walk over all parity terms uses
    2^N - 2 CNOTs (6 for the Toffoli-class N = 3 case).
    """
    return 2**n_qubits - 2


def default_offset(params: SystemParams) -> float:
    """Fixed Delta - delta shared by all grid points.

    Taken from the N = 2 optimum so the CZ working point lies on the
    grid: Delta - delta = -2.09 sqrt(gamma/kappa) g - 0.529 sqrt(kappa/gamma) g.
    """
    des = cz_design_b(params)
    return des.Delta - des.delta


@dataclass(frozen=True)
class SynthesisGrid:
    """Uniformly spaced candidate detunings delta_k (Delta_k rides along
    at the fixed offset).

    With delta_max = None the upper edge is placed 10% beyond the
    highest sector pole delta (delta + offset) = N g^2, so the grid
    covers every pole region without clustering candidates unphysically
    close to a divergence.  Sizes 2^j k0 + 1 refine into supersets, so
    doubling the resolution can only improve the LP optimum.
    """

    k: int = 33
    delta_min: float | None = None     # None: 0.05 sqrt(kappa/gamma) g
    delta_max: float | None = None     # None: 1.1 x highest pole
    offset: float | None = None        # Delta_k - delta_k; None = N=2 optimum
    guard: float = POLE_GUARD
    spacing: str = "uniform"

    def resolve_edges(self, n_qubits: int, offset: float,
                      params: SystemParams) -> tuple[float, float]:
        lo = self.delta_min
        if lo is None:
            scale = np.sqrt(params.kappa / params.gamma) \
                if params.gamma > 0 and params.kappa > 0 else 1.0
            lo = 0.05 * scale * params.g
        hi = self.delta_max
        if hi is None:
            # cover every sector pole with margin; keep the grid identical
            # for all register sizes up to 6 so the N sweeps share it
            n_cov = max(n_qubits, 6)
            pole = 0.5 * (-offset + np.sqrt(offset**2
                                            + 4.0 * n_cov * params.g**2))
            hi = 1.1 * pole
        if hi <= lo:
            raise ValueError("empty detuning grid")
        return float(lo), float(hi)

    def deltas(self, lo: float, hi: float) -> np.ndarray:
        if self.spacing == "log":
            return np.exp(np.linspace(np.log(lo), np.log(hi), self.k))
        return np.linspace(lo, hi, self.k)

    def refined(self) -> "SynthesisGrid":
        from dataclasses import replace

        return replace(self, k=2 * (self.k - 1) + 1)


def _eps_matrix(deltas, Deltas, n_qubits: int, params: SystemParams):
    """eps_k^{(n,m)} = (1 - c_nm) per unit pulse energy, shape (K, N+1, N+1)."""
    g = params.g
    n = np.arange(n_qubits + 1, dtype=float)
    u = Deltas[:, None] * deltas[:, None] - n[None, :] * g**2      # (K, N+1)
    gamma_term = params.gamma * g**2 * n[None, :] / u**2           # gamma_n / I
    s_unit = np.sqrt(params.kappa) * Deltas[:, None] / u           # s_n / sqrt(I)
    eps = 0.5 * (gamma_term[:, :, None] + gamma_term[:, None, :]) \
        + 0.5 * (s_unit[:, :, None] - s_unit[:, None, :]) ** 2
    return eps


@dataclass
class SynthesisProblem:
    n_qubits: int
    deltas: np.ndarray
    Deltas: np.ndarray
    a_matrix: np.ndarray          # (N+1, K) phases per unit energy
    b_cost: np.ndarray            # (K,) infidelity per unit energy
    target: PhaseTarget
    objective_mode: str
    a_eq: np.ndarray              # constraint matrix actually solved
    rhs: np.ndarray

    @property
    def k(self) -> int:
        return self.deltas.size


@dataclass
class SynthesisPlan:
    pulses: list                  # (delta_k, Delta_k, I_k) with I_k > 0
    theta_g: float
    theta_s: float
    predicted_infidelity: float
    achieved_phases: np.ndarray
    target: PhaseTarget
    problem: SynthesisProblem = field(repr=False, default=None)

    @property
    def n_pulses(self) -> int:
        return len(self.pulses)

    def total_energy(self) -> float:
        return float(sum(p[2] for p in self.pulses))

    def to_dict(self) -> dict:
        return {
            "pulses": [{"delta": d, "Delta": D, "energy": I}
                       for d, D, I in self.pulses],
            "theta_g": self.theta_g,
            "theta_s": self.theta_s,
            "predicted_infidelity": self.predicted_infidelity,
            "achieved_phases": list(self.achieved_phases),
            "target_phases": list(self.target.phases),
            "mode": self.target.mode,
        }


def _reduced_rows(a_matrix: np.ndarray, phases: np.ndarray):
    """Constraints modulo theta_g + n theta_s: rows n >= 2 of
    (A I)_n - n (A I)_1 + (n - 1)(A I)_0 = phi_n - n phi_1 + (n - 1) phi_0."""
    n_qubits = a_matrix.shape[0] - 1
    rows = []
    rhs = []
    for n in range(2, n_qubits + 1):
        rows.append(a_matrix[n] - n * a_matrix[1] + (n - 1) * a_matrix[0])
        rhs.append(phases[n] - n * phases[1] + (n - 1) * phases[0])
    return np.array(rows), np.array(rhs)


def build_synthesis_lp(target: PhaseTarget, params: SystemParams,
                       grid: SynthesisGrid | None = None,
                       objective_mode: str = "average") -> SynthesisProblem:
    """Assemble the pulse-energy linear program for a phase target.

    objective_mode "average" weights the per-pulse error terms with the
    binomial factors of the average gate fidelity; "uniform" weights all
    (n, m) pairs equally, the heuristic used for worst-case targets such
    as multi-controlled Z.
    """
    grid = grid or SynthesisGrid()
    N = target.n_qubits
    offset = grid.offset if grid.offset is not None else default_offset(params)
    lo, hi = grid.resolve_edges(N, offset, params)
    deltas = grid.deltas(lo, hi)
    Deltas = deltas + offset
    g = params.g
    n = np.arange(N + 1, dtype=float)
    # pole filter: drop candidates inside the guard band of any sector
    ok = np.abs(Deltas) > grid.guard
    with np.errstate(divide="ignore", invalid="ignore"):
        den = deltas[:, None] - n[None, :] * g**2 / Deltas[:, None]
    ok &= np.all(np.abs(den) > grid.guard * g, axis=1)
    deltas, Deltas, den = deltas[ok], Deltas[ok], den[ok]
    if deltas.size == 0:
        raise CavityGatesError("pole filtering left an empty candidate grid")

    a_matrix = (-1.0 / den).T                      # (N+1, K)
    eps = _eps_matrix(deltas, Deltas, N, params)   # (K, N+1, N+1)
    w = comb(N, np.arange(N + 1))
    if objective_mode == "average":
        d = 2.0**N
        b = (np.einsum("n,knn->k", w, eps)
             + np.einsum("n,m,knm->k", w, w, eps)) / (d * (d + 1.0))
    elif objective_mode == "uniform":
        b = eps.sum(axis=(1, 2)) / (N + 1.0) ** 2
    else:
        raise ValueError("objective_mode must be 'average' or 'uniform'")

    if target.mode == "up-to-local":
        a_eq, rhs = _reduced_rows(a_matrix, target.phases)
    else:
        a_eq, rhs = a_matrix, target.phases.copy()
    return SynthesisProblem(N, deltas, Deltas, a_matrix, b, target,
                            objective_mode, a_eq, rhs)


def _rhs_representatives(rhs: np.ndarray, max_combos: int = 4096):
    """Equivalent right-hand sides modulo 2 pi per constraint row.

    Gate phases are defined modulo 2 pi in every excitation sector, so
    each equality row may be shifted by 2 pi independently.  Candidates
    per row are the (-pi, pi] wrap and its two neighbours (a pulse that
    deposits the wanted phase on low sectors often lands a further turn
    on high sectors, where the shifted representative is the cheap one);
    the cross product is capped to keep the LP count bounded.
    """
    from itertools import product

    wrapped = np.mod(rhs + np.pi, 2.0 * np.pi) - np.pi
    per_row = []
    for raw, w in zip(rhs, wrapped):
        cands = [w, w - 2.0 * np.pi, w + 2.0 * np.pi, raw]
        if abs(abs(w) - np.pi) < 1e-9:
            cands.append(-w)
        uniq = []
        for c in cands:
            if not any(abs(c - u) < 1e-12 for u in uniq):
                uniq.append(c)
        per_row.append(uniq)
    n_combos = int(np.prod([len(c) for c in per_row]))
    if n_combos > max_combos:
        per_row = [c[:2] for c in per_row]
    return [np.array(combo) for combo in product(*per_row)]


def synthesize(target: PhaseTarget, params: SystemParams,
               grid: SynthesisGrid | None = None,
               objective_mode: str = "average") -> SynthesisPlan:
    """Optimal pulse sequence implementing the target phase gate.

    Solves the LP for every sign representative of the target (entries
    at +-pi name the same gate) and keeps the cheapest feasible plan.
    All-zero targets return the empty plan.
    """
    if np.allclose(target.phases, 0.0, atol=1e-15):
        return SynthesisPlan([], 0.0, 0.0, 0.0,
                             np.zeros(target.n_qubits + 1), target, None)
    problem = build_synthesis_lp(target, params, grid, objective_mode)
    best = None
    last_err = None
    for rhs in _rhs_representatives(problem.rhs):
        try:
            res = simplex_solve(problem.a_eq, rhs, problem.b_cost)
        except InfeasibleError as err:
            last_err = err
            continue
        if best is None or res.objective < best[0].objective:
            best = (res, rhs)
    if best is None:
        raise InfeasibleError(f"no representative of the target is reachable "
                              f"on this grid: {last_err}")
    res, rhs_used = best
    problem.rhs = rhs_used
    active = np.flatnonzero(res.x > 1e-12)
    pulses = [(float(problem.deltas[k]), float(problem.Deltas[k]),
               float(res.x[k])) for k in active]
    achieved = problem.a_matrix @ res.x
    if problem.target.mode == "up-to-local":
        theta_g = float(achieved[0] - problem.target.phases[0])
        theta_s = float(achieved[1] - problem.target.phases[1] - theta_g)
    else:
        theta_g = 0.0
        theta_s = 0.0
    residual = np.max(np.abs(problem.a_eq @ res.x - problem.rhs))
    if residual > 1e-8:
        raise CavityGatesError(f"LP solution violates constraints: {residual:.2e}")
    return SynthesisPlan(pulses, theta_g, theta_s, float(res.objective),
                         achieved, problem.target, problem)


def plan_channel(plan: SynthesisPlan, params: SystemParams) -> DiagonalChannel:
    """Composed channel of a pulse sequence.

    Per-pulse phases add; decay coefficients multiply (independent error
    channels, which reproduces the summed infidelities at first order).
    """
    n_qubits = plan.target.n_qubits
    channel = DiagonalChannel.identity(n_qubits)
    for delta, Delta, energy in plan.pulses:
        phases = np.array([-energy / (delta - n * params.g**2 / Delta)
                           for n in range(n_qubits + 1)])
        lc = loss_coefficients(n_qubits, energy, delta, Delta, params)
        c = np.clip(lc.c_nm, 1e-12, None)
        channel = channel.compose(
            DiagonalChannel.from_phases_and_coeffs(phases, c))
    return channel
