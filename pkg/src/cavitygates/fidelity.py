"""Gate fidelity metrics for diagonal permutation-symmetric channels.

For a channel E(|q><q'|) = exp(i phi_nm) |q><q'| and a diagonal target
with phases phi_t(n), the average gate fidelity over Haar-random pure
states of the computational space has the closed form

    F = Re[ sum_n C(N,n) e^{i phi_nn}
          + sum_{n,m} C(N,n) C(N,m) e^{i(phi_nm - (phi_t(n) - phi_t(m)))} ]
        / (2^N (2^N + 1)).

The worst-case (minimal) fidelity reduces to the minimum of a quadratic
form over the probability simplex: for diagonal channel and target, the
state fidelity depends on |psi_q|^2 only, and by permutation symmetry
only on the total weight w_n per excitation sector, so

    F(psi) = sum_{n,m} w_n w_m Re exp(i(phi_nm - phi_t(n) + phi_t(m))).
"""

from __future__ import annotations

import numpy as np
from scipy.special import comb

from .channels import DiagonalChannel, PhaseTarget

__all__ = [
    "average_gate_fidelity_diagonal",
    "min_fidelity",
    "haar_average_fidelity",
    "optimize_local_phase",
    "unitary_average_fidelity",
]


def _weights(n_qubits: int) -> np.ndarray:
    return comb(n_qubits, np.arange(n_qubits + 1))


def _relative_coefficients(channel: DiagonalChannel, target: PhaseTarget,
                           theta_s: float = 0.0) -> np.ndarray:
    """Z_nm = exp(i(phi_nm - (phi_t(n) - phi_t(m)))) with optional z shift."""
    if channel.n_qubits != target.n_qubits:
        raise ValueError("channel and target sizes differ")
    ph = target.phases + theta_s * np.arange(target.phases.size)
    return np.exp(1j * (channel.phi - (ph[:, None] - ph[None, :])))


def _avg_fidelity_exact(channel: DiagonalChannel, target: PhaseTarget,
                        theta_s: float = 0.0) -> float:
    N = channel.n_qubits
    w = _weights(N)
    z = _relative_coefficients(channel, target, theta_s)
    diag = np.sum(w * np.exp(1j * channel.phi.diagonal()))
    cross = w @ z @ w
    d = 2.0**N
    return float(np.real((diag + cross) / (d * (d + 1.0))))


def optimize_local_phase(channel: DiagonalChannel, target: PhaseTarget,
                         grid: int = 4096):
    """Best uniform single-qubit z phase: max_theta_s F(theta_s).

    The global phase cancels in the fidelity, so a 1-d search over the
    2 pi periodic theta_s suffices.  A dense grid plus parabolic
    refinement keeps the result deterministic.
    """
    N = channel.n_qubits
    w = _weights(N)
    z = w[:, None] * w[None, :] * _relative_coefficients(channel, target)
    dvec = np.arange(-N, N + 1)
    wd = np.zeros(dvec.size, dtype=complex)
    nn, mm = np.meshgrid(np.arange(N + 1), np.arange(N + 1), indexing="ij")
    for k, dd in enumerate(dvec):
        wd[k] = z[nn - mm == dd].sum()
    theta = np.linspace(0.0, 2 * np.pi, grid, endpoint=False)
    vals = np.real(np.exp(-1j * np.outer(theta, dvec)) @ wd)
    i = int(np.argmax(vals))
    # parabolic refinement on the periodic grid
    tm, t0, tp = theta[(i - 1) % grid], theta[i], theta[(i + 1) % grid]
    fm, f0, fp = vals[(i - 1) % grid], vals[i], vals[(i + 1) % grid]
    denom = fm - 2 * f0 + fp
    step = 0.0 if abs(denom) < 1e-30 else 0.5 * (fm - fp) / denom
    best = t0 + step * (2 * np.pi / grid)
    return float(best)


def average_gate_fidelity_diagonal(channel: DiagonalChannel,
                                   target: PhaseTarget) -> float:
    """Average gate fidelity of a diagonal channel against a phase target.

    In "up-to-local" mode the result is maximized over a uniform
    single-qubit z rotation (the global phase drops out identically).
    """
    if target.mode == "up-to-local":
        ts = optimize_local_phase(channel, target)
        return _avg_fidelity_exact(channel, target, ts)
    return _avg_fidelity_exact(channel, target)


def unitary_average_fidelity(phase_errors: np.ndarray, n_qubits: int) -> float:
    """Average fidelity of a diagonal unitary with per-basis-state phase errors.

    phase_errors holds phi_q - phi_target(q) for every computational basis
    state q (length 2^N); F = (2^N + |sum_q e^{i d_q}|^2) / (2^N (2^N+1)).
    """
    d = 2.0**n_qubits
    s = np.sum(np.exp(1j * np.asarray(phase_errors)))
    return float((d + abs(s) ** 2) / (d * (d + 1.0)))


def haar_average_fidelity(channel: DiagonalChannel, target: PhaseTarget,
                          n_samples: int = 100_000, rng=None):
    """Monte-Carlo estimate of the average gate fidelity over Haar states.

    Returns (mean, standard_error).  Serves as the independent oracle for
    the closed form; the state fidelity of a diagonal channel depends on
    the sampled state only through its sector weights.
    """
    rng = np.random.default_rng(rng)
    N = channel.n_qubits
    dim = 2**N
    if target.mode == "up-to-local":
        ts = optimize_local_phase(channel, target)
        zr = np.real(_relative_coefficients(channel, target, ts))
    else:
        zr = np.real(_relative_coefficients(channel, target))
    popcount = np.array([bin(q).count("1") for q in range(dim)])
    vec = rng.standard_normal((n_samples, dim)) + 1j * rng.standard_normal((n_samples, dim))
    p = np.abs(vec) ** 2
    p /= p.sum(axis=1, keepdims=True)
    w = np.zeros((n_samples, N + 1))
    for n in range(N + 1):
        w[:, n] = p[:, popcount == n].sum(axis=1)
    vals = np.einsum("sn,nm,sm->s", w, zr, w, optimize=True)
    return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(n_samples))


# ------------------------------------------------------------------
# worst-case fidelity
# ------------------------------------------------------------------

def _project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.arange(1, v.size + 1)
    cond = u - css / k > 0
    rho = k[cond][-1]
    tau = css[cond][-1] / rho
    return np.maximum(v - tau, 0.0)


def min_fidelity(channel: DiagonalChannel, target: PhaseTarget,
                 restarts: int = 32, iters: int = 400, seed: int = 7,
                 full_space_check: bool = False) -> float:
    """Worst-case state fidelity min_psi <psi|U+ E(|psi><psi|) U|psi>.

    Multi-start projected-gradient descent of the quadratic form
    w^T M w over the sector-weight simplex (dimension N+1), with all
    vertices plus ``restarts`` random interior points as starting points
    and an exact Karush-Kuhn-Tucker polish on the final support.  The
    returned value is an upper bound on the true minimum (the search is
    a heuristic), but for diagonal permutation-symmetric channels the
    sector-weight reduction itself is exact: the state fidelity depends
    on |psi_q|^2 only, hence only on the sector weights.

    With ``full_space_check`` (small N) a random-restart minimization
    over raw computational-space probability vectors is run as well and
    the smaller value is returned.
    """
    if target.mode == "up-to-local":
        ts = optimize_local_phase(channel, target)
        m = np.real(_relative_coefficients(channel, target, ts))
    else:
        m = np.real(_relative_coefficients(channel, target))
    m = 0.5 * (m + m.T)
    val = _min_quadratic_simplex(m, restarts, iters, seed)
    if full_space_check:
        val = min(val, _min_full_space(channel, target, restarts, iters, seed))
    return val


def _min_quadratic_simplex(m: np.ndarray, restarts: int, iters: int,
                           seed: int) -> float:
    d = m.shape[0]
    rng = np.random.default_rng(seed)
    starts = [np.eye(d)[i] for i in range(d)] + [np.full(d, 1.0 / d)]
    starts += [_project_simplex(rng.random(d)) for _ in range(restarts)]
    lip = max(float(np.linalg.norm(m, 2)), 1e-12)
    best = np.inf
    for w0 in starts:
        w = w0.copy()
        step = 1.0 / (2.0 * lip)
        f = w @ m @ w
        for _ in range(iters):
            w_new = _project_simplex(w - step * 2.0 * (m @ w))
            f_new = w_new @ m @ w_new
            if f_new > f - 1e-15:
                step *= 0.5
                if step < 1e-12:
                    break
            else:
                w, f = w_new, f_new
        f = min(f, _kkt_polish(m, w))
        best = min(best, f)
    return float(best)


def _kkt_polish(m: np.ndarray, w: np.ndarray, tol: float = 1e-9) -> float:
    """Solve the stationarity system exactly on the active support."""
    support = np.flatnonzero(w > tol)
    if support.size == 0:
        return np.inf
    ms = m[np.ix_(support, support)]
    k = support.size
    sys = np.zeros((k + 1, k + 1))
    sys[:k, :k] = 2.0 * ms
    sys[:k, k] = -1.0
    sys[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    try:
        sol = np.linalg.solve(sys, rhs)
    except np.linalg.LinAlgError:
        return float(w @ m @ w)
    ws = sol[:k]
    if np.any(ws < -1e-10):
        return float(w @ m @ w)
    ws = np.maximum(ws, 0.0)
    ws /= ws.sum()
    full = np.zeros(m.shape[0])
    full[support] = ws
    return float(min(w @ m @ w, full @ m @ full))


def _min_full_space(channel: DiagonalChannel, target: PhaseTarget,
                    restarts: int, iters: int, seed: int) -> float:
    """Projected-gradient search over raw 2^N basis-state probabilities."""
    N = channel.n_qubits
    dim = 2**N
    if target.mode == "up-to-local":
        ts = optimize_local_phase(channel, target)
        zr = np.real(_relative_coefficients(channel, target, ts))
    else:
        zr = np.real(_relative_coefficients(channel, target))
    popcount = np.array([bin(q).count("1") for q in range(dim)])
    big = zr[np.ix_(popcount, popcount)]
    return _min_quadratic_simplex(0.5 * (big + big.T), restarts, iters, seed + 1)
