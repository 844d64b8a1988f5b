"""Geometric-phase gate protocol: pulse design, frame inversions, the
analytic lossy channel, asymptotics, and the full displaced-frame
Lindblad simulation.

The gate exp(i theta n^2) is generated by driving the cavity so that in
the qubit-conditioned frame the effective drive is

    zeta(t) = -delta f(t) + i f'(t),

where f is any real function with f(0)=f(T)=f'(0)=f'(T)=0 and
delta^2 f^2 + f'^2 < g^2/4 everywhere (invertibility of the dressing
transformation).  The accumulated phase is theta = delta * integral f^2.

The analytic channel solves the effective-model Lindblad equation in
closed form,

    beta_n' = -(i delta + kappa/2) beta_n - i n zeta,
    phi_nm' = (m - n)(zeta beta_m* + zeta* beta_n) + i (m + n) gamma_1 / 2,

and the full model evolves the three-level displaced-frame Hamiltonian
with the drive alpha(t) recovered by inverting the dressing relation.

Sign conventions: alpha solves alpha' = -eta - (i delta + kappa/2) alpha
(main-text form).  The sign of eta is a gauge choice that cancels in all
fidelities.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_simpson, simpson
from scipy.optimize import minimize_scalar

from .channels import DiagonalChannel, target_unitary_a
from .fidelity import average_gate_fidelity_diagonal, unitary_average_fidelity
from .lindblad import StepOptions, evolve_master_equation
from .params import DensityOperator, InfeasiblePulseError, Pulse, SystemParams

__all__ = [
    "GeometricPulseDesign",
    "EffectiveDriveParams",
    "ChannelSolution",
    "design_pulse_a",
    "design_from_shape",
    "invert_to_alpha",
    "invert_to_eta",
    "calibrate_Delta",
    "effective_drive_params",
    "solve_channel_a",
    "asymptotic_infidelity_a",
    "optimal_delta_a",
    "optimize_delta_a",
    "feasible_delta_interval",
    "delta_for_zeta_margin",
    "protocol_a_infidelity",
    "simulate_protocol_a",
    "inhomogeneity_bound_a",
    "monte_carlo_inhomogeneity_a",
]

ZETA_MARGIN = 1.0 - 1e-9  # reject |zeta| >= g/2 * margin in the inversion


# ------------------------------------------------------------------
# pulse design
# ------------------------------------------------------------------

@dataclass(frozen=True)
class GeometricPulseDesign:
    """Geometric trajectory function f and derived effective drive zeta."""

    theta: float
    delta: float
    duration: float
    f_func: object = field(repr=False)
    fdot_func: object = field(repr=False)
    fddot_func: object = field(repr=False, default=None)
    grid_points: int = 4001

    @property
    def t_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.duration, self.grid_points)

    def f(self, t):
        return self.f_func(t)

    def fdot(self, t):
        return self.fdot_func(t)

    def zeta(self, t):
        return -self.delta * self.f_func(t) + 1j * self.fdot_func(t)

    def zeta_dot(self, t):
        if self.fddot_func is None:
            eps = 1e-6 * max(self.duration, 1.0)
            return (self.zeta(t + eps) - self.zeta(t - eps)) / (2 * eps)
        return -self.delta * self.fdot_func(t) + 1j * self.fddot_func(t)

    def f_pulse(self) -> Pulse:
        t = self.t_grid
        return Pulse(t, self.f_func(t).astype(complex))

    def max_zeta_abs(self) -> float:
        return float(np.max(np.abs(self.zeta(self.t_grid))))

    def validate(self, g: float = 1.0, theta_tol: float = 1e-9):
        t = self.t_grid
        fv = np.asarray(self.f_func(t), dtype=float)
        fd = np.asarray(self.fdot_func(t), dtype=float)
        bnd = max(abs(fv[0]), abs(fv[-1]), abs(fd[0]), abs(fd[-1]))
        if bnd > 1e-9 * max(1.0, np.max(np.abs(fv))):
            raise InfeasiblePulseError(f"f or f' nonzero at the boundary: {bnd:.2e}")
        peak = float(np.max(self.delta**2 * fv**2 + fd**2))
        if peak >= (g / 2.0) ** 2:
            raise InfeasiblePulseError(
                f"max(delta^2 f^2 + f'^2) = {peak:.6f} >= g^2/4; the dressing "
                "transformation is not invertible for this f"
            )
        theta_num = self.delta * simpson(fv**2, x=t)
        if abs(theta_num - self.theta) > theta_tol * max(1.0, abs(self.theta)):
            raise InfeasiblePulseError(
                f"delta * integral f^2 = {theta_num!r} differs from theta = "
                f"{self.theta!r}"
            )
        return self


def design_pulse_a(theta: float, delta: float, duration: float,
                   grid_points: int = 4001) -> GeometricPulseDesign:
    """sin^2 trajectory f(t) = A sin^2(pi t / T) scaled for the target phase.

    A = sqrt(8 theta / (3 delta T)) makes delta * integral f^2 = theta
    exact.  For theta = pi/2 this is the published working pulse; the
    feasibility boundary (no delta admits |zeta| < g/2) sits at
    T g ~ 8.27.
    """
    if duration <= 0:
        raise ValueError("duration must be positive")
    if delta <= 0:
        raise ValueError("delta must be positive")
    if theta < 0:
        raise ValueError("theta must be non-negative")
    amp = np.sqrt(8.0 * theta / (3.0 * delta * duration))
    w = np.pi / duration

    def f(t):
        return amp * np.sin(w * np.asarray(t)) ** 2

    def fdot(t):
        return amp * w * np.sin(2.0 * w * np.asarray(t))

    def fddot(t):
        return 2.0 * amp * w**2 * np.cos(2.0 * w * np.asarray(t))

    design = GeometricPulseDesign(theta, delta, duration, f, fdot, fddot,
                                  grid_points)
    if theta > 0:
        design.validate()
    return design


def design_from_shape(shape, theta: float, delta: float, duration: float,
                      grid_points: int = 8001,
                      shape_dot=None, shape_ddot=None) -> GeometricPulseDesign:
    """Scale an arbitrary smooth shape to realize the target phase.

    ``shape`` is any callable with shape(0)=shape(T)=0 and vanishing end
    derivatives; only the enclosed phase-space area matters for the gate,
    which the shape-invariance tests exercise.  Derivatives default to
    central differences on the grid.
    """
    t = np.linspace(0.0, duration, grid_points)
    raw = np.asarray(shape(t), dtype=float)
    norm = delta * simpson(raw**2, x=t)
    if norm <= 0:
        raise ValueError("shape has zero weight")
    scale = np.sqrt(theta / norm)

    def f(tt):
        return scale * np.asarray(shape(tt), dtype=float)

    if shape_dot is not None:
        def fdot(tt):
            return scale * np.asarray(shape_dot(tt), dtype=float)
    else:
        fv = scale * raw

        def fdot(tt):
            grad = np.gradient(fv, t, edge_order=2)
            return np.interp(tt, t, grad)

    fddot = None
    if shape_ddot is not None:
        def fddot(tt):
            return scale * np.asarray(shape_ddot(tt), dtype=float)

    design = GeometricPulseDesign(theta, delta, duration, f, fdot, fddot,
                                  grid_points)
    return design.validate(theta_tol=1e-6)


def feasible_delta_interval(theta: float, duration: float,
                            g: float = 1.0) -> tuple[float, float]:
    """Interval of delta for which the sin^2 design satisfies |zeta| < g/2.

    Uses the closed form of max_t (delta^2 f^2 + f'^2) for the sin^2
    shape.  Raises InfeasiblePulseError when the interval is empty; for
    theta = pi/2 that happens below T g ~ 8.27.
    """
    if theta <= 0:
        return (0.0, np.inf)
    c = (np.pi / duration) ** 2

    def peak(delta):
        a2 = 8.0 * theta / (3.0 * delta * duration)
        if delta**2 >= 2.0 * c:
            return a2 * delta**2
        return a2 * 4.0 * c**2 / (4.0 * c - delta**2)

    # minimum of peak(delta) sits at delta = 2 sqrt(c/3)
    d_star = 2.0 * np.sqrt(c / 3.0)
    if peak(d_star) >= (g / 2.0) ** 2:
        raise InfeasiblePulseError(
            f"no delta admits |zeta| < g/2 for theta={theta:.4f}, "
            f"T g = {duration:.3f} (boundary T g ~ {np.sqrt(8*np.sqrt(3)*theta):.2f})"
        )
    lo, hi = d_star, d_star
    step = d_star
    while peak(hi) < (g / 2.0) ** 2:
        hi += step
        step *= 2.0
        if hi > 1e9:
            break
    step = d_star / 2.0
    while peak(lo) < (g / 2.0) ** 2 and lo > 1e-12:
        lo = max(lo - step, lo / 2.0)
    # bisect both edges
    def bisect(a, b):
        for _ in range(200):
            mid = 0.5 * (a + b)
            if peak(mid) < (g / 2.0) ** 2:
                a = mid
            else:
                b = mid
            if abs(b - a) < 1e-12 * max(1.0, b):
                break
        return a

    upper = bisect(d_star, hi)
    lower_edge = bisect(d_star, max(lo, 1e-12)) if peak(max(lo, 1e-12)) >= (g/2.0)**2 \
        else max(lo, 1e-12)
    return (float(lower_edge), float(upper))


def delta_for_zeta_margin(theta: float, duration: float, frac: float = 0.7,
                          g: float = 1.0) -> float:
    """Largest delta keeping max|zeta| at ``frac`` of the inversion bound.

    The sin^2 design approaches the pole |zeta| = g/2 only as the
    feasibility edge; capping the excursion at a fraction of the bound
    keeps the drive inversion well conditioned.  Used as the search edge
    for detuning optimization when photon loss alone would push delta to
    the pole (kappa-dominated platforms).
    """
    target = (frac * g / 2.0) ** 2
    c = (np.pi / duration) ** 2

    def peak(delta):
        a2 = 8.0 * theta / (3.0 * delta * duration)
        if delta**2 >= 2.0 * c:
            return a2 * delta**2
        return a2 * 4.0 * c**2 / (4.0 * c - delta**2)

    d_star = 2.0 * np.sqrt(c / 3.0)
    if peak(d_star) >= target:
        raise InfeasiblePulseError("margin unreachable at this duration")
    lo, hi = d_star, d_star
    while peak(hi) < target:
        hi *= 2.0
        if hi > 1e9:
            return hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if peak(mid) < target:
            lo = mid
        else:
            hi = mid
    return float(lo)


# ------------------------------------------------------------------
# frame inversions
# ------------------------------------------------------------------

def _alpha_coeff(abs_zeta2, Delta: float, g: float = 1.0):
    """|alpha| / |zeta| as a function of |zeta|^2 (pointwise inversion)."""
    under = 1.0 - 4.0 * abs_zeta2 / g**2
    bad = under <= (1.0 - ZETA_MARGIN**2)
    if np.any(bad):
        raise InfeasiblePulseError(
            "dressing inversion pole: |zeta| >= g/2 within tolerance"
        )
    return abs(Delta) / (g**2 * np.sqrt(under))


def invert_to_alpha(design: GeometricPulseDesign, Delta: float):
    """Displacement alpha(t) whose dressed drive reproduces zeta(t).

    |alpha| = |zeta| |Delta| / (g^2 sqrt(1 - 4 |zeta|^2 / g^2)) and
    arg alpha = arg zeta; the forward relation
    zeta = g^2 alpha / sqrt(4 g^2 |alpha|^2 + Delta^2) round-trips to
    1e-10.  Returns (alpha_callable, alpha_pulse).
    """
    if Delta == 0:
        raise ValueError("Delta must be nonzero for the inversion")

    def alpha(t):
        z = design.zeta(t)
        return _alpha_coeff(np.abs(z) ** 2, Delta) * z

    t = design.t_grid
    return alpha, Pulse(t, np.asarray(alpha(t), dtype=complex))


def _alpha_dot(design: GeometricPulseDesign, Delta: float):
    """Analytic time derivative of alpha(t) via the chain rule."""
    g = 1.0

    def adot(t):
        z = design.zeta(t)
        zd = design.zeta_dot(t)
        z2 = np.abs(z) ** 2
        under = 1.0 - 4.0 * z2 / g**2
        c = abs(Delta) / (g**2 * np.sqrt(under))
        dc_dz2 = abs(Delta) * 2.0 / (g**4 * under**1.5)
        return dc_dz2 * 2.0 * np.real(np.conj(z) * zd) * z + c * zd

    return adot


def invert_to_eta(design_or_alpha, delta: float, kappa: float,
                  Delta: float | None = None, grid_points: int = 4001):
    """Drive eta(t) = -alpha' - (i delta + kappa/2) alpha.

    Accepts either a GeometricPulseDesign plus Delta (analytic
    derivatives) or a sampled alpha Pulse (central differences).
    Forward-integrating alpha' = -eta - (i delta + kappa/2) alpha with
    the returned eta reproduces alpha to integrator tolerance.
    """
    p = 1j * delta + 0.5 * kappa
    if isinstance(design_or_alpha, GeometricPulseDesign):
        if Delta is None:
            raise ValueError("Delta required with a design input")
        alpha, _ = invert_to_alpha(design_or_alpha, Delta)
        adot = _alpha_dot(design_or_alpha, Delta)

        def eta(t):
            return -adot(t) - p * alpha(t)

        t = np.linspace(0.0, design_or_alpha.duration, grid_points)
        return eta, Pulse(t, np.asarray(eta(t), dtype=complex))
    pulse: Pulse = design_or_alpha
    adot_vals = pulse.derivative().values
    vals = -adot_vals - p * pulse.values
    out = Pulse(pulse.t_grid, vals)
    return out, out


def calibrate_Delta(design: GeometricPulseDesign, eta_cap: float,
                    params: SystemParams, rel_tol: float = 1e-3,
                    grid_points: int = 4001) -> float:
    """Bisection on Delta so that max_t |eta(t)| equals the cap.

    max|eta| grows monotonically with Delta (alpha is pointwise
    proportional to |Delta| at fixed zeta), so a plain bracket-and-bisect
    converges to the requested 0.1% tolerance.
    """
    if eta_cap <= 0:
        raise ValueError("eta_cap must be positive")
    t = np.linspace(0.0, design.duration, grid_points)

    def max_eta(Delta):
        eta, _ = invert_to_eta(design, design.delta, params.kappa, Delta,
                               grid_points)
        return float(np.max(np.abs(eta(t))))

    lo, hi = 1e-3, 1.0
    while max_eta(hi) < eta_cap:
        hi *= 2.0
        if hi > 1e9:
            raise InfeasiblePulseError("no Delta reaches the eta cap")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if max_eta(mid) < eta_cap:
            lo = mid
        else:
            hi = mid
        if abs(max_eta(mid) - eta_cap) <= rel_tol * eta_cap:
            return mid
    raise InfeasiblePulseError("Delta calibration did not converge")


# ------------------------------------------------------------------
# dressed-frame parameters
# ------------------------------------------------------------------

@dataclass(frozen=True)
class EffectiveDriveParams:
    """Dressed energies, effective drive and decay split at one instant."""

    zeta: complex
    eps_1: float
    eps_e: float
    gamma_1: float
    gamma_e: float
    lambda_angle: float
    mu_angle: float


def effective_drive_params(alpha: complex, params: SystemParams) -> EffectiveDriveParams:
    """Dressing of a single qubit by the displaced drive alpha.

    zeta = g^2 alpha / sqrt(4 g^2 |alpha|^2 + Delta^2),
    eps_{e/1} = (Delta +- sqrt(Delta^2 + 4 g^2 |alpha|^2)) / 2,
    gamma_{e/1} = (gamma/2)(1 +- sqrt(1 - 4 |zeta|^2 / g^2)),
    cos(lambda) = Delta / sqrt(Delta^2 + 4 g^2 |alpha|^2), mu = arg(alpha)
    (mu = 0 at alpha = 0, where the angle is inert).
    """
    g = params.g
    Delta = params.Delta
    root = np.sqrt(Delta**2 + 4.0 * g**2 * abs(alpha) ** 2)
    zeta = g**2 * alpha / root if root > 0 else 0.0j
    disc = np.sqrt(max(0.0, 1.0 - 4.0 * abs(zeta) ** 2 / g**2))
    gamma_e = 0.5 * params.gamma * (1.0 + disc)
    gamma_1 = 0.5 * params.gamma * (1.0 - disc)
    eps_e = 0.5 * (Delta + root)
    eps_1 = 0.5 * (Delta - root)
    lam = np.arccos(np.clip(Delta / root, -1.0, 1.0)) if root > 0 else 0.0
    mu = float(np.angle(alpha)) if alpha != 0 else 0.0
    return EffectiveDriveParams(complex(zeta), float(eps_1), float(eps_e),
                                float(gamma_1), float(gamma_e), float(lam), mu)


# ------------------------------------------------------------------
# analytic lossy channel
# ------------------------------------------------------------------

@dataclass
class ChannelSolution:
    """Closed-form solution of the effective-model channel."""

    t_grid: np.ndarray
    beta: np.ndarray          # shape (N+1, nt)
    phi: np.ndarray           # final (N+1, N+1) phases
    channel: DiagonalChannel
    gamma1_integral: float

    def beta_final(self) -> np.ndarray:
        return self.beta[:, -1]


def _gamma1_of_zeta(abs_zeta2: np.ndarray, gamma: float, finite_Delta: bool,
                    g: float = 1.0) -> np.ndarray:
    if not finite_Delta:
        return gamma * abs_zeta2 / g**2
    under = np.clip(1.0 - 4.0 * abs_zeta2 / g**2, 0.0, None)
    return 0.5 * gamma * (1.0 - np.sqrt(under))


def _auto_grid(duration: float, delta: float, n_points: int | None) -> np.ndarray:
    if n_points is None:
        per_unit = 60.0 * max(1.0, delta)
        n_points = int(min(2_000_000, max(4001, np.ceil(duration * per_unit))))
    if n_points % 2 == 0:
        n_points += 1  # Simpson prefers an odd point count
    return np.linspace(0.0, duration, n_points)


def solve_channel_a(design: GeometricPulseDesign, params: SystemParams,
                    Delta: float | None = None,
                    n_points: int | None = None) -> ChannelSolution:
    """Exact channel of the effective model for a given trajectory design.

    beta_n(t) is obtained from the driven damped-oscillator solution

        beta_n(t) = -i n e^{-p t} int_0^t zeta(t') e^{p t'} dt',
        p = i delta + kappa / 2,

    evaluated with a cumulative Simpson rule (chunked so the exponential
    weights stay bounded), and the accumulated phases reduce to the
    sector integrals I_n = int zeta* beta_n dt:

        phi_nm = (m - n)(conj(I_m) + I_n) + i (m + n) G / 2,
        G = int gamma_1 dt.

    With Delta = None (the Delta -> infinity limit) gamma_1 is the
    small-zeta form gamma |zeta|^2 / g^2; at finite Delta the exact
    dressed split (gamma/2)(1 - sqrt(1 - 4|zeta|^2/g^2)) is used.
    """
    N = params.n_qubits
    delta, kappa, gamma = params.delta, params.kappa, params.gamma
    t = _auto_grid(design.duration, delta, n_points)
    zeta = np.asarray(design.zeta(t), dtype=complex)
    p = 1j * delta + 0.5 * kappa

    # E(t) = int_0^t zeta(t') e^{-p(t - t')} dt', computed chunk-wise so the
    # exponential weights stay bounded even for kappa * T >> 1
    ew = np.empty_like(zeta)
    dtg = t[1] - t[0]
    per_chunk = t.size if kappa <= 0 else max(3, int(60.0 / (kappa * dtg)))
    start = 0
    e_start = 0.0 + 0.0j
    while start < t.size - 1:
        stop = min(t.size, start + per_chunk)
        rel = t[start:stop] - t[start]
        w = np.exp(p * rel)
        seg = zeta[start:stop] * w
        cum = cumulative_simpson(seg.real, x=rel, initial=0.0) \
            + 1j * cumulative_simpson(seg.imag, x=rel, initial=0.0)
        ew[start:stop] = (e_start + cum) / w
        e_start = ew[stop - 1]
        start = stop - 1  # chunks share their boundary node
    ew[0] = 0.0
    nvec = np.arange(N + 1, dtype=float)
    beta = -1j * nvec[:, None] * ew[None, :]

    abs_zeta2 = np.abs(zeta) ** 2
    gamma1_t = _gamma1_of_zeta(abs_zeta2, gamma, finite_Delta=Delta is not None)
    g_int = float(simpson(gamma1_t, x=t))

    conj_zeta = np.conj(zeta)
    i_n = np.array([complex(simpson(np.real(conj_zeta * beta[n]), x=t)
                            + 1j * simpson(np.imag(conj_zeta * beta[n]), x=t))
                    for n in range(N + 1)])
    nn = nvec[:, None]
    mm = nvec[None, :]
    phi = (mm - nn) * (np.conj(i_n)[None, :] + i_n[:, None]) \
        + 0.5j * (mm + nn) * g_int
    channel = DiagonalChannel(N, phi)
    return ChannelSolution(t, beta, phi, channel, g_int)


# ------------------------------------------------------------------
# asymptotics and working-point optimization
# ------------------------------------------------------------------

def optimal_delta_a(n_qubits: int, gamma: float, kappa: float,
                    g: float = 1.0) -> float:
    """Detuning minimizing the asymptotic infidelity trade-off."""
    if gamma <= 0 or kappa <= 0:
        raise ValueError("optimal delta needs gamma, kappa > 0")
    return float(np.sqrt(kappa / (2.0 * (1.0 + 2.0**-n_qubits) * gamma)) * g)


def asymptotic_infidelity_a(n_qubits: int, theta: float,
                            cooperativity: float | None = None,
                            delta: float | None = None,
                            gamma: float | None = None,
                            kappa: float | None = None,
                            g: float = 1.0) -> float:
    """Closed-form long-pulse infidelity of the geometric gate.

    With only the cooperativity given, the detuning-optimized form

        1 - F = N theta / sqrt(2 (1 + 2^-N) C)

    is returned.  Supplying (delta, gamma, kappa) evaluates the general
    trade-off

        1 - F = (kappa / (4 (1 + 2^-N) delta) + gamma delta / (2 g^2)) N theta.
    """
    corr = 1.0 + 2.0**-n_qubits
    if delta is not None:
        if gamma is None or kappa is None:
            raise ValueError("delta form needs gamma and kappa")
        return float((kappa / (4.0 * corr * delta)
                      + gamma * delta / (2.0 * g**2)) * n_qubits * theta)
    if cooperativity is None or cooperativity <= 0:
        raise ValueError("cooperativity must be positive")
    return float(n_qubits * theta / np.sqrt(2.0 * corr * cooperativity))


def protocol_a_infidelity(channel: DiagonalChannel, theta: float,
                          mode: str = "exact") -> float:
    """1 - average gate fidelity against the ideal exp(i theta n^2)."""
    target = target_unitary_a(channel.n_qubits, theta, mode)
    return 1.0 - average_gate_fidelity_diagonal(channel, target)


def optimize_delta_a(theta: float, duration: float, params: SystemParams,
                     bounds: tuple[float, float] = (0.01, 2.0),
                     Delta: float | None = None,
                     n_points: int | None = None,
                     xtol: float = 1e-4):
    """Golden-section search of the analytic-channel infidelity over delta.

    The search window is intersected with the sin^2 feasibility interval
    (with a small safety margin on the invertibility bound).  Returns
    (delta_opt, infidelity_opt).
    """
    feas = feasible_delta_interval(theta, duration)
    lo = max(bounds[0], feas[0] * 1.02 + 1e-9)
    hi = min(bounds[1], feas[1] * 0.98)
    if hi <= lo:
        raise InfeasiblePulseError(
            f"no feasible delta inside bounds {bounds} at T g = {duration}"
        )

    def objective(d):
        design = design_pulse_a(theta, d, duration)
        sol = solve_channel_a(design, params.replace(delta=d), Delta, n_points)
        return protocol_a_infidelity(sol.channel, theta)

    res = minimize_scalar(objective, bounds=(lo, hi), method="bounded",
                          options={"xatol": xtol})
    return float(res.x), float(res.fun)


# ------------------------------------------------------------------
# full displaced-frame simulation
# ------------------------------------------------------------------

def simulate_protocol_a(design: GeometricPulseDesign, params: SystemParams,
                        Delta: float | None = None, eta_cap: float | None = None,
                        step_opts: StepOptions | None = None) -> DiagonalChannel:
    """Full-model channel from the displaced-frame Lindblad evolution.

    The displaced frame is an exact transformation of the lab frame with
    the same jump operator but O(1) photon occupation, so the default
    Fock cutoff stays small.  Delta may be given directly or calibrated
    from a drive cap max|eta| = eta_cap.  The single-qubit frequency
    shift (dressed energy of |1>) is not removed here; compare the
    returned channel in "up-to-local" mode.
    """
    if Delta is None:
        if eta_cap is None:
            raise ValueError("give either Delta or eta_cap")
        Delta = calibrate_Delta(design, eta_cap, params)
    from ._simcore import (channel_phi_from_final, reduced_space,
                           superposition_initial)
    from .params import FockCutoffError

    alpha, _ = invert_to_alpha(design, Delta)
    n_extra = 0
    while True:
        # frame rotating at delta (a+a + n_e): the cavity ladder drops out
        # of the diagonal, the exchange coupling stays static, and the
        # qubit drive picks up the explicit exp(-i delta t) coefficient.
        # Computational elements of tr_cav rho are frame invariant.
        work = params.replace(Delta=Delta, delta=design.delta,
                              fock_cutoff=params.fock_cutoff + n_extra)
        space = reduced_space(work)
        delta = design.delta
        static = (work.Delta - delta - 0.5j * work.gamma) * space.ne \
            + work.g * (space.a_dag @ space.sm + space.a @ space.sp)
        if work.extra_one_decay:
            static = static - 0.5j * work.extra_one_decay * space.n1

        def h_of_t(t):
            al = alpha(t) * np.exp(1j * delta * t)
            return static - work.g * (np.conj(al) * space.sm + al * space.sp)

        rho0 = superposition_initial(space, "displaced-frame")
        alpha_max = float(np.max(np.abs(alpha(design.t_grid))))
        freq = max(np.sqrt((Delta - delta)**2
                           + 4.0 * work.g**2 * alpha_max**2),
                   abs(delta), 1.0)
        opts = step_opts or StepOptions(h0=min(0.35 / freq, 0.02), tol=2e-4)
        try:
            rho_t = evolve_master_equation(h_of_t, work.kappa, rho0,
                                           design.duration, opts)
            break
        except FockCutoffError:
            if n_extra >= 16:
                raise
            n_extra += 4
    phi, leak = channel_phi_from_final(rho_t, space)
    meta = dict(Delta=Delta, delta=design.delta, duration=design.duration,
                fock_cutoff=work.fock_cutoff,
                rk4_step=rho_t.meta.get("rk4_step"))
    return DiagonalChannel(work.n_qubits, phi, leak, meta)


# ------------------------------------------------------------------
# coupling inhomogeneity
# ------------------------------------------------------------------

def inhomogeneity_bound_a(n_qubits: int, theta: float, var_g2: float,
                          g_bar: float = 1.0) -> float:
    """Mean-infidelity bound N^2 (N+3) theta^2 Var[g^2] / (2 gbar^4)."""
    if var_g2 < 0:
        raise ValueError("variance must be >= 0")
    return float(n_qubits**2 * (n_qubits + 3) * theta**2 * var_g2
                 / (2.0 * g_bar**4))


def monte_carlo_inhomogeneity_a(n_qubits: int, theta: float, sampler,
                                n_samples: int = 1000, g_bar: float = 1.0,
                                rng=None) -> float:
    """Mean infidelity over sampled couplings in the long-pulse limit.

    Each draw produces per-qubit couplings g_j; the realized unitary has
    exact phases phi_q = (sum_j q_j g_j^2)^2 theta / gbar^4, compared to
    the ideal n^2 theta via the diagonal-unitary average fidelity.
    ``sampler(rng, n_qubits)`` must return the g_j^2 values.
    """
    rng = np.random.default_rng(rng)
    N = n_qubits
    qmat = np.array([[(q >> j) & 1 for j in range(N)] for q in range(2**N)],
                    dtype=float)
    nvec = qmat.sum(axis=1)
    total = 0.0
    for _ in range(n_samples):
        g2 = np.asarray(sampler(rng, N), dtype=float)
        phi_q = (qmat @ g2) ** 2 * theta / g_bar**4
        errors = phi_q - nvec**2 * theta
        total += 1.0 - unitary_average_fidelity(errors, N)
    return total / n_samples
