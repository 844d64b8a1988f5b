"""Fixed-step RK4 integration of the Lindblad master equation.

The equation of motion is

    rho' = -i H rho + i rho H+  +  kappa (a rho a+ - {a+a, rho}/2)

with a single jump operator sqrt(kappa) a on the cavity and a possibly
non-hermitian H (excited-state decay enters as -i gamma/2 n_e, i.e. pure
leakage, so the trace is non-increasing).

The integrator is deliberately a plain fixed-step fourth-order
Runge-Kutta scheme: the drives are smooth, dimensions are modest, and a
deterministic scheme keeps sweep outputs byte-reproducible.  Accuracy is
controlled by halving the step until two successive runs agree in
max-norm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import ConvergenceError, DensityOperator, FockCutoffError

__all__ = ["StepOptions", "evolve_master_equation"]


@dataclass(frozen=True)
class StepOptions:
    """Controls for the RK4 + step-halving integrator.

    h0 is the initial step, tol the max-norm agreement between runs at h
    and h/2, max_halvings the number of refinements tried before giving
    up.  fock_tol is the top-Fock-level population above which the run is
    aborted (cutoff too small for the dynamics).
    """

    h0: float = 0.02
    tol: float = 1e-6
    max_halvings: int = 8
    fock_tol: float = 1e-6
    check_every: int = 200
    check_fock: bool = True


def _cavity_weights(n_max: int):
    return np.sqrt(np.arange(1.0, n_max + 1.0))


def _make_rhs(hamiltonian_of_t, kappa, n_max, dq, hermitian):
    """Right-hand side acting on rho reshaped as (n_max+1, dq, n_max+1, dq).

    For hermitian rho the coherent part needs a single dense matmul,
    since rho H+ = (H rho)+; the jump terms are applied by index shifts
    on the cavity axes.
    """
    w = _cavity_weights(n_max)
    nvec = np.arange(n_max + 1.0)

    def rhs(t, rho, h_t=None):
        h = hamiltonian_of_t(t) if h_t is None else h_t
        m = h @ rho
        if hermitian:
            out = -1j * (m - m.conj().T)
        else:
            out = -1j * (m - rho @ h.conj().T)
        if kappa:
            r4 = rho.reshape(n_max + 1, dq, n_max + 1, dq)
            jump = np.einsum(
                "n,m,nimj->nimj", w, w, r4[1:, :, 1:, :], optimize=True
            ) if n_max > 0 else 0.0
            d4 = np.zeros_like(r4)
            if n_max > 0:
                d4[:-1, :, :-1, :] = jump
            d4 -= 0.5 * (nvec[:, None, None, None] + nvec[None, None, :, None]) * r4
            out = out + kappa * d4.reshape(rho.shape)
        return out

    return rhs


def _run_fixed(hamiltonian_of_t, kappa, rho0, duration, h, n_max, dq,
               fock_tol, check_every, check_fock, observer=None,
               hermitian=True):
    n_steps = max(1, int(np.ceil(duration / h)))
    dt = duration / n_steps
    rhs = _make_rhs(hamiltonian_of_t, kappa, n_max, dq, hermitian)
    rho = rho0.copy()
    t = 0.0
    for step in range(n_steps):
        k1 = rhs(t, rho)
        k2 = rhs(t + 0.5 * dt, rho + 0.5 * dt * k1)
        k3 = rhs(t + 0.5 * dt, rho + 0.5 * dt * k2)
        k4 = rhs(t + dt, rho + dt * k3)
        rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t += dt
        if (step + 1) % check_every == 0 or step == n_steps - 1:
            if hermitian:
                rho = 0.5 * (rho + rho.conj().T)  # scrub hermiticity drift
            if check_fock:
                top = float(np.real(np.trace(
                    rho.reshape(n_max + 1, dq, n_max + 1, dq)[-1, :, -1, :]
                )))
                if top > fock_tol:
                    raise FockCutoffError(
                        f"top Fock level population {top:.3e} exceeds "
                        f"{fock_tol:.1e} at t = {t:.4f}",
                        time=t, population=top,
                    )
            if observer is not None:
                observer(t, rho)
    return rho


def evolve_master_equation(hamiltonian_of_t, kappa, rho0, duration,
                           step_opts: StepOptions | None = None,
                           observer=None) -> DensityOperator:
    """Integrate the master equation from a DensityOperator at t=0 to t=T.

    Parameters
    ----------
    hamiltonian_of_t : callable
        t -> dense complex matrix on the same space as rho0.  May be
        non-hermitian (leakage terms).
    kappa : float
        Cavity decay rate multiplying the jump dissipator.
    rho0 : DensityOperator
        Initial state; its fock_cutoff / n_qubits tags define the space
        factorization used by the jump terms.
    duration : float
        Final time in units 1/g.
    step_opts : StepOptions
        Step and tolerance controls.
    observer : callable, optional
        observer(t, rho_matrix) invoked at checkpoint times of the finest
        run; used by the invariant tests (trace monotonicity, positivity).

    Returns
    -------
    DensityOperator at t = duration (finest converged run).
    """
    opts = step_opts or StepOptions()
    n_max = rho0.fock_cutoff
    dq = rho0.qubit_factor
    if (n_max + 1) * dq != rho0.dim:
        raise ValueError("rho0 dimension tags inconsistent with its matrix")
    if duration < 0:
        raise ValueError("duration must be >= 0")
    if duration == 0:
        return DensityOperator(rho0.matrix.copy(), rho0.basis_tag, rho0.n_qubits,
                               n_max, rho0.qubit_levels, dict(rho0.meta))

    herm = bool(np.max(np.abs(rho0.matrix - rho0.matrix.conj().T)) < 1e-12)
    h = min(opts.h0, duration)
    prev = _run_fixed(hamiltonian_of_t, kappa, rho0.matrix, duration, h,
                      n_max, dq, opts.fock_tol, opts.check_every, opts.check_fock,
                      hermitian=herm)
    for _ in range(opts.max_halvings):
        h *= 0.5
        cur = _run_fixed(hamiltonian_of_t, kappa, rho0.matrix, duration, h,
                         n_max, dq, opts.fock_tol, opts.check_every, opts.check_fock,
                         hermitian=herm)
        diff = float(np.max(np.abs(cur - prev)))
        if diff < opts.tol:
            if observer is not None:
                _run_fixed(hamiltonian_of_t, kappa, rho0.matrix, duration, h,
                           n_max, dq, opts.fock_tol, opts.check_every,
                           opts.check_fock, observer=observer, hermitian=herm)
            return DensityOperator(cur, rho0.basis_tag, rho0.n_qubits, n_max,
                                   rho0.qubit_levels,
                                   {**rho0.meta, "rk4_step": h, "rk4_diff": diff})
        prev = cur
    raise ConvergenceError(
        f"RK4 step halving did not converge below tol={opts.tol:.1e} "
        f"after {opts.max_halvings} halvings (last diff {diff:.3e})"
    )
