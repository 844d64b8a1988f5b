"""Shared internals of the full-model protocol simulators.

Because a qubit in |0> never couples to anything (only |1> <-> |e>
exchanges with the cavity), the pattern of zeros is conserved and the
joint evolution from one representative basis state per excitation
number stays inside a small reachable subspace: sum_n 2^n qubit states
instead of 3^N.  All (n, m) channel entries are read off one evolution
of |0_cav, s><0_cav, s| with s the normalized sum of representatives.
"""

from __future__ import annotations

import numpy as np

from .hilbert import (cavity_operator, collective_lowering, destroy,
                      excited_number, one_number, qubit_basis_index,
                      qubit_operator, representative_state)
from .params import DensityOperator, SystemParams

__all__ = ["ReducedSpace", "reduced_space", "superposition_initial",
           "channel_phi_from_final"]


class ReducedSpace:
    """Operators restricted to the reachable qubit subspace."""

    def __init__(self, params: SystemParams):
        N = params.n_qubits
        n_max = params.fock_cutoff
        sel = []
        rep_pos = []
        for n in range(N + 1):
            bits, _ = representative_state(n, N)
            states = [[]]
            for b in bits:
                states = [s + [lv] for s in states
                          for lv in ((1, 2) if b else (0,))]
            idxs = sorted(qubit_basis_index(s) for s in states)
            sel.extend(idxs)
            rep_pos.append(qubit_basis_index(bits))
        sel = sorted(set(sel))
        self.sel = np.array(sel, dtype=int)
        self.rep_slot = [sel.index(r) for r in rep_pos]
        self.dq = len(sel)
        self.n_max = n_max
        self.n_qubits = N
        ix = np.ix_(self.sel, self.sel)
        a = destroy(n_max)
        eye_c = np.eye(n_max + 1, dtype=complex)
        self.n_cav = np.kron(a.conj().T @ a, np.eye(self.dq, dtype=complex))
        self.a_dag = np.kron(a.conj().T, np.eye(self.dq, dtype=complex))
        self.a = self.a_dag.conj().T
        self.sm = np.kron(eye_c, collective_lowering(N)[ix])
        self.sp = self.sm.conj().T
        self.ne = np.kron(eye_c, excited_number(N)[ix])
        self.n1 = np.kron(eye_c, one_number(N)[ix])
        self.dim = (n_max + 1) * self.dq


def reduced_space(params: SystemParams) -> ReducedSpace:
    return ReducedSpace(params)


def superposition_initial(space: ReducedSpace, basis_tag: str) -> DensityOperator:
    s = np.zeros(space.dq, dtype=complex)
    for slot in space.rep_slot:
        s[slot] = 1.0
    s /= np.sqrt(len(space.rep_slot))
    vec = np.zeros(space.dim, dtype=complex)
    vec[:space.dq] = s
    rho = np.outer(vec, vec.conj())
    out = DensityOperator(rho, basis_tag, space.n_qubits, space.n_max, 3,
                          qubit_dim=space.dq)
    return out


def channel_phi_from_final(rho: DensityOperator, space: ReducedSpace):
    """phi matrix and leakage norm read off the traced qubit operator."""
    N = space.n_qubits
    r4 = rho.matrix.reshape(space.n_max + 1, space.dq, space.n_max + 1,
                            space.dq)
    traced = (N + 1.0) * np.einsum("nanb->ab", r4)
    phi = np.zeros((N + 1, N + 1), dtype=complex)
    expected = np.zeros_like(traced)
    for n in range(N + 1):
        for m in range(N + 1):
            coeff = traced[space.rep_slot[n], space.rep_slot[m]]
            expected[space.rep_slot[n], space.rep_slot[m]] = coeff
            val = -1j * np.log(coeff)
            if n == m:
                val = 1j * val.imag
            phi[n, m] = val
    phi = 0.5 * (phi - phi.conj().T)
    leak = float(np.linalg.norm(traced - expected))
    return phi, leak
