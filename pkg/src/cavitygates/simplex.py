"""Self-contained dense two-phase simplex solver.

Solves   min c.x   s.t.  A x = b,  x >= 0   on dense tableaus with
Bland's anti-cycling rule.  Sized for the pulse-synthesis programs of
this package (a handful of equality rows, a few hundred columns);
redundant rows are dropped during phase one with a consistency check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import CavityGatesError

__all__ = ["SimplexResult", "InfeasibleError", "UnboundedError", "simplex_solve"]

_TOL = 1e-9


class InfeasibleError(CavityGatesError):
    """The constraint system A x = b, x >= 0 has no solution."""


class UnboundedError(CavityGatesError):
    """The objective is unbounded below on the feasible set."""


@dataclass
class SimplexResult:
    x: np.ndarray
    objective: float
    basis: list
    iterations: int


def _pivot(tableau: np.ndarray, row: int, col: int):
    tableau[row] /= tableau[row, col]
    for r in range(tableau.shape[0]):
        if r != row and tableau[r, col] != 0.0:
            tableau[r] -= tableau[r, col] * tableau[row]


def _bland_iterate(tableau: np.ndarray, basis: list, allowed_cols: int,
                   max_iter: int) -> int:
    """Run Bland-rule pivots until optimal; returns the iteration count."""
    m = tableau.shape[0] - 1
    it = 0
    while True:
        cost_row = tableau[-1, :allowed_cols]
        entering = -1
        for j in range(allowed_cols):
            if cost_row[j] < -_TOL:
                entering = j
                break
        if entering < 0:
            return it
        ratios = []
        col = tableau[:m, entering]
        rhs = tableau[:m, -1]
        for i in range(m):
            if col[i] > _TOL:
                ratios.append((rhs[i] / col[i], basis[i], i))
        if not ratios:
            raise UnboundedError("no positive pivot in the entering column")
        ratios.sort(key=lambda r: (r[0], r[1]))
        leaving_row = ratios[0][2]
        _pivot(tableau, leaving_row, entering)
        basis[leaving_row] = entering
        it += 1
        if it > max_iter:
            raise CavityGatesError("simplex iteration limit exceeded")


def simplex_solve(a_eq: np.ndarray, rhs: np.ndarray, cost: np.ndarray,
                  max_iter: int = 100_000) -> SimplexResult:
    """Vertex optimum of min cost.x subject to a_eq x = rhs, x >= 0.

    Two phases: artificial variables are driven out first (phase-one
    optimum above tolerance means infeasible; zero-valued artificials
    stuck in the basis expose redundant rows, which are removed).  The
    returned solution is a basic feasible point, so its support size
    never exceeds the number of independent rows.
    """
    a = np.array(a_eq, dtype=float)
    b = np.array(rhs, dtype=float).copy()
    c = np.array(cost, dtype=float)
    if a.ndim != 2:
        raise ValueError("a_eq must be a matrix")
    m, n = a.shape
    if b.shape != (m,) or c.shape != (n,):
        raise ValueError("shape mismatch between a_eq, rhs, cost")

    neg = b < 0
    a[neg] *= -1.0
    b[neg] *= -1.0

    # phase one tableau: [A | I | b] minimizing the artificial sum
    tableau = np.zeros((m + 1, n + m + 1))
    tableau[:m, :n] = a
    tableau[:m, n:n + m] = np.eye(m)
    tableau[:m, -1] = b
    basis = list(range(n, n + m))
    tableau[-1, :n] = -a.sum(axis=0)
    tableau[-1, -1] = -b.sum()
    iters = _bland_iterate(tableau, basis, n + m, max_iter)
    phase1 = -tableau[-1, -1]
    if phase1 > 1e-7 * max(1.0, abs(b).max()):
        raise InfeasibleError(f"phase-one optimum {phase1:.3e} > 0")

    # drive zero-valued artificials out of the basis; drop redundant rows
    drop_rows = []
    for i, bi in enumerate(basis):
        if bi >= n:
            piv = np.flatnonzero(np.abs(tableau[i, :n]) > _TOL)
            if piv.size:
                _pivot(tableau, i, int(piv[0]))
                basis[i] = int(piv[0])
            else:
                drop_rows.append(i)
    if drop_rows:
        keep = [i for i in range(m) if i not in drop_rows]
        tableau = tableau[keep + [m]]
        basis = [basis[i] for i in keep]
        m = len(keep)

    # phase two on the original costs
    tableau = np.hstack([tableau[:, :n], tableau[:, -1:]])
    z = np.zeros(n + 1)
    z[:n] = c
    for i, bi in enumerate(basis):
        z -= c[bi] * tableau[i]
    tableau = np.vstack([tableau[:m], z])
    iters += _bland_iterate(tableau, basis, n, max_iter)

    x = np.zeros(n)
    for i, bi in enumerate(basis):
        x[bi] = tableau[i, -1]
    x[np.abs(x) < 1e-12] = 0.0
    return SimplexResult(x, float(c @ x), list(basis), iters)
