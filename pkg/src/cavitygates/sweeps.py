"""Deterministic sweep execution and the CSV output contract.

One row per parameter point with the fixed column order

    protocol, N, C, gamma_over_kappa, Tg, delta, Delta,
    infidelity_analytic, infidelity_simulated

written as 17-significant-digit decimals so the plotting layer can
round-trip values losslessly.  Rows are sorted by their key columns
before writing, which makes the bytes independent of evaluation order
(and hence of the parallelism degree).
"""

from __future__ import annotations

import concurrent.futures
import io
import os
from dataclasses import dataclass, field

import numpy as np

__all__ = ["CSV_COLUMNS", "SweepSpec", "Row", "format_float", "rows_to_csv",
           "run_sweep", "thread_count"]

CSV_COLUMNS = ("protocol", "N", "C", "gamma_over_kappa", "Tg", "delta",
               "Delta", "infidelity_analytic", "infidelity_simulated")

THREADS_ENV = "CAVITYGATES_THREADS"


def thread_count(explicit: int | None = None) -> int:
    if explicit is not None and explicit > 0:
        return explicit
    env = os.environ.get(THREADS_ENV, "")
    try:
        n = int(env)
        return n if n > 0 else 1
    except ValueError:
        return 1


def format_float(x) -> str:
    if x is None:
        return "nan"
    return f"{float(x):.17g}"


@dataclass(frozen=True)
class Row:
    protocol: str
    n_qubits: int
    cooperativity: float
    gamma_over_kappa: float
    tg: float
    delta: float
    Delta: float
    infidelity_analytic: float
    infidelity_simulated: float

    def key(self):
        return (self.protocol, self.n_qubits, self.cooperativity,
                self.gamma_over_kappa, self.tg, self.delta, self.Delta)

    def to_csv_fields(self):
        return (self.protocol, str(self.n_qubits),
                format_float(self.cooperativity),
                format_float(self.gamma_over_kappa), format_float(self.tg),
                format_float(self.delta), format_float(self.Delta),
                format_float(self.infidelity_analytic),
                format_float(self.infidelity_simulated))


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(CSV_COLUMNS) + "\n")
    for row in sorted(rows, key=lambda r: r.key()):
        buf.write(",".join(row.to_csv_fields()) + "\n")
    return buf.getvalue()


@dataclass
class SweepSpec:
    """A list of independent work items evaluated by a shared function.

    points are opaque hashable descriptors handed to ``evaluate``; the
    seed feeds any stochastic sub-steps so a fixed (spec, seed) pair
    produces byte-identical CSV output at any parallelism degree.
    """

    points: list
    evaluate: object = field(repr=False)
    seed: int = 0
    parallelism: int | None = None

    def run(self):
        workers = thread_count(self.parallelism)
        if workers <= 1 or len(self.points) <= 1:
            results = [self.evaluate(p, self.seed) for p in self.points]
        else:
            with concurrent.futures.ThreadPoolExecutor(workers) as pool:
                results = list(pool.map(
                    lambda p: self.evaluate(p, self.seed), self.points))
        rows = []
        for r in results:
            rows.extend(r if isinstance(r, (list, tuple)) else [r])
        return rows


def run_sweep(spec: SweepSpec) -> str:
    return rows_to_csv(spec.run())
