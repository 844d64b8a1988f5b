"""Data series behind the published-style figures, as CSV rows.

Default grids are trimmed so the whole figure suite runs in tens of
minutes on a laptop; ``dense=True`` restores publication density.  All
rows share the sweep CSV schema; synthesized-gate figures mark their
baseline series with the protocol tag "B-baseline".
"""

from __future__ import annotations

import numpy as np

from .channels import target_unitary_a
from .fidelity import average_gate_fidelity_diagonal, min_fidelity
from .params import SystemParams
from .protocol_a import (asymptotic_infidelity_a, calibrate_Delta,
                         design_pulse_a, optimize_delta_a,
                         simulate_protocol_a)
from .protocol_b import cz_design_b, flat_top_pulse, simulate_protocol_b
from .sweeps import Row, SweepSpec, rows_to_csv
from .synthesis import (cz_count_gray_code, cz_count_phase_rotation,
                        plan_channel, synthesize, target_cnz,
                        target_phase_rotation)

__all__ = ["FIGURES", "figure_rows", "figure_csv"]


def _rates(cooperativity: float, ratio: float):
    kappa = 1.0 / np.sqrt(ratio * cooperativity)
    return ratio * kappa, kappa


def _fig2a_config(dense: bool):
    if dense:
        return {"C": [1500.0, 5000.0, 15000.0],
                "ratios": [0.1, 0.3, 1.0, 10.0],
                "Tg": list(np.geomspace(10.0, 300.0, 16)),
                "sim_points": [(1500.0, 0.3, t)
                               for t in np.geomspace(20.0, 300.0, 6)],
                "eta_cap": 30.0}
    return {"C": [1500.0, 5000.0, 15000.0],
            "ratios": [0.3],
            "Tg": list(np.geomspace(10.0, 300.0, 8)),
            "sim_points": [(1500.0, 0.3, 40.0), (1500.0, 0.3, 80.0)],
            "eta_cap": 30.0}


def fig2a_rows(dense=False, seed=0, parallelism=None, config=None):
    """Geometric-gate CZ infidelity vs duration: analytic curves plus
    finite-Delta simulated points at the capped drive."""
    cfg = {**_fig2a_config(dense), **(config or {})}
    theta = np.pi / 2
    sims = {(c, r, t) for c, r, t in map(tuple, cfg["sim_points"])}
    points = [(c, r, t) for c in cfg["C"] for r in cfg["ratios"]
              for t in cfg["Tg"]] + sorted(sims)

    def evaluate(point, _seed):
        c, ratio, tg = point
        gamma, kappa = _rates(c, ratio)
        params = SystemParams(n_qubits=2, gamma=gamma, kappa=kappa,
                              fock_cutoff=8)
        delta, analytic = optimize_delta_a(theta, tg, params)
        simulated = np.nan
        big_delta = np.nan
        if point in sims:
            design = design_pulse_a(theta, delta, tg)
            big_delta = calibrate_Delta(design, cfg["eta_cap"],
                                        params.replace(delta=delta))
            channel = simulate_protocol_a(design, params, Delta=big_delta)
            simulated = 1.0 - average_gate_fidelity_diagonal(
                channel, target_unitary_a(2, theta, "up-to-local"))
        return Row("A", 2, c, ratio, tg, delta, big_delta, analytic,
                   simulated)

    return SweepSpec(points, evaluate, seed, parallelism).run()


def fig2b_rows(dense=False, seed=0, parallelism=None, config=None):
    """Asymptotic infidelity vs cooperativity with the closed-form line."""
    cfg = {"C": list(np.geomspace(1e2, 1e6, 9)) if dense
           else [500.0, 1500.0, 5000.0],
           "ratios": [0.1, 1.0, 10.0], "Tg": 2000.0}
    cfg.update(config or {})
    theta = np.pi / 2
    points = [(c, r) for c in cfg["C"] for r in cfg["ratios"]]

    def evaluate(point, _seed):
        c, ratio = point
        gamma, kappa = _rates(c, ratio)
        params = SystemParams(n_qubits=2, gamma=gamma, kappa=kappa)
        delta, simulated = optimize_delta_a(theta, cfg["Tg"], params)
        analytic = asymptotic_infidelity_a(2, theta, c)
        return Row("A", 2, c, ratio, cfg["Tg"], delta, np.nan, analytic,
                   simulated)

    return SweepSpec(points, evaluate, seed, parallelism).run()


def fig3a_rows(dense=False, seed=0, parallelism=None, config=None):
    """Adiabatic-gate CZ infidelity vs duration from the full model."""
    cfg = {"C": [1e6], "ratios": [1.0],
           "Tg": list(np.geomspace(30.0, 1000.0, 8)) if dense
           else [30.0, 100.0, 300.0, 1000.0]}
    cfg.update(config or {})
    from .channels import PhaseTarget

    target = PhaseTarget(np.array([0.0, 0.0, np.pi]), "up-to-local")
    points = [(c, r, t) for c in cfg["C"] for r in cfg["ratios"]
              for t in cfg["Tg"]]

    def evaluate(point, _seed):
        c, ratio, tg = point
        gamma, kappa = _rates(c, ratio)
        params = SystemParams(n_qubits=2, gamma=gamma, kappa=kappa,
                              fock_cutoff=4)
        des = cz_design_b(params)
        work = params.replace(delta=des.delta, Delta=des.Delta)
        pulse = flat_top_pulse(des.I, tg)
        channel = simulate_protocol_b(
            pulse, work, recalibrate_curvature=np.pi if tg < 100 else None)
        simulated = 1.0 - average_gate_fidelity_diagonal(channel, target)
        return Row("B", 2, c, ratio, tg, des.delta, des.Delta,
                   des.infidelity, simulated)

    return SweepSpec(points, evaluate, seed, parallelism).run()


def _fig3_synth_rows(kind: str, dense: bool, seed: int, parallelism, config):
    cfg = {"C": 1e6, "ratio": 1.0, "N": [2, 3, 4, 5, 6],
           "alpha": np.pi / 4}
    cfg.update(config or {})
    gamma, kappa = _rates(cfg["C"], cfg["ratio"])
    baseline_unit = cz_design_b(
        SystemParams(n_qubits=2, gamma=gamma, kappa=kappa)).infidelity

    def evaluate(n_qubits, seed_):
        params = SystemParams(n_qubits=n_qubits, gamma=gamma, kappa=kappa)
        if kind == "rotation":
            target = target_phase_rotation(cfg["alpha"], n_qubits)
            plan = synthesize(target, params, objective_mode="average")
            channel = plan_channel(plan, params)
            value = 1.0 - average_gate_fidelity_diagonal(channel, plan.target)
            count = cz_count_phase_rotation(n_qubits)
        else:
            target = target_cnz(n_qubits)
            plan = synthesize(target, params, objective_mode="uniform")
            channel = plan_channel(plan, params)
            value = 1.0 - min_fidelity(channel, plan.target, seed=seed_)
            count = cz_count_gray_code(n_qubits)
        base = count * baseline_unit
        return [Row("B", n_qubits, cfg["C"], cfg["ratio"], np.nan, np.nan,
                    np.nan, value, np.nan),
                Row("B-baseline", n_qubits, cfg["C"], cfg["ratio"], np.nan,
                    np.nan, np.nan, base, np.nan)]

    return SweepSpec(cfg["N"], evaluate, seed, parallelism).run()


def fig3b_rows(dense=False, seed=0, parallelism=None, config=None):
    """Phase-rotation synthesis infidelity vs register size + baseline."""
    return _fig3_synth_rows("rotation", dense, seed, parallelism, config)


def fig3c_rows(dense=False, seed=0, parallelism=None, config=None):
    """Multi-controlled-Z worst-case infidelity vs register size."""
    return _fig3_synth_rows("cnz", dense, seed, parallelism, config)


FIGURES = {
    "fig2a": fig2a_rows,
    "fig2b": fig2b_rows,
    "fig3a": fig3a_rows,
    "fig3b": fig3b_rows,
    "fig3c": fig3c_rows,
}


def figure_rows(name: str, dense=False, seed=0, parallelism=None, config=None):
    try:
        fn = FIGURES[name]
    except KeyError:
        raise KeyError(f"unknown figure {name!r}; known: {sorted(FIGURES)}")
    return fn(dense=dense, seed=seed, parallelism=parallelism, config=config)


def figure_csv(name: str, dense=False, seed=0, parallelism=None, config=None) -> str:
    return rows_to_csv(figure_rows(name, dense, seed, parallelism, config))
