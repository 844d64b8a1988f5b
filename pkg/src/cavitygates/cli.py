"""Command-line entry point.

Subcommands: figure, sweep, synthesize, estimate, ghz, selftest.  CSV
and JSON outputs are deterministic for a fixed seed and configuration;
the CAVITYGATES_THREADS environment variable (or --threads) sets the
sweep parallelism without changing the bytes.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

__all__ = ["main", "build_parser"]

_TIME_UNITS = {"ns": 1e-9, "us": 1e-6, "ms": 1e-3, "s": 1.0}


def parse_time(text: str) -> float:
    """Duration in seconds from strings like '640ns', '80us', '1.5e-6'."""
    t = text.strip().lower().replace("µs", "us")
    for suffix, scale in sorted(_TIME_UNITS.items(), key=lambda kv: -len(kv[0])):
        if t.endswith(suffix):
            return float(t[:-len(suffix)]) * scale
    return float(t)


def parse_frequency(text: str) -> float:
    """Angular frequency (rad/s) from '30MHz', '1.2GHz' (read as
    2 pi x value) or a bare number in rad/s."""
    t = text.strip().lower()
    for suffix, scale in (("ghz", 1e9), ("mhz", 1e6), ("khz", 1e3), ("hz", 1.0)):
        if t.endswith(suffix):
            return 2.0 * np.pi * float(t[:-len(suffix)]) * scale
    return float(t)


def _write_text(path: str | None, text: str):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _emit_json(path, payload):
    _write_text(path, json.dumps(payload, indent=2, sort_keys=True,
                                 default=float) + "\n")


def cmd_figure(args) -> int:
    from .figures import figure_csv

    config = json.load(open(args.config)) if args.config else None
    csv_text = figure_csv(args.name, dense=args.dense, seed=args.seed,
                          parallelism=args.threads, config=config)
    _write_text(args.out, csv_text)
    return 0


def cmd_sweep(args) -> int:
    from .figures import fig2a_rows
    from .sweeps import rows_to_csv

    config = {
        "C": [float(x) for x in args.C],
        "ratios": [float(x) for x in args.ratio],
        "Tg": [float(x) for x in args.Tg],
        "sim_points": [],
        "eta_cap": args.eta_cap,
    }
    if args.simulate:
        config["sim_points"] = [(c, r, t) for c in config["C"]
                                for r in config["ratios"]
                                for t in config["Tg"]]
    rows = fig2a_rows(seed=args.seed, parallelism=args.threads, config=config)
    _write_text(args.out, rows_to_csv(rows))
    return 0


def cmd_synthesize(args) -> int:
    from .params import SystemParams
    from .synthesis import (SynthesisGrid, synthesize, target_cnz,
                            target_phase_rotation)

    if args.target == "cnz":
        target = target_cnz(args.n, mode=args.mode)
        objective = "uniform"
    elif args.target == "phase-rotation":
        target = target_phase_rotation(args.alpha, args.n, mode=args.mode)
        objective = "average"
    else:  # custom phase vector
        phases = np.array([float(x) for x in args.phases.split(",")])
        from .channels import PhaseTarget

        target = PhaseTarget(phases, mode=args.mode)
        objective = "average"
    kappa = 1.0 / np.sqrt(args.ratio * args.C)
    params = SystemParams(n_qubits=target.n_qubits, gamma=args.ratio * kappa,
                          kappa=kappa)
    grid = SynthesisGrid(k=args.k)
    plan = synthesize(target, params, grid=grid, objective_mode=objective)
    payload = plan.to_dict()
    payload["cooperativity"] = args.C
    payload["gamma_over_kappa"] = args.ratio
    payload["objective_mode"] = objective
    _emit_json(args.out, payload)
    return 0


_PLATFORM_POINTS = {
    # per-platform default (delta/g, Delta rad/s) finite-duration points
    "fluxonium": {"delta": 13.0 / 10.0, "Delta": 2 * np.pi * 30e6},
    "polar_molecule": {"delta": None, "Delta": 2 * np.pi * 1.2e6},
    "rydberg_microwave": {"delta": None, "Delta": 2 * np.pi * 400e6},
    "rb_optical": {"delta": None, "Delta": None},
}


def cmd_estimate(args) -> int:
    from .platforms import estimate_gate

    duration = None if args.asymptotic or args.T is None else parse_time(args.T)
    point = _PLATFORM_POINTS.get(args.platform, {})
    big_delta = parse_frequency(args.Delta) if args.Delta else point.get("Delta")
    delta = args.delta if args.delta is not None else (
        point.get("delta") if duration is not None else None)
    optimize_duration = (args.platform == "rydberg_microwave"
                         and duration is None and not args.asymptotic)
    est = estimate_gate(args.platform, args.protocol, duration=duration,
                        Delta=big_delta, n_qubits=args.n, delta=delta,
                        simulate=args.simulate,
                        optimize_duration=optimize_duration)
    payload = est.to_dict()
    if "t2_star" in payload["contributions"]:
        payload["t2_star_contribution"] = payload["contributions"]["t2_star"]
    _emit_json(args.out, payload)
    return 0


def cmd_ghz(args) -> int:
    from .ghz import ghz_fidelity
    from .platforms import ghz_estimate

    if args.platform:
        if args.T is None:
            raise SystemExit("ghz --platform needs --T")
        payload = ghz_estimate(args.platform, args.n, parse_time(args.T))
    else:
        payload = {"n_qubits": args.n, "ideal": True,
                   "fidelity": ghz_fidelity(args.n)}
    _emit_json(args.out, payload)
    return 0


def cmd_selftest(args) -> int:
    """Fast closed-form checks; the full acceptance suite lives in pytest."""
    from .ghz import ghz_fidelity
    from .params import SystemParams
    from .protocol_a import asymptotic_infidelity_a, design_pulse_a, \
        solve_channel_a, protocol_a_infidelity
    from .protocol_b import cz_design_b, perturbative_phase

    checks = []
    coef = asymptotic_infidelity_a(2, np.pi / 2, 1e4) * 100.0
    checks.append(("asymptotic coefficient 1.99", abs(coef - 1.99) < 0.005))
    des = cz_design_b(SystemParams(n_qubits=2, gamma=1e-3, kappa=1e-3))
    checks.append(("adiabatic CZ optimum delta 0.529",
                   abs(des.delta - 0.529) < 0.011))
    checks.append(("adiabatic CZ optimum Delta -2.09",
                   abs(des.Delta + 2.09) < 0.042))
    checks.append(("adiabatic CZ 1.79/sqrt(C)",
                   abs(des.infidelity * 1e3 - 1.79) < 0.04))
    checks.append(("perturbative phase pole structure",
                   abs(perturbative_phase(1, 1.0, 1.0, 2.0) + 2.0) < 1e-12))
    params = SystemParams(n_qubits=2, delta=0.8)
    sol = solve_channel_a(design_pulse_a(np.pi / 2, 0.8, 40.0), params)
    checks.append(("loss-free geometric channel",
                   protocol_a_infidelity(sol.channel, np.pi / 2) < 1e-8))
    checks.append(("GHZ construction exact",
                   all(abs(ghz_fidelity(n) - 1.0) < 1e-10
                       for n in range(2, 7))))
    failed = 0
    for name, ok in checks:
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
        failed += 0 if ok else 1
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="cavitygates",
        description="Cavity-mediated multi-qubit gate laboratory",
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None,
                   help="sweep parallelism (or CAVITYGATES_THREADS)")
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("figure", help="emit the data series behind a figure")
    f.add_argument("name", choices=["fig2a", "fig2b", "fig3a", "fig3b",
                                    "fig3c"])
    f.add_argument("--out", default="-")
    f.add_argument("--dense", action="store_true")
    f.add_argument("--config", default=None, help="JSON grid overrides")
    f.set_defaults(fn=cmd_figure)

    s = sub.add_parser("sweep", help="protocol-A sweep over (C, ratio, T)")
    s.add_argument("--C", nargs="+", required=True)
    s.add_argument("--ratio", nargs="+", required=True)
    s.add_argument("--Tg", nargs="+", required=True)
    s.add_argument("--eta-cap", type=float, default=30.0)
    s.add_argument("--simulate", action="store_true")
    s.add_argument("--out", default="-")
    s.set_defaults(fn=cmd_sweep)

    y = sub.add_parser("synthesize", help="pulse sequence for a phase gate")
    y.add_argument("--target", choices=["cnz", "phase-rotation", "custom"],
                   required=True)
    y.add_argument("--n", type=int, required=True)
    y.add_argument("--alpha", type=float, default=np.pi / 4)
    y.add_argument("--phases", default=None,
                   help="comma list for --target custom")
    y.add_argument("--mode", choices=["exact", "up-to-local"],
                   default="up-to-local")
    y.add_argument("--C", type=float, default=1e6)
    y.add_argument("--ratio", type=float, default=1.0)
    y.add_argument("--k", type=int, default=33)
    y.add_argument("--out", default="-")
    y.set_defaults(fn=cmd_synthesize)

    e = sub.add_parser("estimate", help="platform infidelity estimate")
    e.add_argument("platform", choices=["rb_optical", "rydberg_microwave",
                                        "polar_molecule", "fluxonium"])
    e.add_argument("--protocol", choices=["A", "B"], required=True)
    e.add_argument("--T", default=None, help="duration, e.g. 640ns or 80us")
    e.add_argument("--asymptotic", action="store_true")
    e.add_argument("--Delta", default=None,
                   help="drive-transition detuning, e.g. 30MHz (as 2pi x)")
    e.add_argument("--delta", type=float, default=None,
                   help="drive-cavity detuning in units of g")
    e.add_argument("--n", type=int, default=2)
    e.add_argument("--simulate", action="store_true",
                   help="full Lindblad model instead of analytic channel")
    e.add_argument("--out", default="-")
    e.set_defaults(fn=cmd_estimate)

    z = sub.add_parser("ghz", help="GHZ preparation fidelity")
    z.add_argument("--n", type=int, required=True)
    z.add_argument("--platform", default=None)
    z.add_argument("--T", default=None)
    z.add_argument("--out", default="-")
    z.set_defaults(fn=cmd_ghz)

    t = sub.add_parser("selftest", help="fast closed-form checks")
    t.set_defaults(fn=cmd_selftest)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
