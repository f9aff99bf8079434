"""Command-line front end.

Subcommands render the solver outputs as CSV (curves) or JSON (solver
reports). All decibel-to-linear conversion happens here; the library works
in linear units only. A run manifest (JSON) is written next to every
``--out`` file so a run can be reproduced exactly.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import sys
import time

import numpy as np

from . import __version__
from .config import Detector, ReceiverKind, SystemConfig
from .fixedpoint import NoConvergence, SolverSpec, data_fixed_point
from .simo import DEFAULT_QUAD, QuadratureSpec, SimoContext, ser_large_system
from .simulate import McConfig, Spreading, run_ser
from .spectral import optimize_tau, spectral_efficiency
from .training import solve_training

RECEIVER_NAMES = {kind.value: kind for kind in ReceiverKind}


def _scalar(value):
    return value[0] if isinstance(value, list) else value


def _build_config(args, tau: int) -> SystemConfig:
    return SystemConfig.from_snr_db(
        beta=args.beta,
        m=_scalar(args.m),
        n=_scalar(args.n),
        snr_db=_scalar(args.snr_db),
        tc=args.tc,
        tau=tau,
    )


def _quad(args) -> QuadratureSpec:
    return QuadratureSpec(args.quad_nodes, args.quad_nodes)


def _receivers(args) -> list:
    names = [r.strip() for r in args.receivers.split(",") if r.strip()]
    unknown = [r for r in names if r not in RECEIVER_NAMES]
    if unknown:
        raise SystemExit(f"unknown receivers: {unknown}; choose from {sorted(RECEIVER_NAMES)}")
    return [RECEIVER_NAMES[r] for r in names]


def _tau_values(args) -> list:
    if args.tau is not None:
        return [args.tau]
    if args.tau_range is not None:
        lo, hi = (int(v) for v in args.tau_range.split(":"))
        return list(range(lo, hi + 1))
    return list(range(args.tc + 1))


def _write_output(text: str, args, command: str, params: dict, started: float) -> None:
    if args.out is None:
        sys.stdout.write(text)
        return
    with open(args.out, "w") as fh:
        fh.write(text)
    manifest = {
        "command": command,
        "parameters": params,
        "version": __version__,
        "seed": params.get("seed"),
        "duration_s": round(time.monotonic() - started, 3),
    }
    with open(args.out + ".manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _params(args) -> dict:
    skip = {"func", "config_file"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def _selected_sigma2(config, receiver, quad):
    """kappa = 0 fixed point of the receiver's detector, for CSV diagnostics."""
    detector = Detector.LMMSE if receiver is ReceiverKind.LMMSE else Detector.OPTIMAL
    training = solve_training(config, config.tau)
    out = data_fixed_point(config, training, 0.0, detector, quad=quad)
    return out.sigma2, len(out.candidates)


def cmd_sweep_tau(args) -> int:
    started = time.monotonic()
    quad = _quad(args)
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(
        ["receiver", "tau", "tau_over_Tc", "se_bits_per_chip", "sigma_c2_selected", "n_candidates", "error"]
    )
    failures = 0
    for receiver in _receivers(args):
        for tau in _tau_values(args):
            config = _build_config(args, tau)
            try:
                se = spectral_efficiency(config, receiver, quad=quad)
                if receiver is ReceiverKind.PERFECT_CSI_BOUND or tau == 0:
                    sigma2, n_cand = float("nan"), 1
                else:
                    sigma2, n_cand = _selected_sigma2(config, receiver, quad)
                writer.writerow(
                    [receiver.value, tau, tau / args.tc, f"{se:.10g}", f"{sigma2:.10g}", n_cand, ""]
                )
            except (NoConvergence, ValueError) as err:
                failures += 1
                writer.writerow([receiver.value, tau, tau / args.tc, "", "", "", str(err)])
    _write_output(buf.getvalue(), args, "sweep-tau", _params(args), started)
    return 1 if failures else 0


def cmd_fixed_point(args) -> int:
    started = time.monotonic()
    config = _build_config(args, args.tau if args.tau is not None else 1)
    training = solve_training(config, config.tau)
    detector = Detector(args.detector)
    try:
        out = data_fixed_point(config, training, args.kappa, detector, quad=_quad(args))
    except NoConvergence as err:
        report = {"error": str(err), "residuals": list(err.residuals)}
        _write_output(json.dumps(report, indent=2) + "\n", args, "fixed-point", _params(args), started)
        return 1
    report = {
        "sigma_tr2": training.sigma_tr2,
        "xi2": training.xi2,
        "kappa": args.kappa,
        "detector": detector.value,
        "candidates": [dataclasses.asdict(c) for c in out.candidates],
        "selected": out.selected,
    }
    _write_output(json.dumps(report, indent=2) + "\n", args, "fixed-point", _params(args), started)
    return 0


def cmd_simulate_ser(args) -> int:
    started = time.monotonic()
    tau = args.tau if args.tau is not None else 4
    m, n = _scalar(args.m), _scalar(args.n)
    snr_grid = args.snr_db if isinstance(args.snr_db, list) else [args.snr_db]
    base = SystemConfig.from_snr_db(
        beta=args.k / args.l, m=m, n=n, snr_db=snr_grid[0], tc=args.tc, tau=tau
    )
    mc = McConfig(
        k=args.k,
        l=args.l,
        config=base,
        snr_db_grid=tuple(snr_grid),
        trials=args.trials,
        seed=args.seed,
        spreading=Spreading(args.spreading),
    )
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["snr_db", "K", "L", "tau", "ser_mc", "ci95", "ser_asymptotic", "error"])
    failures = 0
    try:
        estimates = run_ser(mc)
    except (NoConvergence, ValueError) as err:
        writer.writerow(["", args.k, args.l, tau, "", "", "", str(err)])
        _write_output(buf.getvalue(), args, "simulate-ser", _params(args), started)
        return 1
    quad = _quad(args)
    for snr_db, est in zip(snr_grid, estimates):
        config = SystemConfig.from_snr_db(
            beta=args.k / args.l, m=m, n=n, snr_db=snr_db, tc=args.tc, tau=tau
        )
        try:
            training = solve_training(config, tau)
            out = data_fixed_point(config, training, 0.0, Detector.LMMSE, quad=quad)
            ctx = SimoContext(
                xi2=training.xi2, sigma2=out.sigma2, power=config.power, m=config.m, n=config.n
            )
            asymptotic = ser_large_system(ctx, quad)
            writer.writerow(
                [snr_db, args.k, args.l, tau, f"{est.p_hat:.10g}", f"{est.ci95:.10g}", f"{asymptotic:.10g}", ""]
            )
        except (NoConvergence, ValueError) as err:
            failures += 1
            writer.writerow([snr_db, args.k, args.l, tau, f"{est.p_hat:.10g}", f"{est.ci95:.10g}", "", str(err)])
    _write_output(buf.getvalue(), args, "simulate-ser", _params(args), started)
    return 1 if failures else 0


def cmd_optimize_tau(args) -> int:
    started = time.monotonic()
    quad = _quad(args)
    ms = args.m if isinstance(args.m, list) else [args.m]
    ns = args.n if isinstance(args.n, list) else [args.n]
    if len(ms) != len(ns):
        if len(ns) == 1:
            ns = ns * len(ms)
        else:
            raise SystemExit("--m and --n sweeps must have equal length")
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["M", "N", "receiver", "tau_opt", "tau_opt_over_Tc", "se_at_opt", "error"])
    failures = 0
    for m, n in zip(ms, ns):
        for receiver in _receivers(args):
            config = SystemConfig.from_snr_db(
                beta=args.beta,
                m=m,
                n=n,
                snr_db=args.snr_db[0] if isinstance(args.snr_db, list) else args.snr_db,
                tc=args.tc,
                tau=0,
            )
            try:
                tau_opt, se = optimize_tau(config, receiver, quad=quad)
                writer.writerow(
                    [m, n, receiver.value, tau_opt, tau_opt / args.tc, f"{se:.10g}", ""]
                )
            except (NoConvergence, ValueError) as err:
                failures += 1
                writer.writerow([m, n, receiver.value, "", "", "", str(err)])
    _write_output(buf.getvalue(), args, "optimize-tau", _params(args), started)
    return 1 if failures else 0


def cmd_free_energy_scan(args) -> int:
    started = time.monotonic()
    from .fixedpoint import _rhs
    from .simo import decoupled_mutual_info, free_energy

    tau = args.tau if args.tau is not None else 1
    config = _build_config(args, tau)
    training = solve_training(config, tau)
    detector = Detector(args.detector)
    quad = _quad(args)
    lo = 0.9 * config.noise_var
    hi = 1.1 * (config.noise_var + config.beta * config.power)
    grid = np.geomspace(lo, hi, args.points)
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["sigma2", "rhs", "residual", "free_energy", "error"])
    for s2 in grid:
        rhs = _rhs(s2, config, training, args.kappa, detector, quad)
        ctx = SimoContext(
            xi2=training.xi2, sigma2=float(s2), power=config.power, m=config.m, n=config.n
        )
        kap = 0.0 if detector is Detector.LMMSE else args.kappa
        fe = free_energy(ctx, kap, decoupled_mutual_info(ctx, quad), config.noise_var, config.beta)
        writer.writerow([f"{s2:.10g}", f"{rhs:.10g}", f"{rhs - s2:.10g}", f"{fe:.10g}", ""])
    _write_output(buf.getvalue(), args, "free-energy-scan", _params(args), started)
    return 0


def _coerce(value: str):
    for cast in (int, float):
        try:
            return cast(value)
        except ValueError:
            continue
    return value


def _load_config_file(path: str) -> dict:
    with open(path) as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return json.loads(text)
    values = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, raw = line.partition("=")
        values[key.strip().replace("-", "_")] = _coerce(raw.strip())
    return values


def _add_common(parser):
    parser.add_argument("--beta", type=float, default=0.5, help="load K/L")
    parser.add_argument("--m", type=int, nargs="+", default=1, help="transmit antennas")
    parser.add_argument("--n", type=int, nargs="+", default=1, help="receive antennas")
    parser.add_argument("--snr-db", type=float, nargs="+", default=6.0, help="P/N0 in dB")
    parser.add_argument("--tc", type=int, default=20, help="coherence time in symbols")
    parser.add_argument("--tau", type=int, default=None, help="pilot length")
    parser.add_argument("--tau-range", default=None, help="lo:hi inclusive pilot sweep")
    parser.add_argument(
        "--receivers",
        default=",".join(k.value for k in ReceiverKind),
        help="comma-separated subset of " + ",".join(k.value for k in ReceiverKind),
    )
    parser.add_argument("--kappa-nodes", type=int, default=33)
    parser.add_argument("--quad-nodes", type=int, default=128)
    parser.add_argument("--trials", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--spreading", choices=["qpsk", "gaussian"], default="qpsk")
    parser.add_argument("--out", default=None, help="output file (stdout if omitted)")
    parser.add_argument("--config-file", default=None, help="key=value or JSON defaults")
    parser.add_argument("--kappa", type=float, default=0.0)
    parser.add_argument("--detector", choices=["optimal", "lmmse"], default="optimal")
    parser.add_argument("--k", type=int, default=16, help="users (simulation)")
    parser.add_argument("--l", type=int, default=32, help="spreading factor (simulation)")
    parser.add_argument("--points", type=int, default=200, help="scan grid size")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="replica-cdma",
        description="Large-system spectral efficiency of trained MIMO DS-CDMA receivers",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func in (
        ("sweep-tau", cmd_sweep_tau),
        ("fixed-point", cmd_fixed_point),
        ("simulate-ser", cmd_simulate_ser),
        ("optimize-tau", cmd_optimize_tau),
        ("free-energy-scan", cmd_free_energy_scan),
    ):
        p = sub.add_parser(name)
        _add_common(p)
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    pre, _ = argparse.ArgumentParser(add_help=False), None
    pre.add_argument("--config-file", default=None)
    known, _ = pre.parse_known_args(argv)
    if known.config_file:
        defaults = _load_config_file(known.config_file)
        for p in parser._subparsers._group_actions[0].choices.values():
            p.set_defaults(**defaults)
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
