"""Command-line front end.

    pdcsim params|dynamics|scan|validate --config FILE [--out FILE]
           [--threads N] [--seed N]

``params`` prints the derived effective quantities and regime
diagnostics; ``dynamics`` writes the full-versus-effective evolution
CSV; ``scan`` sweeps the drive and writes one CSV row per
(drive, method); ``validate`` runs the invariant suite.  Exit codes:
0 success, 1 validation failure, 2 configuration error, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

from .config import RunConfig, parse_config
from .csvout import format_number, write_csv
from .dynamics import TimeGrid, default_transfer_grid, run_full_vs_effective
from .errors import ConfigError, IntegrationFailure, NumericalFailure, StepSizeError, TruncationError
from .fock import HilbertSpec, TwoModeSpec
from .model import effective_params, validate_regime
from .steady import threshold_scan
from .validate import run_validation

_SCAN_HEADER = ("eps_Hz", "eps_over_ec", "method", "var_x", "var_y", "n_b", "g2",
                "anomalous_re", "anomalous_im", "stderr", "flags")
_DYNAMICS_HEADER = ("t_s", "P_g", "n_a_full", "n_b_full", "n_a_eff", "n_b_eff", "K")


def _run_params(config: RunConfig, out) -> int:
    ep = effective_params(config.params)
    print(f"chi_Hz = {format_number(ep.chi)}", file=out)
    print(f"chi_kHz ~= {ep.chi / 1e3:.4g}", file=out)
    print(f"shift_a_Hz = {format_number(ep.shift_a)}", file=out)
    print(f"shift_b_Hz = {format_number(ep.shift_b)}", file=out)
    print(f"nu_eff_Hz = {format_number(ep.nu_eff)}", file=out)
    print(f"epsilon_c_Hz = {format_number(ep.epsilon_c)}", file=out)
    print(f"matching_residual_Hz = {format_number(ep.matching_residual)}", file=out)
    print(f"phi_eff_rad = {format_number(ep.phi_eff)}", file=out)
    diagnostics = validate_regime(config.params, config.factor)
    if not diagnostics:
        print("regime: ok", file=out)
    for diag in diagnostics:
        print(f"regime warning [{diag.check}]: {diag.message}", file=out)
    return 0


def _run_dynamics(config: RunConfig, out_path: str) -> int:
    spec = HilbertSpec(config.cutoff_a, config.cutoff_b)
    if config.t_end is not None:
        grid = TimeGrid(0.0, config.t_end, config.n_samples)
    else:
        grid = default_transfer_grid(config.params, config.n_samples)
    full, eff, summary = run_full_vs_effective(config.params, spec, grid)
    times = grid.times()
    rows = zip(times, full.channel("P_g"), full.channel("n_a"), full.channel("n_b"),
               eff.channel("n_a"), eff.channel("n_b"), full.channel("K"))
    write_csv(out_path, _DYNAMICS_HEADER, rows)
    print(f"wrote {out_path}")
    print(f"min_P_g = {format_number(summary.min_p_g)}")
    print(f"max_dev_n_b = {format_number(summary.max_dev_n_b)}")
    print(f"first_transfer_time_s = {format_number(summary.first_transfer_time_s)}")
    return 0


def _run_scan(config: RunConfig, out_path: str, threads: int | None) -> int:
    if config.eps_values is None:
        raise ConfigError("scan scenario requires key 'eps_values'")
    lindblad_spec = None
    if config.lindblad_cutoff_a is not None and config.lindblad_cutoff_b is not None:
        lindblad_spec = TwoModeSpec(config.lindblad_cutoff_a, config.lindblad_cutoff_b)
    rows = threshold_scan(
        config.params, config.eps_values, set(config.methods),
        lindblad_spec=lindblad_spec, n_traj=config.n_traj, t_max=config.t_max,
        dt=config.dt, seed=config.seed, threads=threads,
    )
    csv_rows = []
    for row in rows:
        r = row.report
        flags = list(r.flags) + ([f"error:{row.error}"] if row.error else [])
        csv_rows.append((
            row.eps_hz, row.eps_over_ec, row.method, r.var_x, r.var_y, r.n_b, r.g2,
            r.anomalous.real if r.anomalous == r.anomalous else math.nan,
            r.anomalous.imag if r.anomalous == r.anomalous else math.nan,
            r.statistical_error if r.statistical_error is not None else math.nan,
            ";".join(flags),
        ))
    write_csv(out_path, _SCAN_HEADER, csv_rows)
    print(f"wrote {out_path} ({len(csv_rows)} rows)")
    failed = [row for row in rows if row.error]
    for row in failed:
        print(f"row (eps={row.eps_hz:g}, {row.method}) failed: {row.error}", file=sys.stderr)
    return 0


def run(config: RunConfig, threads: int | None = None) -> int:
    """Execute the configured scenario; returns the process exit code."""
    try:
        if config.scenario == "params":
            return _run_params(config, sys.stdout)
        if config.scenario == "dynamics":
            return _run_dynamics(config, config.out or "dynamics.csv")
        if config.scenario == "scan":
            return _run_scan(config, config.out or "scan.csv", threads)
        if config.scenario == "validate":
            return 0 if run_validation(config.params) else 1
        raise ConfigError(f"unknown scenario {config.scenario!r}")
    except ConfigError:
        raise
    except (NumericalFailure, TruncationError, IntegrationFailure, StepSizeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="pdcsim",
        description="Parametric down-conversion simulator for a cyclic three-level "
                    "circuit-QED system",
    )
    sub = parser.add_subparsers(dest="scenario", required=True)
    for name, doc in (
        ("params", "print derived effective quantities"),
        ("dynamics", "write the full-versus-effective evolution CSV"),
        ("scan", "sweep the drive strength and write a CSV table"),
        ("validate", "run the invariant suite"),
    ):
        cmd = sub.add_parser(name, help=doc)
        cmd.add_argument("--config", required=True, help="key = value configuration file")
        cmd.add_argument("--out", default=None, help="output CSV path")
        cmd.add_argument("--threads", type=int, default=os.cpu_count(),
                         help="worker cap for trajectory ensembles")
        cmd.add_argument("--seed", type=int, default=None, help="override the configured seed")
    args = parser.parse_args(argv)

    try:
        with open(args.config, encoding="utf-8") as fh:
            config = parse_config(fh.read())
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    config.scenario = args.scenario
    if args.out is not None:
        config.out = args.out
    if args.seed is not None:
        config.seed = args.seed
    try:
        return run(config, threads=args.threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
