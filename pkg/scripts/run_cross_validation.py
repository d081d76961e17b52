#!/usr/bin/env python3
"""Cross-validate the linearized steady state against the full solvers.

At desk-scale parameters (chi comparable to the decay rates, so the
Fock truncation stays small) this compares, per drive point, the
linearized variances and closure g2 against the exact Lindblad steady
state and against truncated-Wigner trajectories.
"""

import argparse
import time

from pdcsim import (
    adequate_cutoffs,
    effective_params,
    lindblad_steady_state,
    linearized_g2,
    linearized_variances,
    scaled_params,
    sde_trajectories,
)
from pdcsim.trajectories import default_horizon, default_step


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ratios", type=float, nargs="+", default=[0.2, 0.3, 0.5])
    ap.add_argument("--chi-over-gamma-b", type=float, default=0.2)
    ap.add_argument("--n-traj", type=int, default=4000)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--skip-sde", action="store_true")
    args = ap.parse_args()

    p = scaled_params(chi_over_gamma_b=args.chi_over_gamma_b)
    ec = effective_params(p).epsilon_c
    print(f"desk parameters: gamma_a = {p.gamma_a} Hz, gamma_b = {p.gamma_b} Hz, "
          f"chi = {effective_params(p).chi:.4g} Hz, threshold = {ec:.4g} Hz")
    header = f"{'eps/ec':>7} {'quantity':>8} {'linearized':>12} {'lindblad':>12}"
    if not args.skip_sde:
        header += f" {'sde':>12} {'sde err':>9}"
    print(header)
    for ratio in args.ratios:
        eps = ratio * ec
        var_x, var_y = linearized_variances(p, eps)
        g2_lin = linearized_g2(p, eps).g2
        t0 = time.time()
        _, oracle = lindblad_steady_state(p.with_drive(eps), adequate_cutoffs(p, eps))
        t_solve = time.time() - t0
        sde = None
        if not args.skip_sde:
            sde = sde_trajectories(p, eps, n_traj=args.n_traj,
                                   t_max=default_horizon(p), dt=default_step(p),
                                   seed=args.seed)
        for name, lin, ora in (("var_x", var_x, oracle.var_x),
                               ("var_y", var_y, oracle.var_y),
                               ("g2", g2_lin, oracle.g2)):
            line = f"{ratio:7.2f} {name:>8} {lin:12.6f} {ora:12.6f}"
            if sde is not None:
                line += f" {getattr(sde, name):12.6f} {sde.errors[name]:9.1e}"
            print(line)
        print(f"        (lindblad solve {t_solve:.1f}s at cutoffs "
              f"{adequate_cutoffs(p, eps)})")


if __name__ == "__main__":
    main()
