"""Runtime invariant suite backing the ``validate`` CLI scenario.

Each check is a named predicate over the configured parameters (plus a
few fixed desk-scale probes); the runner prints one PASS/FAIL line per
check and reports overall success.  The suite is intentionally fast:
it uses small cutoffs everywhere.
"""

from __future__ import annotations

import math

import numpy as np

from .dynamics import conserved_excitation, default_transfer_grid, run_full_vs_effective
from .elimination import build_generator, project_effective
from .fock import HilbertSpec, TwoModeSpec, commutator
from .lindblad import lindblad_steady_state
from .model import (
    SystemParams,
    build_H0,
    build_HI,
    build_H_eff,
    build_H_rotating,
    effective_params,
    excitation_operator,
    scaled_params,
)
from .steady import linearized_g2, linearized_variances, mean_field


def _check_hermitian_builders(p: SystemParams) -> tuple[bool, str]:
    s = HilbertSpec(2, 4)
    ops = [build_H0(p, s), build_HI(p, s), build_H_eff(p, s), build_H_rotating(p, s)]
    dev = 0.0
    for op in ops:
        scale = op.max_abs()
        if scale > 0:
            mat = op.dense()
            dev = max(dev, float(np.abs(mat - mat.conj().T).max()) / scale)
    return dev <= 1e-12, f"max relative Hermiticity deviation {dev:.3e}"


def _check_excitation_conserved(p: SystemParams) -> tuple[bool, str]:
    s = HilbertSpec(2, 4)
    h = build_H0(p, s) + build_HI(p, s)
    k = excitation_operator(s)
    dev = commutator(h, k).max_abs()
    return dev == 0.0 or dev <= 1e-9 * h.max_abs(), f"|[H, K]| = {dev:.3e}"


def _check_generator(p: SystemParams) -> tuple[bool, str]:
    s = HilbertSpec(2, 4)
    gen = build_generator(p, s)
    anti = (gen.operator + gen.operator.dagger()).max_abs()
    h0, hi = build_H0(p, s), build_HI(p, s)
    residual = (commutator(h0, gen.operator) + hi).norm_fro() / hi.norm_fro()
    ok = anti <= 1e-12 * max(1.0, gen.operator.max_abs()) and residual <= 1e-12
    return ok, f"anti-Hermiticity {anti:.3e}, first-order residual {residual:.3e}"


def _check_elimination(p: SystemParams) -> tuple[bool, str]:
    _, report = project_effective(p, HilbertSpec(2, 4))
    ep = effective_params(p)
    shift_ok = (abs(report.extracted_shift_a - ep.shift_a) <= 1e-10 * abs(ep.shift_a)
                and abs(report.extracted_shift_b - ep.shift_b) <= 1e-10 * abs(ep.shift_b))
    ok = report.relative_deviation <= 1e-10 and shift_ok
    return ok, (f"conversion-coefficient deviation {report.relative_deviation:.3e}, "
                f"shifts ({report.extracted_shift_a:.6g}, {report.extracted_shift_b:.6g}) Hz")


def _check_transfer(p: SystemParams) -> tuple[bool, str]:
    try:
        grid = default_transfer_grid(p, n_samples=401)
    except Exception as exc:
        return False, f"no transfer grid: {exc}"
    full, _, summary = run_full_vs_effective(p, HilbertSpec(1, 2), grid)
    drift = conserved_excitation(full)
    norm_dev = float(np.abs(full.channel("norm") - 1.0).max())
    ok = drift <= 1e-8 and norm_dev <= 1e-9 and summary.max_dev_n_b <= 0.1
    return ok, (f"excitation drift {drift:.2e}, norm drift {norm_dev:.2e}, "
                f"max photon deviation {summary.max_dev_n_b:.3f}")


def _check_mean_field(p: SystemParams) -> tuple[bool, str]:
    ep = effective_params(p)
    if not math.isfinite(ep.epsilon_c):
        return False, "threshold is infinite (chi = 0)"
    below = mean_field(p, ep.epsilon_c)
    above_alpha = p.gamma_b / ep.chi
    dev = abs(below.alpha - above_alpha) / abs(above_alpha)
    return dev <= 1e-12, f"branch mismatch at threshold {dev:.3e}"


def _check_variance_identity(p: SystemParams) -> tuple[bool, str]:
    ep = effective_params(p)
    worst = 0.0
    for ratio in np.linspace(0.01, 0.97, 50):
        eps = ratio * ep.epsilon_c
        var_x, var_y = linearized_variances(p, eps)
        worst = max(worst, abs(var_x * var_y * (1.0 - ratio**2) - 1.0))
    return worst <= 1e-12, f"max uncertainty-product deviation {worst:.3e}"


def _check_g2_closure(p: SystemParams) -> tuple[bool, str]:
    ep = effective_params(p)
    worst = 0.0
    for ratio in (0.1, 0.3, 0.7):
        report = linearized_g2(p, ratio * ep.epsilon_c)
        worst = max(worst, abs(report.g2 - (2.0 + 1.0 / ratio**2)))
    return worst <= 1e-9, f"max closed-form deviation {worst:.3e}"


def _check_vacuum_steady_state(_: SystemParams) -> tuple[bool, str]:
    desk = scaled_params(epsilon=0.0)
    _, report = lindblad_steady_state(desk, TwoModeSpec(4, 4))
    dev = max(abs(report.var_x - 1.0), abs(report.var_y - 1.0), abs(report.n_b))
    return dev <= 1e-8, f"undriven steady state deviates from vacuum by {dev:.3e}"


CHECKS = [
    ("hermitian_builders", _check_hermitian_builders),
    ("excitation_conserved", _check_excitation_conserved),
    ("generator_exactness", _check_generator),
    ("elimination_consistency", _check_elimination),
    ("transfer_benchmark", _check_transfer),
    ("mean_field_continuity", _check_mean_field),
    ("variance_identity", _check_variance_identity),
    ("g2_closure", _check_g2_closure),
    ("vacuum_steady_state", _check_vacuum_steady_state),
]


def run_validation(p: SystemParams, emit=print) -> bool:
    """Run all checks, print one PASS/FAIL line each, return overall result."""
    all_ok = True
    for name, check in CHECKS:
        try:
            ok, detail = check(p)
        except Exception as exc:
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        all_ok &= ok
        emit(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return all_ok
