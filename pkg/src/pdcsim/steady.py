"""Driven-dissipative steady states: mean field, linearized fluctuations, scans.

The resonantly driven second-harmonic mode feeds the fundamental mode
through the conversion term.  The mean-field amplitudes bifurcate at
the threshold drive epsilon_c = gamma_a gamma_b / chi; below it the
fundamental stays empty, above it only the positive amplitude branch is
tracked.  Fluctuations around the mean field follow a linear Langevin
system whose stationary covariances give the quadrature variances, and
a Gaussian (Wick) moment closure turns them into the equal-time
second-order correlation of the fundamental mode.

All formulas here depend only on frequency ratios, so the Hz convention
carries through unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg

from .errors import InvalidArgumentError
from .fock import TwoModeSpec
from .model import SystemParams, effective_params

#: Relative half-width of the drive window around threshold inside which
#: linearized results are flagged as invalid.
THRESHOLD_WINDOW = 0.02

NEAR_THRESHOLD_FLAG = "near-threshold-invalid"
G2_UNDEFINED_FLAG = "g2-undefined"
ZERO_CHI_FLAG = "zero-conversion-strength"


@dataclass(frozen=True)
class MeanField:
    """Steady-state amplitudes of the two modes."""

    alpha: complex
    beta: complex
    branch: str
    epsilon_over_threshold: float
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class FluctuationReport:
    """Steady-state fluctuation observables of the fundamental mode.

    var_x and var_y are the quadrature variances (vacuum value 1), n_b
    the mode population including any coherent part, g2 the equal-time
    second-order correlation, and ``anomalous`` the fluctuation moment
    <(delta b)^2>.  ``statistical_error`` is populated by the stochastic
    estimator only; ``errors`` carries its per-quantity standard errors.
    """

    var_x: float
    var_y: float
    n_b: float
    g2: float
    anomalous: complex
    method: str
    statistical_error: float | None = None
    flags: tuple[str, ...] = ()
    errors: dict = field(default_factory=dict)
    mean_b: complex | None = None
    mean_a: complex | None = None


def _chi(p: SystemParams) -> float:
    return effective_params(p).chi


def near_threshold(p: SystemParams, eps: float) -> bool:
    """True when the drive falls inside the exclusion window around threshold."""
    ec = effective_params(p).epsilon_c
    if not math.isfinite(ec):
        return False
    return abs(eps - ec) <= THRESHOLD_WINDOW * ec


def mean_field(p: SystemParams, eps: float) -> MeanField:
    """Piecewise steady-state amplitudes for drive ``eps`` (Hz).

    Below threshold alpha = eps/gamma_a and beta = 0; above it
    alpha = gamma_b/chi and beta = +sqrt(2 (eps - eps_c)/chi) (positive
    branch).  With chi = 0 the threshold is infinite and the below
    branch applies at any drive.
    """
    if p.gamma_a <= 0 or p.gamma_b <= 0:
        raise InvalidArgumentError("mean-field solution requires positive decay rates")
    if eps < 0:
        raise InvalidArgumentError("drive amplitude must be nonnegative")
    chi = _chi(p)
    if chi == 0.0:
        return MeanField(alpha=eps / p.gamma_a, beta=0.0, branch="below",
                         epsilon_over_threshold=0.0, flags=(ZERO_CHI_FLAG,))
    ec = p.gamma_a * p.gamma_b / chi
    ratio = eps / ec
    if eps <= ec:
        return MeanField(alpha=eps / p.gamma_a, beta=0.0, branch="below",
                         epsilon_over_threshold=ratio)
    beta = math.sqrt(2.0 * (eps - ec) / chi)
    return MeanField(alpha=p.gamma_b / chi, beta=beta, branch="above-positive",
                     epsilon_over_threshold=ratio)


def linearized_variances(p: SystemParams, eps: float) -> tuple[float, float]:
    """Stationary quadrature variances (var_x, var_y) of the fundamental mode.

    Below threshold:
        var_x = gg / (gg - eps chi),   var_y = gg / (gg + eps chi)
    above threshold:
        var_x = 1 + gamma_b/gamma_a - gg / (2 (gg - eps chi))
        var_y = 1 - gamma_a^2 gamma_b / ((gamma_a + 2 gamma_b) eps chi)
    with gg = gamma_a gamma_b.  Exactly at threshold var_x diverges;
    callers should respect the near-threshold exclusion window.
    """
    if eps < 0:
        raise InvalidArgumentError("drive amplitude must be nonnegative")
    chi = _chi(p)
    gg = p.gamma_a * p.gamma_b
    x = eps * chi
    if chi == 0.0 or eps <= gg / chi:
        var_x = gg / (gg - x) if gg != x else math.inf
        var_y = gg / (gg + x)
    else:
        var_x = 1.0 + p.gamma_b / p.gamma_a - gg / (2.0 * (gg - x))
        var_y = 1.0 - p.gamma_a**2 * p.gamma_b / ((p.gamma_a + 2.0 * p.gamma_b) * x)
    return var_x, var_y


def fluctuation_covariance(p: SystemParams, eps: float) -> tuple[float, complex, float, float]:
    """Stationary fluctuation moments from the coupled linear system.

    Solves the 4-variable Lyapunov problem for the quadrature
    fluctuations of both modes around the mean field and returns
    (n, m, var_x, var_y) for the fundamental mode, where
    n = <delta b^dag delta b> and m = <(delta b)^2>.  Below threshold
    the fundamental decouples and this reproduces the closed variance
    formulas identically.
    """
    mf = mean_field(p, eps)
    chi = _chi(p)
    alpha = mf.alpha.real
    s = chi * mf.beta.real
    ga, gb = p.gamma_a, p.gamma_b
    lam = chi * alpha
    # Quadrature vector (x_a, x_b, y_a, y_b); x and y sectors decouple.
    drift = np.array([
        [-ga, -s, 0.0, 0.0],
        [s, lam - gb, 0.0, 0.0],
        [0.0, 0.0, -ga, -s],
        [0.0, 0.0, s, -(lam + gb)],
    ])
    diffusion = np.diag([2.0 * ga, 2.0 * gb, 2.0 * ga, 2.0 * gb])
    if not np.all(np.linalg.eigvals(drift).real < 0):
        raise InvalidArgumentError(
            "fluctuation drift is not stable at this drive (at or beyond threshold)"
        )
    cov = scipy.linalg.solve_continuous_lyapunov(drift, -diffusion)
    var_x = float(cov[1, 1])
    var_y = float(cov[3, 3])
    n = (var_x + var_y - 2.0) / 4.0
    m = complex((var_x - var_y) / 4.0, float(cov[1, 3]) / 2.0)
    return n, m, var_x, var_y


def linearized_g2(p: SystemParams, eps: float) -> FluctuationReport:
    """Equal-time second-order correlation from the Gaussian closure.

    The fluctuation second moments come from the stationary covariances
    of the linearized system; fourth moments follow by Wick
    factorization around the mean-field amplitude:

        <b^dag b^dag b b> = beta^4 + beta^2 (4n + 2 Re m) + 2 n^2 + |m|^2

    with n = <delta b^dag delta b> and m = <delta b^2>.  Below threshold
    this reduces to g2 = 2 + (eps_c/eps)^2.
    """
    if eps < 0:
        raise InvalidArgumentError("drive amplitude must be nonnegative")
    flags: tuple[str, ...] = ()
    if near_threshold(p, eps):
        flags += (NEAR_THRESHOLD_FLAG,)
    mf = mean_field(p, eps)
    flags += mf.flags
    try:
        n, m, var_x, var_y = fluctuation_covariance(p, eps)
    except InvalidArgumentError:
        if NEAR_THRESHOLD_FLAG not in flags:
            flags += (NEAR_THRESHOLD_FLAG,)
        return FluctuationReport(
            var_x=math.inf, var_y=math.nan, n_b=math.nan, g2=math.nan,
            anomalous=complex(math.nan), method="linearized", flags=flags,
        )
    beta2 = abs(mf.beta) ** 2
    n_b = beta2 + n
    if n_b <= 0.0:
        g2 = math.nan
        flags += (G2_UNDEFINED_FLAG,)
    else:
        fourth = beta2**2 + beta2 * (4.0 * n + 2.0 * m.real) + 2.0 * n**2 + abs(m) ** 2
        g2 = fourth / n_b**2
    return FluctuationReport(
        var_x=var_x, var_y=var_y, n_b=n_b, g2=g2, anomalous=m,
        method="linearized", flags=flags,
    )


@dataclass(frozen=True)
class ScanRow:
    """One (drive, method) entry of a threshold scan."""

    eps_hz: float
    eps_over_ec: float
    method: str
    report: FluctuationReport
    error: str | None = None


def threshold_scan(
    p: SystemParams,
    eps_values: list[float],
    methods: set[str],
    *,
    lindblad_spec: TwoModeSpec | None = None,
    n_traj: int = 10_000,
    t_max: float | None = None,
    dt: float | None = None,
    seed: int = 42,
    threads: int | None = None,
) -> list[ScanRow]:
    """Sweep the drive and collect fluctuation reports per method.

    ``methods`` is a subset of {'linearized', 'lindblad', 'sde'}.  For
    the linearized rows the variance columns come from the closed
    formulas and the remaining fields from the Gaussian closure.  Rows
    inside the threshold exclusion window are flagged; per-row failures
    are recorded in the ``error`` field and the scan continues.
    """
    known = {"linearized", "lindblad", "sde"}
    unknown = set(methods) - known
    if unknown:
        raise InvalidArgumentError(f"unknown methods {sorted(unknown)}; choose from {sorted(known)}")
    if any(e < 0 for e in eps_values):
        raise InvalidArgumentError("drive values must be nonnegative")
    if list(eps_values) != sorted(eps_values):
        raise InvalidArgumentError("drive values must be sorted ascending")

    ec = effective_params(p).epsilon_c
    rows: list[ScanRow] = []
    for eps in eps_values:
        ratio = eps / ec if math.isfinite(ec) else 0.0
        for method in sorted(methods):
            try:
                rows.append(ScanRow(eps, ratio, method, _run_method(
                    p, eps, method, lindblad_spec=lindblad_spec, n_traj=n_traj,
                    t_max=t_max, dt=dt, seed=seed, threads=threads)))
            except Exception as exc:  # per-row failure, recorded, scan continues
                empty = FluctuationReport(
                    var_x=math.nan, var_y=math.nan, n_b=math.nan, g2=math.nan,
                    anomalous=complex(math.nan), method=method,
                    flags=("row-error",),
                )
                rows.append(ScanRow(eps, ratio, method, empty, error=str(exc)))
    return rows


def _run_method(p: SystemParams, eps: float, method: str, *, lindblad_spec,
                n_traj, t_max, dt, seed, threads) -> FluctuationReport:
    if method == "linearized":
        report = linearized_g2(p, eps)
        var_x, var_y = linearized_variances(p, eps)
        return replace(report, var_x=var_x, var_y=var_y)
    if method == "lindblad":
        from .lindblad import adequate_cutoffs, lindblad_steady_state

        spec = lindblad_spec or adequate_cutoffs(p, eps)
        _, report = lindblad_steady_state(p.with_drive(eps), spec)
        if near_threshold(p, eps):
            report = replace(report, flags=report.flags + (NEAR_THRESHOLD_FLAG,))
        return report
    from .trajectories import auto_step_trajectories, default_horizon, sde_trajectories

    horizon = t_max if t_max is not None else default_horizon(p)
    if dt is not None:
        report = sde_trajectories(p, eps, n_traj=n_traj, t_max=horizon, dt=dt,
                                  seed=seed, threads=threads)
    else:
        # no step configured: halve until the moment drift stabilizes
        report = auto_step_trajectories(p, eps, n_traj=n_traj, t_max=horizon,
                                        seed=seed, threads=threads)
    if near_threshold(p, eps):
        report = replace(report, flags=report.flags + (NEAR_THRESHOLD_FLAG,))
    return report
