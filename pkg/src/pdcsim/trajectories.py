"""Semiclassical stochastic trajectories for the driven two-mode system.

Integrates the c-number Langevin equations in the truncated-Wigner
convention: complex fields (alpha, beta) with the mean-field drift

    d alpha = (eps - chi/2 beta^2 - gamma_a alpha) dt + noise,
    d beta  = (chi alpha conj(beta) - gamma_b beta) dt + noise,

(angular rates) and complex Gaussian input noise scaled so an undriven,
uncoupled mode equilibrates to symmetric-ordered quadrature variance 1.
Trajectory ensembles therefore estimate symmetric-ordered moments;
population and second-order correlation are recovered through the usual
half-photon corrections.

Trajectories start at the mean-field steady state (positive branch)
plus a vacuum-width Gaussian sample.  Above threshold this selects the
positive amplitude branch; origin-centered starts would split the
ensemble between the two signs of beta and average the amplitude away.

Each trajectory draws from its own counter-based Philox stream keyed by
(seed, trajectory index) and trajectories are processed in fixed-size
blocks, so results are byte-identical for a fixed seed no matter how
many worker threads execute the blocks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, StepSizeError
from .model import TWO_PI, SystemParams, effective_params
from .steady import FluctuationReport, mean_field

_BLOCK = 4096
_CHUNK = 256
#: Accumulate moments every this many steps; the step size resolves the
#: decay rates by construction, so adjacent samples are redundant.
_SAMPLE_STRIDE = 4


def default_step(p: SystemParams) -> float:
    """Step that comfortably resolves the fastest decay (angular gamma_a)."""
    return 0.005 / (TWO_PI * p.gamma_a)


def default_horizon(p: SystemParams) -> float:
    """Horizon long enough for burn-in plus a useful averaging window."""
    return 60.0 / (TWO_PI * p.gamma_b)


@dataclass
class _BlockMoments:
    mean_b: np.ndarray      # per-trajectory time-averaged beta
    mean_a: np.ndarray
    b_sq: np.ndarray        # time-averaged beta^2
    abs2: np.ndarray        # time-averaged |beta|^2
    abs4: np.ndarray        # time-averaged |beta|^4


def _integrate_block(p: SystemParams, eps: float, indices: np.ndarray, seed: int,
                     n_steps: int, burn_steps: int, dt: float,
                     alpha0: complex, beta0: complex) -> _BlockMoments:
    chi_ang = TWO_PI * effective_params(p).chi
    ga = TWO_PI * p.gamma_a
    gb = TWO_PI * p.gamma_b
    eps_ang = TWO_PI * eps
    sig_a = math.sqrt(ga * dt / 2.0)
    sig_b = math.sqrt(gb * dt / 2.0)
    bound = 1e6 * (1.0 + abs(alpha0) + abs(beta0))

    gens = [np.random.Generator(np.random.Philox(key=np.array([seed, int(i)], dtype=np.uint64)))
            for i in indices]
    n = len(gens)
    init = np.stack([g.standard_normal(4) for g in gens])
    alpha = alpha0 + 0.5 * (init[:, 0] + 1j * init[:, 1])
    beta = beta0 + 0.5 * (init[:, 2] + 1j * init[:, 3])

    sums = np.zeros((5, n), dtype=np.complex128)
    samples = 0
    step = 0
    # blow-ups surface as the bound check below, not as float warnings
    with np.errstate(over="ignore", invalid="ignore"):
        while step < n_steps:
            chunk = min(_CHUNK, n_steps - step)
            raw = np.stack([g.standard_normal((chunk, 4)) for g in gens], axis=1)
            noise_a = sig_a * (raw[:, :, 0] + 1j * raw[:, :, 1])
            noise_b = sig_b * (raw[:, :, 2] + 1j * raw[:, :, 3])
            for k in range(chunk):
                drift_a = eps_ang - 0.5 * chi_ang * (beta * beta) - ga * alpha
                drift_b = chi_ang * alpha * np.conj(beta) - gb * beta
                alpha = alpha + drift_a * dt + noise_a[k]
                beta = beta + drift_b * dt + noise_b[k]
                here = step + k + 1
                if here > burn_steps and (here - burn_steps) % _SAMPLE_STRIDE == 0:
                    abs2 = beta.real**2 + beta.imag**2
                    sums[0] += beta
                    sums[1] += alpha
                    sums[2] += beta * beta
                    sums[3] += abs2
                    sums[4] += abs2 * abs2
                    samples += 1
            if not np.all(np.isfinite(alpha)) or not np.all(np.isfinite(beta)) \
                    or float(np.abs(beta).max()) > bound or float(np.abs(alpha).max()) > bound:
                raise StepSizeError(
                    f"field amplitude exceeded {bound:.3g} during integration; reduce dt"
                )
            step += chunk
    return _BlockMoments(
        mean_b=sums[0] / samples,
        mean_a=sums[1] / samples,
        b_sq=sums[2] / samples,
        abs2=np.real(sums[3]) / samples,
        abs4=np.real(sums[4]) / samples,
    )


def _derived(mean_b, mean_a, b_sq, abs2, abs4) -> dict[str, float | complex]:
    """Ensemble observables from pooled symmetric-ordered moments."""
    b = complex(np.mean(mean_b))
    a = complex(np.mean(mean_a))
    m2 = float(np.mean(abs2))
    m4 = float(np.mean(abs4))
    b2 = complex(np.mean(b_sq))
    var_x = 2.0 * b2.real + 2.0 * m2 - 4.0 * b.real**2
    var_y = -2.0 * b2.real + 2.0 * m2 - 4.0 * b.imag**2
    n_b = m2 - 0.5
    normal_fourth = m4 - 2.0 * m2 + 0.5
    g2 = normal_fourth / n_b**2 if n_b > 1e-12 else math.nan
    return {
        "var_x": var_x, "var_y": var_y, "n_b": n_b, "g2": g2,
        "anomalous": b2 - b * b, "mean_b": b, "mean_a": a,
        "mean_b_re": b.real, "mean_b_im": b.imag,
    }


def sde_trajectories(p: SystemParams, eps: float, n_traj: int, t_max: float,
                     dt: float, seed: int, threads: int | None = None,
                     burn_in: float | None = None) -> FluctuationReport:
    """Ensemble estimate of the steady-state fluctuation observables.

    Runs ``n_traj`` independent trajectories to ``t_max`` with explicit
    Euler-Maruyama steps of size ``dt``, discards the burn-in window
    (default: the first quarter of the horizon), and time-averages the
    rest.  Standard errors come from trajectory batches (10 to 50, by ensemble size);
    ``statistical_error`` is the larger of the two quadrature-variance
    standard errors and the ``errors`` dict has the per-quantity values.
    """
    if n_traj < 100:
        raise InvalidArgumentError(f"need at least 100 trajectories, got {n_traj}")
    if dt <= 0:
        raise InvalidArgumentError("dt must be positive")
    if dt > 0.05 / (TWO_PI * p.gamma_a):
        raise InvalidArgumentError(
            f"dt = {dt:.3e}s does not resolve gamma_a: need dt <= "
            f"{0.05 / (TWO_PI * p.gamma_a):.3e}s"
        )
    if eps < 0:
        raise InvalidArgumentError("drive amplitude must be nonnegative")
    if burn_in is None:
        burn_in = 0.25 * t_max
    if not 0 <= burn_in < t_max:
        raise InvalidArgumentError("burn-in must lie inside the horizon")
    n_steps = int(round(t_max / dt))
    burn_steps = int(round(burn_in / dt))
    if n_steps - burn_steps < 10:
        raise InvalidArgumentError("horizon leaves too few steps after burn-in")

    mf = mean_field(p, eps)
    alpha0, beta0 = complex(mf.alpha), complex(mf.beta)

    blocks = [np.arange(start, min(start + _BLOCK, n_traj))
              for start in range(0, n_traj, _BLOCK)]
    results: list[_BlockMoments | None] = [None] * len(blocks)

    def work(i: int):
        results[i] = _integrate_block(p, eps, blocks[i], seed, n_steps, burn_steps,
                                      dt, alpha0, beta0)

    if threads is not None and threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, range(len(blocks))))
    else:
        for i in range(len(blocks)):
            work(i)

    mean_b = np.concatenate([r.mean_b for r in results])
    mean_a = np.concatenate([r.mean_a for r in results])
    b_sq = np.concatenate([r.b_sq for r in results])
    abs2 = np.concatenate([r.abs2 for r in results])
    abs4 = np.concatenate([r.abs4 for r in results])

    pooled = _derived(mean_b, mean_a, b_sq, abs2, abs4)
    n_batches = min(50, max(10, n_traj // 40))
    batch_edges = np.linspace(0, n_traj, n_batches + 1).astype(int)
    batch_values: dict[str, list[float]] = {}
    for lo, hi in zip(batch_edges[:-1], batch_edges[1:]):
        if hi <= lo:
            continue
        bd = _derived(mean_b[lo:hi], mean_a[lo:hi], b_sq[lo:hi], abs2[lo:hi], abs4[lo:hi])
        for key in ("var_x", "var_y", "n_b", "g2", "mean_b_re", "mean_b_im"):
            batch_values.setdefault(key, []).append(float(bd[key]))
    errors = {}
    for key, values in batch_values.items():
        arr = np.asarray(values)
        arr = arr[np.isfinite(arr)]
        errors[key] = float(arr.std(ddof=1) / math.sqrt(len(arr))) if len(arr) > 1 else math.nan
    # raw-moment standard error: per-trajectory averages are iid, so this
    # estimate is tight and scales exactly as 1/sqrt(n_traj)
    errors["abs2_moment"] = float(abs2.std(ddof=1) / math.sqrt(n_traj))

    flags: tuple[str, ...] = ()
    g2 = float(pooled["g2"])
    if math.isnan(g2):
        flags += ("g2-undefined",)
    return FluctuationReport(
        var_x=float(pooled["var_x"]),
        var_y=float(pooled["var_y"]),
        n_b=float(pooled["n_b"]),
        g2=g2,
        anomalous=complex(pooled["anomalous"]),
        method="sde",
        statistical_error=max(errors["var_x"], errors["var_y"]),
        flags=flags,
        errors=errors,
        mean_b=complex(pooled["mean_b"]),
        mean_a=complex(pooled["mean_a"]),
    )


def auto_step_trajectories(p: SystemParams, eps: float, n_traj: int, t_max: float,
                           seed: int, threads: int | None = None,
                           dt_start: float | None = None,
                           max_halvings: int = 4) -> FluctuationReport:
    """Halve the step until the variance estimates stop drifting.

    The explicit scheme biases stationary variances by about rate*dt/2,
    so successive halvings converge geometrically; the run is accepted
    once both quadrature variances move by less than one combined
    standard error (or a 1e-3 relative floor).  Each level uses its own
    noise streams, keyed by (seed + level, trajectory index).
    """
    dt = dt_start if dt_start is not None else 0.02 / (TWO_PI * p.gamma_a)
    previous = sde_trajectories(p, eps, n_traj, t_max, dt, seed, threads)
    for level in range(1, max_halvings + 1):
        dt *= 0.5
        current = sde_trajectories(p, eps, n_traj, t_max, dt, seed + level, threads)
        stable = True
        for key in ("var_x", "var_y"):
            drift = abs(getattr(current, key) - getattr(previous, key))
            tol = max(math.hypot(current.errors[key], previous.errors[key]),
                      1e-3 * abs(getattr(current, key)))
            stable &= drift <= tol
        previous = current
        if stable:
            break
    return previous
