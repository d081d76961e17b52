"""Numeric adiabatic-elimination engine.

Builds the anti-Hermitian generator S that cancels the qubit-resonator
interaction at first order, evaluates the commutator series

    H0 + (1/2)[H_I, S] + (1/3)[[H_I, S], S]

by explicit matrix commutators, projects onto the qubit ground level,
and extracts the effective two-mode coefficients for comparison with
the closed forms in :mod:`pdcsim.model`.  Working numerically at a
fixed cutoff keeps every step exact (no expression swell), so the
extraction doubles as an independent oracle for the closed-form
conversion strength.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .fock import (
    HilbertSpec,
    LEVELS,
    Operator,
    TwoModeSpec,
    annihilation,
    embed,
    qubit_transition,
)
from .model import TWO_PI, SystemParams, build_H0, build_HI


@dataclass(frozen=True)
class GeneratorS:
    """Elimination generator with its three dimensionless coefficients."""

    operator: Operator
    coeff_d: complex
    coeff_er: complex
    coeff_gr: complex


@dataclass(frozen=True)
class EliminationReport:
    """Coefficients extracted from the projected commutator series (Hz).

    extracted_chi_half is the coefficient of a^dag b^2 in the ground
    block; the closed form is conj(g_d) g_er g_gr / (delta delta_r).
    dropped_terms lists ground-block residuals that do not fit the
    canonical operator content (identity, a^dag a, b^dag b, a^dag b^2,
    a b^dag^2) together with their magnitudes.
    """

    extracted_chi_half: complex
    extracted_shift_a: float
    extracted_shift_b: float
    closed_form_chi_half: complex
    relative_deviation: float
    dropped_terms: list[tuple[str, float]]


def build_generator(p: SystemParams, s: HilbertSpec) -> GeneratorS:
    """Generator S with [H0, S] = -H_I exactly at any cutoff.

    Each term divides a coupling by the exact energy mismatch of its
    transition, so the first-order cancellation is an identity of the
    truncated matrices, not an approximation.  The coefficients carry
    the conjugate couplings so the identity also holds for complex
    coupling phases.
    """
    denominators = {
        "delta": p.delta,
        "delta - delta_r": p.delta - p.delta_r,
        "delta_r": p.delta_r,
    }
    for name, value in denominators.items():
        if value == 0.0:
            raise InvalidArgumentError(f"degenerate elimination denominator: {name} = 0")
    coeff_d = np.conj(p.g_d) / p.delta
    coeff_er = np.conj(p.g_er) / (p.delta - p.delta_r)
    coeff_gr = np.conj(p.g_gr) / p.delta_r
    a_dag = embed(annihilation(s.cutoff_a), "mode_a", s).dense().conj().T
    b_dag = embed(annihilation(s.cutoff_b), "mode_b", s).dense().conj().T
    sig_ge = embed(qubit_transition("g", "e"), "qubit", s).dense()
    sig_re = embed(qubit_transition("r", "e"), "qubit", s).dense()
    sig_gr = embed(qubit_transition("g", "r"), "qubit", s).dense()
    half = coeff_d * (a_dag @ sig_ge) + coeff_er * (b_dag @ sig_re) + coeff_gr * (b_dag @ sig_gr)
    mat = half - half.conj().T
    return GeneratorS(
        operator=Operator.from_matrix(s, mat),
        coeff_d=complex(coeff_d),
        coeff_er=complex(coeff_er),
        coeff_gr=complex(coeff_gr),
    )


def _ground_block(matrix: np.ndarray, s: HilbertSpec) -> np.ndarray:
    """Restrict a full-space matrix to the qubit-ground sector."""
    mode_dim = (s.cutoff_a + 1) * (s.cutoff_b + 1)
    g = LEVELS.index("g")
    idx = np.arange(g * mode_dim, (g + 1) * mode_dim)
    return matrix[np.ix_(idx, idx)]


def _series_ground_block(p: SystemParams, s: HilbertSpec) -> np.ndarray:
    h0 = build_H0(p, s).dense()
    hi = build_HI(p, s).dense()
    gen = build_generator(p, s).operator.dense()
    c1 = hi @ gen - gen @ hi
    c2 = c1 @ gen - gen @ c1
    series = h0 + 0.5 * c1 + (1.0 / 3.0) * c2
    return _ground_block(series, s)


def project_effective(p: SystemParams, s: HilbertSpec) -> tuple[Operator, EliminationReport]:
    """Ground-block of the third-order commutator series, with extraction.

    Returns the projected two-mode operator (angular units) and a report
    comparing the extracted conversion coefficient and frequency shifts
    against their closed forms.
    """
    if s.cutoff_a < 1 or s.cutoff_b < 2:
        raise InvalidArgumentError(
            "cutoffs must contain the |1,0> and |0,2> states: need cutoff_a >= 1, cutoff_b >= 2"
        )
    spec = TwoModeSpec(s.cutoff_a, s.cutoff_b)
    block = _series_ground_block(p, s)

    i_00 = spec.index(0, 0)
    i_10 = spec.index(1, 0)
    i_01 = spec.index(0, 1)
    i_02 = spec.index(0, 2)
    # <1,0| a^dag b^2 |0,2> = sqrt(2); divide it out to get the raw coefficient.
    extracted_chi_half = complex(block[i_10, i_02]) / np.sqrt(2.0) / TWO_PI
    extracted_shift_a = p.nu_a - float((block[i_10, i_10] - block[i_00, i_00]).real) / TWO_PI
    extracted_shift_b = p.nu_b - float((block[i_01, i_01] - block[i_00, i_00]).real) / TWO_PI
    closed = complex(np.conj(p.g_d) * p.g_er * p.g_gr / (p.delta * p.delta_r))
    deviation = abs(extracted_chi_half - closed) / abs(closed) if closed != 0 else (
        0.0 if extracted_chi_half == 0 else float("inf")
    )

    dropped = _residual_terms(block, spec, extracted_chi_half, extracted_shift_a,
                              extracted_shift_b, p)
    report = EliminationReport(
        extracted_chi_half=extracted_chi_half,
        extracted_shift_a=extracted_shift_a,
        extracted_shift_b=extracted_shift_b,
        closed_form_chi_half=closed,
        relative_deviation=deviation,
        dropped_terms=dropped,
    )
    return Operator.from_matrix(spec, block), report


def _residual_terms(block: np.ndarray, spec: TwoModeSpec, chi_half: complex,
                    shift_a: float, shift_b: float, p: SystemParams) -> list[tuple[str, float]]:
    """Ground-block content beyond the canonical effective operator, in Hz."""
    a = embed(annihilation(spec.cutoff_a), "mode_a", spec).dense()
    b = embed(annihilation(spec.cutoff_b), "mode_b", spec).dense()
    n_a = a.conj().T @ a
    n_b = b.conj().T @ b
    up = a.conj().T @ (b @ b)
    canonical = TWO_PI * (
        float(block[spec.index(0, 0), spec.index(0, 0)].real) / TWO_PI * np.eye(spec.dim)
        + (p.nu_a - shift_a) * n_a
        + (p.nu_b - shift_b) * n_b
        + chi_half * up
        + np.conj(chi_half) * up.conj().T
    )
    residual = (block - canonical) / TWO_PI
    terms: dict[str, float] = {}
    rows, cols = np.nonzero(np.abs(residual) > 1e-9 * max(1.0, np.abs(block).max() / TWO_PI))
    cb = spec.cutoff_b + 1
    for i, j in zip(rows, cols):
        dn_a = i // cb - j // cb
        dn_b = i % cb - j % cb
        pattern = f"dn_a={dn_a:+d}, dn_b={dn_b:+d}"
        terms[pattern] = max(terms.get(pattern, 0.0), float(abs(residual[i, j])))
    return sorted(terms.items(), key=lambda kv: -kv[1])


def spectral_check(p: SystemParams, s: HilbertSpec, k: int) -> list[tuple[float, float, float]]:
    """Compare ground-dominated exact eigenvalues with effective ones.

    Diagonalizes the full Hamiltonian, keeps eigenstates whose weight on
    the qubit ground level exceeds one half, and pairs their lowest ``k``
    eigenvalues with the lowest eigenvalues of the projected effective
    operator.  Returns (exact_hz, effective_hz, gap_hz) triples.
    """
    h_full = (build_H0(p, s) + build_HI(p, s)).dense()
    evals, evecs = np.linalg.eigh(h_full)
    mode_dim = (s.cutoff_a + 1) * (s.cutoff_b + 1)
    ground_weight = (np.abs(evecs[:mode_dim, :]) ** 2).sum(axis=0)
    dominated = evals[ground_weight > 0.5]
    effective, _ = project_effective(p, s)
    eff_evals = np.linalg.eigvalsh(effective.dense())
    if k > min(dominated.size, eff_evals.size):
        raise InvalidArgumentError(
            f"k = {k} exceeds the {min(dominated.size, eff_evals.size)} "
            "ground-dominated eigenvalues available"
        )
    exact = np.sort(dominated)[:k] / TWO_PI
    approx = np.sort(eff_evals)[:k] / TWO_PI
    return [(float(x), float(y), float(abs(x - y))) for x, y in zip(exact, approx)]
