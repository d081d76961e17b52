"""Physical parameters, derived quantities, and Hamiltonian builders.

Conventions
-----------
All public parameters and derived quantities are plain frequencies
``nu = omega / 2pi`` in Hz; matrices built here carry angular units
(rad/s), with the single conversion point ``TWO_PI``.  The qubit level
energies are derived rather than stored: with the ground level pinned
at zero, ``nu_e = delta + 2 nu_b`` and ``nu_r = delta_r + nu_b``, where
``delta`` and ``delta_r`` are the detunings of the upper levels from the
resonator modes.

The couplings may be complex.  ``phi`` is an extra, deliberately chosen
phase applied to the mode-conversion term on top of the intrinsic phase
of the coupling product (a gauge choice on mode b); the default -pi/2
turns the conversion term into the standard i(a b^dag^2 - a^dag b^2)/2
form when the couplings are real magnitudes.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidArgumentError
from .fock import (
    HilbertSpec,
    Operator,
    TwoModeSpec,
    annihilation,
    embed,
    number_operator,
    qubit_transition,
)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SystemParams:
    """All physical constants of the model, as nu = omega/2pi in Hz.

    nu_a, nu_b
        Second-harmonic and fundamental resonator mode frequencies.
    delta, delta_r
        Detunings nu_e - 2*nu_b and nu_r - nu_b of the qubit levels.
    g_d, g_gr, g_er
        Couplings of the e<->g, r<->g and e<->r transitions (complex
        allowed; magnitudes in Hz).
    gamma_a, gamma_b
        Mode amplitude decay rates.
    epsilon
        Resonant drive amplitude on the second-harmonic mode (real).
    phi
        Declared global phase of the conversion term, radians.
    """

    nu_a: float
    nu_b: float
    delta: float
    delta_r: float
    g_d: complex
    g_gr: complex
    g_er: complex
    gamma_a: float
    gamma_b: float
    epsilon: float = 0.0
    phi: float = -math.pi / 2

    def __post_init__(self):
        if self.gamma_a < 0 or self.gamma_b < 0:
            raise InvalidArgumentError("decay rates must be nonnegative")
        if isinstance(self.epsilon, complex):
            raise InvalidArgumentError("drive amplitude epsilon must be real")

    @property
    def nu_e(self) -> float:
        """Energy of the second excited level (ground level at zero)."""
        return self.delta + 2.0 * self.nu_b

    @property
    def nu_r(self) -> float:
        """Energy of the first excited level."""
        return self.delta_r + self.nu_b

    def with_drive(self, epsilon: float) -> "SystemParams":
        return replace(self, epsilon=epsilon)


@dataclass(frozen=True)
class EffectiveParams:
    """Derived two-mode quantities after eliminating the qubit (all Hz).

    chi is the mode-conversion strength, shift_a/shift_b the dispersive
    frequency pulls of the two modes, nu_eff the shifted second-harmonic
    frequency, epsilon_c the parametric-oscillation threshold drive, and
    matching_residual the deviation of nu_eff from twice the shifted
    fundamental frequency.
    """

    chi: float
    shift_a: float
    shift_b: float
    nu_eff: float
    epsilon_c: float
    phi_eff: float
    matching_residual: float


@dataclass(frozen=True)
class RegimeDiagnostic:
    """One violated dispersive-regime inequality."""

    check: str
    message: str


def _wrap_phase(phi: float) -> float:
    """Wrap to (-pi, pi]."""
    wrapped = math.remainder(phi, TWO_PI)
    if wrapped <= -math.pi:
        wrapped += TWO_PI
    return wrapped


def effective_params(p: SystemParams) -> EffectiveParams:
    """Closed-form effective quantities of the eliminated model.

    chi = 2|g_d g_er g_gr| / |delta delta_r| (the 2pi factors of the Hz
    convention cancel to one), shift_a = |g_d|^2/delta, shift_b =
    |g_gr|^2/delta_r, and epsilon_c = gamma_a gamma_b / chi.  The phase
    of the conversion term is arg(conj(g_d) g_er g_gr), flipped by pi
    for a negative detuning product, plus the declared phase p.phi.
    """
    if p.delta == 0.0:
        raise InvalidArgumentError("detuning delta must be nonzero")
    if p.delta_r == 0.0:
        raise InvalidArgumentError("detuning delta_r must be nonzero")
    chi = 2.0 * abs(p.g_d) * abs(p.g_er) * abs(p.g_gr) / abs(p.delta * p.delta_r)
    shift_a = abs(p.g_d) ** 2 / p.delta
    shift_b = abs(p.g_gr) ** 2 / p.delta_r
    nu_eff = p.nu_a - shift_a
    matching_residual = (p.nu_a - shift_a) - 2.0 * (p.nu_b - shift_b)
    coupling_product = np.conj(p.g_d) * p.g_er * p.g_gr
    phi_eff = p.phi
    if coupling_product != 0:
        phi_eff += cmath.phase(coupling_product)
    if p.delta * p.delta_r < 0:
        phi_eff += math.pi
    phi_eff = _wrap_phase(phi_eff)
    epsilon_c = (p.gamma_a * p.gamma_b / chi) if chi > 0 else math.inf
    return EffectiveParams(
        chi=chi,
        shift_a=shift_a,
        shift_b=shift_b,
        nu_eff=nu_eff,
        epsilon_c=epsilon_c,
        phi_eff=phi_eff,
        matching_residual=matching_residual,
    )


def validate_regime(p: SystemParams, factor: float = 10.0) -> list[RegimeDiagnostic]:
    """Dispersive-regime diagnostics; returns one entry per violation.

    Checks |delta| and |delta_r| against factor * max coupling,
    |delta - delta_r| against factor * |g_er|, and the frequency
    matching residual against chi/10.
    """
    if factor < 1.0:
        raise InvalidArgumentError(f"regime factor must be >= 1, got {factor}")
    diagnostics: list[RegimeDiagnostic] = []
    g_max = max(abs(p.g_d), abs(p.g_er), abs(p.g_gr))
    if abs(p.delta) < factor * g_max:
        diagnostics.append(RegimeDiagnostic(
            "delta_vs_couplings",
            f"|delta| = {abs(p.delta):.4g} Hz < {factor:g} x max coupling {g_max:.4g} Hz",
        ))
    if abs(p.delta_r) < factor * g_max:
        diagnostics.append(RegimeDiagnostic(
            "delta_r_vs_couplings",
            f"|delta_r| = {abs(p.delta_r):.4g} Hz < {factor:g} x max coupling {g_max:.4g} Hz",
        ))
    if abs(p.delta - p.delta_r) < factor * abs(p.g_er):
        diagnostics.append(RegimeDiagnostic(
            "level_splitting_vs_g_er",
            f"|delta - delta_r| = {abs(p.delta - p.delta_r):.4g} Hz "
            f"< {factor:g} x |g_er| = {factor * abs(p.g_er):.4g} Hz",
        ))
    try:
        ep = effective_params(p)
    except InvalidArgumentError:
        diagnostics.append(RegimeDiagnostic("zero_detuning", "a detuning is exactly zero"))
        return diagnostics
    if abs(ep.matching_residual) > ep.chi / 10.0:
        diagnostics.append(RegimeDiagnostic(
            "frequency_matching",
            f"|matching residual| = {abs(ep.matching_residual):.4g} Hz "
            f"exceeds chi/10 = {ep.chi / 10.0:.4g} Hz",
        ))
    return diagnostics


# -- Hamiltonian builders (angular units) ----------------------------------


def build_H0(p: SystemParams, s: HilbertSpec) -> Operator:
    """Free Hamiltonian: level energies plus both mode energies (diagonal)."""
    h = (
        TWO_PI * p.nu_e * embed(qubit_transition("e", "e"), "qubit", s).dense()
        + TWO_PI * p.nu_r * embed(qubit_transition("r", "r"), "qubit", s).dense()
        + TWO_PI * p.nu_a * embed(number_operator(s.cutoff_a), "mode_a", s).dense()
        + TWO_PI * p.nu_b * embed(number_operator(s.cutoff_b), "mode_b", s).dense()
    )
    return Operator.from_matrix(s, h, hermitian=True)


def build_HI(p: SystemParams, s: HilbertSpec) -> Operator:
    """Qubit-resonator interaction in the rotating-wave approximation.

    g_d a |e><g| + g_gr b |r><g| + g_er b |e><r| + Hermitian conjugates.
    """
    a = embed(annihilation(s.cutoff_a), "mode_a", s).dense()
    b = embed(annihilation(s.cutoff_b), "mode_b", s).dense()
    sig_eg = embed(qubit_transition("e", "g"), "qubit", s).dense()
    sig_rg = embed(qubit_transition("r", "g"), "qubit", s).dense()
    sig_er = embed(qubit_transition("e", "r"), "qubit", s).dense()
    half = TWO_PI * (p.g_d * (a @ sig_eg) + p.g_gr * (b @ sig_rg) + p.g_er * (b @ sig_er))
    return Operator.from_matrix(s, half + half.conj().T, hermitian=True)


def _two_mode_spec(s: HilbertSpec | TwoModeSpec) -> TwoModeSpec:
    if isinstance(s, HilbertSpec):
        return s.two_mode()
    return s


def _conversion_term(chi_hz: float, phi: float, spec: TwoModeSpec) -> np.ndarray:
    """(chi/2) (e^{i phi} a^dag b^2 + e^{-i phi} a b^dag^2), angular units."""
    a = embed(annihilation(spec.cutoff_a), "mode_a", spec).dense()
    b = embed(annihilation(spec.cutoff_b), "mode_b", spec).dense()
    up = a.conj().T @ (b @ b)
    coeff = TWO_PI * 0.5 * chi_hz * cmath.exp(1j * phi)
    return coeff * up + np.conj(coeff) * up.conj().T


def build_H_eff(p: SystemParams, s: HilbertSpec | TwoModeSpec) -> Operator:
    """Effective two-mode Hamiltonian after eliminating the qubit.

    (nu_a - shift_a) a^dag a + (nu_b - shift_b) b^dag b plus the
    mode-conversion term, on the resonator-only space.
    """
    spec = _two_mode_spec(s)
    ep = effective_params(p)
    n_a = embed(number_operator(spec.cutoff_a), "mode_a", spec).dense()
    n_b = embed(number_operator(spec.cutoff_b), "mode_b", spec).dense()
    h = (
        TWO_PI * (p.nu_a - ep.shift_a) * n_a
        + TWO_PI * (p.nu_b - ep.shift_b) * n_b
        + _conversion_term(ep.chi, ep.phi_eff, spec)
    )
    return Operator.from_matrix(spec, h, hermitian=True)


def build_H_rotating(p: SystemParams, s: HilbertSpec | TwoModeSpec) -> Operator:
    """Driven two-mode Hamiltonian in the frame rotating at nu_eff.

    i epsilon (a^dag - a) plus the conversion term.  The frame removes
    the free evolution exactly only when the matching residual vanishes;
    a warning is emitted otherwise.
    """
    import warnings

    spec = _two_mode_spec(s)
    ep = effective_params(p)
    if ep.chi > 0 and abs(ep.matching_residual) > ep.chi / 10.0:
        warnings.warn(
            f"frequency matching residual {ep.matching_residual:.4g} Hz exceeds chi/10; "
            "the rotating frame does not remove the free evolution exactly",
            RuntimeWarning,
            stacklevel=2,
        )
    a = embed(annihilation(spec.cutoff_a), "mode_a", spec).dense()
    drive = 1j * TWO_PI * p.epsilon * (a.conj().T - a)
    h = drive + _conversion_term(ep.chi, ep.phi_eff, spec)
    return Operator.from_matrix(spec, h, hermitian=True)


def excitation_operator(s: HilbertSpec) -> Operator:
    """Conserved weighted excitation 2 a^dag a + b^dag b + 2|e><e| + |r><r|."""
    k = (
        2.0 * embed(number_operator(s.cutoff_a), "mode_a", s).dense()
        + embed(number_operator(s.cutoff_b), "mode_b", s).dense()
        + 2.0 * embed(qubit_transition("e", "e"), "qubit", s).dense()
        + embed(qubit_transition("r", "r"), "qubit", s).dense()
    )
    return Operator.from_matrix(s, k, hermitian=True)


def mode_excitation_operator(spec: TwoModeSpec) -> Operator:
    """Two-mode restriction 2 a^dag a + b^dag b of the conserved excitation."""
    k = (
        2.0 * embed(number_operator(spec.cutoff_a), "mode_a", spec).dense()
        + embed(number_operator(spec.cutoff_b), "mode_b", spec).dense()
    )
    return Operator.from_matrix(spec, k, hermitian=True)


def reference_params(epsilon: float = 0.0) -> SystemParams:
    """The 5.5 GHz flux-qubit design point used across docs and tests.

    Second harmonic at 5.5 GHz, fundamental at 2.75 GHz, detunings of
    550 and 275 MHz, couplings of 20/10/10 MHz, and mode decay rates of
    11 and 5.5 MHz.
    """
    return SystemParams(
        nu_a=5.5e9,
        nu_b=2.75e9,
        delta=5.5e8,
        delta_r=2.75e8,
        g_d=2.0e7,
        g_gr=1.0e7,
        g_er=1.0e7,
        gamma_a=1.1e7,
        gamma_b=5.5e6,
        epsilon=epsilon,
    )


def scaled_params(chi_over_gamma_b: float = 0.2, gamma_b: float = 1.0,
                  epsilon: float = 0.0) -> SystemParams:
    """Desk-scale parameter set with a prescribed chi/gamma_b ratio.

    Keeps gamma_a = 2 gamma_b and g_d = 2 g_gr = 2 g_er with
    delta = 2 delta_r, which makes the frequency matching residual
    vanish identically.  Used for full-quantum cross-validation where
    the Fock truncation must stay small.
    """
    if chi_over_gamma_b <= 0 or gamma_b <= 0:
        raise InvalidArgumentError("chi_over_gamma_b and gamma_b must be positive")
    delta_r = 1000.0 * gamma_b
    # chi = 2 * (2h) * h * h / (2 delta_r^2) = 2 h^3 / delta_r^2
    h = (chi_over_gamma_b * gamma_b * delta_r**2 / 2.0) ** (1.0 / 3.0)
    nu_b = 1.0e6 * gamma_b
    return SystemParams(
        nu_a=2.0 * nu_b,
        nu_b=nu_b,
        delta=2.0 * delta_r,
        delta_r=delta_r,
        g_d=2.0 * h,
        g_gr=h,
        g_er=h,
        gamma_a=2.0 * gamma_b,
        gamma_b=gamma_b,
        epsilon=epsilon,
    )
