import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdcsim import (
    HilbertSpec,
    InvalidArgumentError,
    SystemParams,
    basis_state,
    build_H0,
    build_HI,
    build_H_eff,
    build_H_rotating,
    commutator,
    effective_params,
    excitation_operator,
    expectation,
    reference_params,
    scaled_params,
    validate_regime,
)
from pdcsim.fock import TwoModeSpec
from pdcsim.model import TWO_PI

# Reference design point, computed by hand from the coupling/detuning set:
# chi = 2 * (2e7 * 1e7 * 1e7) / (2.75e8 * 5.5e8)
CHI_REF = 4.0e21 / 1.5125e17
SHIFT_A_REF = 4.0e14 / 5.5e8
SHIFT_B_REF = 1.0e14 / 2.75e8


class TestEffectiveParams:
    def test_reference_chi(self, ref_params):
        ep = effective_params(ref_params)
        assert ep.chi == pytest.approx(CHI_REF, rel=1e-14)
        # published rounding: about 26 kHz
        assert ep.chi == pytest.approx(26e3, rel=0.02)

    def test_reference_shifts_and_matching(self, ref_params):
        ep = effective_params(ref_params)
        assert ep.shift_a == pytest.approx(SHIFT_A_REF, rel=1e-14)
        assert ep.shift_b == pytest.approx(SHIFT_B_REF, rel=1e-14)
        # shift_a = 2 shift_b here, so nu_a = 2 nu_b gives zero residual
        assert ep.shift_a == pytest.approx(2 * ep.shift_b, rel=1e-14)
        assert ep.matching_residual == 0.0
        assert ep.nu_eff == pytest.approx(5.5e9 - SHIFT_A_REF, rel=1e-14)

    def test_threshold_drive(self, ref_params):
        ep = effective_params(ref_params)
        assert ep.epsilon_c == pytest.approx(1.1e7 * 5.5e6 / CHI_REF, rel=1e-14)

    def test_zero_coupling_gives_infinite_threshold(self, ref_params):
        from dataclasses import replace
        p = replace(ref_params, g_er=0.0)
        ep = effective_params(p)
        assert ep.chi == 0.0
        assert math.isinf(ep.epsilon_c)

    def test_zero_detuning_rejected(self, ref_params):
        from dataclasses import replace
        with pytest.raises(InvalidArgumentError):
            effective_params(replace(ref_params, delta=0.0))
        with pytest.raises(InvalidArgumentError):
            effective_params(replace(ref_params, delta_r=0.0))

    def test_default_phase(self, ref_params):
        assert effective_params(ref_params).phi_eff == pytest.approx(-math.pi / 2)

    def test_negative_detuning_flips_phase(self, ref_params):
        from dataclasses import replace
        ep = effective_params(replace(ref_params, delta=-5.5e8))
        # detuning product < 0 adds pi to the conversion phase
        assert ep.phi_eff == pytest.approx(math.pi / 2)
        assert ep.chi == pytest.approx(CHI_REF, rel=1e-14)

    @given(st.floats(min_value=0.1, max_value=10.0))
    @settings(max_examples=40)
    def test_scale_covariance(self, scale):
        p = reference_params()
        from dataclasses import replace
        scaled = replace(p, g_d=p.g_d * scale, g_gr=p.g_gr * scale, g_er=p.g_er * scale,
                         delta=p.delta * scale, delta_r=p.delta_r * scale)
        ep0, ep1 = effective_params(p), effective_params(scaled)
        assert ep1.chi == pytest.approx(scale * ep0.chi, rel=1e-12)
        assert ep1.phi_eff == pytest.approx(ep0.phi_eff, abs=1e-12)


class TestValidateRegime:
    def test_reference_point_clean(self, ref_params):
        assert validate_regime(ref_params, factor=10.0) == []

    def test_small_detuning_flagged(self, ref_params):
        from dataclasses import replace
        diags = validate_regime(replace(ref_params, delta_r=1.0e7))
        assert any(d.check == "delta_r_vs_couplings" for d in diags)

    def test_matching_violation_flagged(self, ref_params):
        from dataclasses import replace
        # push nu_a off the matching point by much more than chi/10
        diags = validate_regime(replace(ref_params, nu_a=5.5e9 + 1.0e6))
        assert any(d.check == "frequency_matching" for d in diags)

    def test_level_splitting_check(self, ref_params):
        from dataclasses import replace
        diags = validate_regime(replace(ref_params, delta=2.80e8))
        assert any(d.check == "level_splitting_vs_g_er" for d in diags)


class TestHamiltonians:
    def test_H0_diagonal_entries(self, ref_params):
        s = HilbertSpec(2, 4)
        h0 = build_H0(ref_params, s)
        assert expectation(basis_state("g", 0, 0, s), h0) == 0
        assert expectation(basis_state("g", 1, 0, s), h0).real == pytest.approx(
            TWO_PI * 5.5e9, rel=1e-14)
        assert expectation(basis_state("e", 0, 0, s), h0).real == pytest.approx(
            TWO_PI * (5.5e8 + 2 * 2.75e9), rel=1e-14)
        assert h0.is_hermitian()
        assert np.abs(h0.dense() - np.diag(np.diag(h0.dense()))).max() == 0

    def test_HI_matrix_elements(self, ref_params):
        s = HilbertSpec(2, 4)
        hi = build_HI(ref_params, s)
        amp = hi.element(s.index("e", 0, 0), s.index("g", 1, 0))
        assert amp == pytest.approx(TWO_PI * 2.0e7, rel=1e-14)
        amp2 = hi.element(s.index("r", 0, 1), s.index("g", 0, 2))
        assert amp2 == pytest.approx(TWO_PI * 1.0e7 * math.sqrt(2), rel=1e-14)
        assert np.abs(np.diag(hi.dense())).max() == 0
        assert hi.is_hermitian()

    def test_excitation_commutes(self, ref_params):
        s = HilbertSpec(2, 4)
        h = build_H0(ref_params, s) + build_HI(ref_params, s)
        # identically conserved; the bound is pure matmul roundoff
        assert commutator(h, excitation_operator(s)).max_abs() <= 1e-12 * h.max_abs()

    def test_H_eff_elements(self, ref_params):
        spec = TwoModeSpec(2, 4)
        ep = effective_params(ref_params)
        heff = build_H_eff(ref_params, spec)
        elem = heff.element(spec.index(1, 0), spec.index(0, 2))
        expected = TWO_PI * 0.5 * ep.chi * math.sqrt(2) * np.exp(1j * ep.phi_eff)
        assert elem == pytest.approx(expected, rel=1e-12)
        diag = heff.element(spec.index(1, 0), spec.index(1, 0))
        assert diag.real == pytest.approx(TWO_PI * (5.5e9 - ep.shift_a), rel=1e-14)
        assert heff.is_hermitian()

    def test_H_rotating_zero_without_drive_and_coupling(self):
        p = SystemParams(nu_a=2.0, nu_b=1.0, delta=10.0, delta_r=5.0,
                         g_d=0.0, g_gr=0.0, g_er=0.0, gamma_a=1.0, gamma_b=1.0)
        h = build_H_rotating(p, TwoModeSpec(1, 2))
        assert h.max_abs() == 0

    def test_H_rotating_drive_element(self, ref_params):
        spec = TwoModeSpec(1, 2)
        p = ref_params.with_drive(3.0e6)
        h = build_H_rotating(p, spec)
        assert h.element(spec.index(1, 0), spec.index(0, 0)) == pytest.approx(
            1j * TWO_PI * 3.0e6, rel=1e-14)

    def test_H_rotating_conversion_sign(self, ref_params):
        # with the default phase the conversion term is
        # (i chi / 2)(a b^dag^2 - a^dag b^2), so <0,2|H|1,0> = +i(chi/2)sqrt(2)
        spec = TwoModeSpec(1, 2)
        ep = effective_params(ref_params)
        h = build_H_rotating(ref_params, spec)
        elem = h.element(spec.index(0, 2), spec.index(1, 0))
        assert elem == pytest.approx(1j * TWO_PI * 0.5 * ep.chi * math.sqrt(2), rel=1e-12)

    def test_H_rotating_warns_off_matching(self, ref_params):
        from dataclasses import replace
        with pytest.warns(RuntimeWarning):
            build_H_rotating(replace(ref_params, nu_a=5.5e9 + 1e6), TwoModeSpec(1, 2))

    def test_builders_hermitian(self, desk_params):
        s = HilbertSpec(2, 4)
        for op in (build_H0(desk_params, s), build_HI(desk_params, s),
                   build_H_eff(desk_params, s), build_H_rotating(desk_params.with_drive(1.0), s)):
            dev = np.abs(op.dense() - op.dense().conj().T).max()
            assert dev <= 1e-12 * max(1.0, op.max_abs())


class TestDerivedFrequencies:
    def test_level_energies_are_derived(self, ref_params):
        assert ref_params.nu_e == pytest.approx(5.5e8 + 2 * 2.75e9)
        assert ref_params.nu_r == pytest.approx(2.75e8 + 2.75e9)

    def test_scaled_params_matching(self):
        p = scaled_params(chi_over_gamma_b=0.2, gamma_b=1.0)
        ep = effective_params(p)
        assert ep.chi == pytest.approx(0.2, rel=1e-12)
        assert ep.matching_residual == pytest.approx(0.0, abs=1e-9)
        assert validate_regime(p) == []

    def test_complex_coupling_phase_enters(self, ref_params):
        from dataclasses import replace
        p = replace(ref_params, g_d=2.0e7 * np.exp(0.3j))
        ep = effective_params(p)
        assert ep.phi_eff == pytest.approx(-math.pi / 2 - 0.3, rel=1e-12)
        assert ep.chi == pytest.approx(CHI_REF, rel=1e-13)
