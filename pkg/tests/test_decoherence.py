import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bbdipole.core import CGS
from bbdipole.decoherence import (
    KERNEL_AT_ZERO,
    DipolePairGeometry,
    angular_kernel,
    decoherence_curve,
    decoherence_factor,
    decoherence_factor_with_error,
    emission_rates,
    interference_envelope,
    kernel_deficit,
    kernel_envelope,
    lambda_from_limit,
    self_rate_from_cross_section,
    thermal_wavelength,
)
from bbdipole.diffusion import scattering_constant_lambda
from bbdipole.errors import DomainError, ExtractionError
from bbdipole.verification import angular_kernel_cubature

# int dmu dmu' cos(x(mu - mu')) 4 pi^2 (1 + mu^2 mu'^2 + (1 - mu^2)(1 - mu'^2)/2), mpmath at 40 digits
KERNEL = {
    0.0: 210.55156055657298387,
    0.5: 193.60834905899357988,
    1.0: 149.49110101071670895,
    2.0: 47.668083078512402646,
    5.0: 9.655406101617242746,
    10.0: 1.2626950717394031937,
}


class TestKernel:
    @pytest.mark.parametrize("x", sorted(KERNEL))
    def test_against_mpmath(self, x):
        assert angular_kernel(x) == pytest.approx(KERNEL[x], rel=1e-13)

    @pytest.mark.parametrize("x", sorted(KERNEL))
    def test_against_4d_cubature(self, x):
        assert angular_kernel(x) == pytest.approx(angular_kernel_cubature(x), rel=1e-6, abs=1e-12)

    def test_value_at_zero(self):
        assert KERNEL_AT_ZERO == pytest.approx(64 * math.pi**2 / 3, rel=1e-15)
        assert angular_kernel(0.0) == pytest.approx(KERNEL_AT_ZERO, rel=1e-15)

    @given(st.floats(min_value=0.0, max_value=200.0))
    def test_deficit_complements_kernel(self, x):
        assert kernel_deficit(x) + angular_kernel(x) == pytest.approx(KERNEL_AT_ZERO, rel=1e-12)

    @given(st.floats(min_value=1e-6, max_value=0.5))
    def test_deficit_small_x_accuracy(self, x):
        # leading behaviour: I(0) - I(x) = 16 pi^2 (4/9) x^2 + O(x^4)
        lead = 16 * math.pi**2 * 4 / 9 * x**2
        assert kernel_deficit(x) == pytest.approx(lead, rel=x**2)

    @given(st.floats(min_value=1e-3, max_value=1e3))
    def test_envelope_bounds_kernel(self, x):
        assert abs(angular_kernel(x)) <= kernel_envelope(x) * (1 + 1e-12)

    def test_negative_rejected(self):
        with pytest.raises(DomainError):
            angular_kernel(-1.0)
        with pytest.raises(DomainError):
            DipolePairGeometry(-1.0)


class TestRates:
    def test_self_rate_two_routes(self, sphere):
        r11, _ = emission_rates(sphere, 300.0, DipolePairGeometry(1e-3))
        assert r11 == pytest.approx(self_rate_from_cross_section(sphere, 300.0), rel=1e-10)

    def test_electron_self_rate_is_thomson_flux(self, electron):
        # photon number flux c n_gamma with n_gamma = 2 zeta(3) (kT/hbar c)^3 / pi^2
        T = 300.0
        k = CGS.kB * T / (CGS.hbar * CGS.c)
        flux = CGS.c * 2 * 1.2020569031595942854 * k**3 / math.pi**2
        assert self_rate_from_cross_section(electron, T) == pytest.approx(
            flux * electron.thomson_cross_section, rel=1e-10)

    def test_f_zero(self, sphere):
        assert decoherence_factor(sphere, 300.0, 0.0) == 0.0
        r11, r12 = emission_rates(sphere, 300.0, DipolePairGeometry(0.0))
        assert r11 == r12

    def test_f_is_r11_minus_r12(self, sphere):
        d = 3e-4
        r11, r12 = emission_rates(sphere, 300.0, DipolePairGeometry(d))
        assert decoherence_factor(sphere, 300.0, d) == pytest.approx(r11 - r12, rel=1e-9)

    def test_far_limit_inside_envelope(self, sphere):
        # kd = 50 at the peak of x^6 n(x), x = 5.98470
        T = 300.0
        k_peak = 5.984700163 * CGS.kB * T / (CGS.hbar * CGS.c)
        d = 50 / k_peak
        r11, _ = emission_rates(sphere, T, DipolePairGeometry(d))
        F = decoherence_factor(sphere, T, d)
        assert abs(F - r11) <= interference_envelope(sphere, T, d)

    def test_monotone_rise_at_small_d(self, sphere):
        ds = np.geomspace(1e-7, 1e-4, 6)
        F = [decoherence_factor(sphere, 300.0, d) for d in ds]
        assert all(b > a for a, b in zip(F, F[1:]))

    def test_error_estimate_small(self, sphere):
        F, err = decoherence_factor_with_error(sphere, 300.0, 1e-4)
        assert 0 <= err < 1e-8 * F

    def test_thermal_wavelength(self):
        assert thermal_wavelength(300.0) == pytest.approx(
            2 * math.pi * CGS.hbar * CGS.c / (CGS.kB * 300.0), rel=1e-15)


class TestLongWavelength:
    def test_lambda_limit_matches_closed_form(self, sphere):
        lam, res = lambda_from_limit(sphere, 300.0)
        assert lam == pytest.approx(scattering_constant_lambda(sphere, 300.0).value, rel=1e-2)
        assert res < 1e-2

    def test_small_d_quadratic(self, sphere):
        lam = scattering_constant_lambda(sphere, 300.0).value
        d = 1e-7
        assert decoherence_factor(sphere, 300.0, d) / d**2 == pytest.approx(lam, rel=1e-3)

    def test_extraction_error_raised(self, sphere):
        with pytest.raises(ExtractionError):
            lambda_from_limit(sphere, 300.0, fractions=(2.0, 1.0), max_residual=1e-6)

    def test_curve(self, sphere):
        curve = decoherence_curve(sphere, 300.0, [1e-6, 1e-5])
        assert len(curve.F_values) == 2 == len(curve.F_errors)
        assert curve.lambda_fit == pytest.approx(scattering_constant_lambda(sphere, 300.0).value, rel=1e-2)
