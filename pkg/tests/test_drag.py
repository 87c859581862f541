import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bbdipole.core import CGS, Method
from bbdipole.diffusion import ThermalEnvironment, diffusion_constant
from bbdipole.drag import (
    RelativisticState,
    drag_closed_form,
    drag_coefficient_nonrel,
    force_absorbed,
    force_composed,
    force_dd,
    force_induced,
    nonrel_slopes,
    total_force_relativistic,
    two_level_drag,
    two_level_drag_quadrature,
    vacuum_friction_excited_atom,
)
from bbdipole.errors import DomainError, RegimeError, UnsupportedModelError
from bbdipole.polarizability import TwoLevelAtom

C, KB, HBAR = CGS.c, CGS.kB, CGS.hbar
# CODATA 2018, mpmath at 40 digits
M_XI_ELECTRON_300 = 1.8131605740709237e-39   # g s^-1
M_XI_SPHERE_300 = 7.5464119355236662e-30     # g s^-1
# Doppler double integral by mpmath 2D quadrature, electron, T_lab = 300 K, v = c/2
F_ELECTRON_HALF_C = {1.0: -2.71785932624707e-29, 2.0: -3.32937767465266e-28}


class TestNonrelativistic:
    def test_electron_frozen(self, electron):
        d = drag_coefficient_nonrel(electron, 300.0)
        assert d.m_xi.value == pytest.approx(M_XI_ELECTRON_300, rel=1e-12)
        assert d.xi.value == pytest.approx(M_XI_ELECTRON_300 / CGS.m_e, rel=1e-12)

    def test_sphere_frozen(self, sphere):
        assert drag_coefficient_nonrel(sphere, 300.0).m_xi.value == pytest.approx(M_XI_SPHERE_300, rel=1e-12)
        assert drag_closed_form(sphere, 300.0).m_xi.value == pytest.approx(M_XI_SPHERE_300, rel=1e-14)

    def test_massless_sphere_has_no_rate(self):
        from bbdipole.polarizability import DielectricSphere

        d = drag_coefficient_nonrel(DielectricSphere(1e-5, 2.1), 300.0)
        assert d.xi is None

    @settings(max_examples=10, deadline=None)
    @given(st.floats(min_value=1.0, max_value=1e4))
    def test_fluctuation_dissipation(self, T):
        from bbdipole.verification import reference_electron, reference_sphere

        for model in (reference_electron(), reference_sphere()):
            D = diffusion_constant(model, ThermalEnvironment(T)).value
            m_xi = drag_coefficient_nonrel(model, T).m_xi.value
            assert D == pytest.approx(2 * m_xi * KB * T, rel=1e-10)

    def test_closed_form_unsupported(self, atom):
        with pytest.raises(UnsupportedModelError):
            drag_closed_form(atom, 300.0)


class TestRelativistic:
    @pytest.mark.parametrize("ratio", sorted(F_ELECTRON_HALF_C))
    def test_against_mpmath_oracle(self, electron, ratio):
        st_ = RelativisticState(0.5 * C, 300.0, 300.0 * ratio)
        F = total_force_relativistic(st_, electron)
        assert F.value == pytest.approx(F_ELECTRON_HALF_C[ratio], rel=1e-10)
        assert F.checks["composition"] == pytest.approx(F.value, rel=1e-10)

    def test_composition_terms(self, sphere):
        st_ = RelativisticState(0.3 * C, 300.0, 300.0)
        parts = [f(st_, sphere).value for f in (force_induced, force_dd, force_absorbed)]
        comp = force_composed(st_, sphere)
        assert comp.value == pytest.approx(math.fsum(parts), rel=1e-15)
        assert parts[1] < 0 < parts[2]

    def test_antisymmetric_in_velocity(self, electron):
        fwd = total_force_relativistic(RelativisticState(0.2 * C, 300.0, 300.0), electron, cross_check=False)
        back = total_force_relativistic(RelativisticState(-0.2 * C, 300.0, 300.0), electron, cross_check=False)
        assert back.value == pytest.approx(-fwd.value, rel=1e-9)

    def test_zero_velocity_is_regime_error(self, electron):
        with pytest.raises(RegimeError):
            total_force_relativistic(RelativisticState(0.0, 300.0, 300.0), electron)
        assert force_composed(RelativisticState(0.0, 300.0, 300.0), electron).value == 0.0

    def test_superluminal_rejected(self):
        with pytest.raises(DomainError):
            RelativisticState(C, 300.0, 300.0)

    def test_slopes(self, electron, sphere):
        for model, rr in ((electron, 4 / 7), (sphere, 8 / 11)):
            s = nonrel_slopes(model, 300.0)
            m_xi = drag_closed_form(model, 300.0).m_xi.value
            assert s["slope_extrapolated"] == pytest.approx(-m_xi, rel=1e-8)
            assert s["ratio_induced_only"] == pytest.approx(1.0, rel=1e-8)
            # radiation reaction adds int x^4 alpha_I n on top of the n(n+1) drag integral
            assert s["ratio_induced_plus_radiation_reaction"] == pytest.approx(rr, rel=1e-8)


class TestTwoLevel:
    def test_closed_form_vs_quadrature(self, atom):
        for T in (300.0, 3000.0):
            assert two_level_drag(atom, T) == pytest.approx(two_level_drag_quadrature(atom, T), rel=1e-6)

    def test_inversion_gives_gain(self):
        inv = TwoLevelAtom(omega0=2e14, mu=1e-18, beta=1e8, p1=0.0, p2=1.0)
        assert two_level_drag(inv, 3000.0) > 0

    def test_requires_two_level(self, electron):
        with pytest.raises(UnsupportedModelError):
            two_level_drag(electron, 300.0)


class TestVacuumFriction:
    def test_value(self):
        F = vacuum_friction_excited_atom(1e5, 1e15, 1e8, 0.0)
        assert F == pytest.approx(-(1e5 / C**2) * HBAR * 1e15 * 1e8, rel=1e-15)

    def test_decays(self):
        assert vacuum_friction_excited_atom(1e5, 1e15, 1e8, 1e-8) == pytest.approx(
            vacuum_friction_excited_atom(1e5, 1e15, 1e8, 0.0) * math.exp(-1.0), rel=1e-14)

    def test_regime(self):
        with pytest.raises(RegimeError):
            vacuum_friction_excited_atom(0.2 * C, 1e15, 1e8, 0.0)
