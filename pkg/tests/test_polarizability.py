import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bbdipole.core import CGS
from bbdipole.errors import ConsistencyError, DomainError
from bbdipole.polarizability import (
    DielectricSphere,
    Electron,
    TwoLevelAtom,
    alpha,
    alpha_I_effective,
    alpha_signed,
    differential_cross_section,
    radiative_alpha_I,
    rayleigh_cross_section,
    satisfies_optical_theorem,
)

C = CGS.c
omegas = st.floats(min_value=1e10, max_value=1e17)


class TestElectron:
    def test_classical_radius(self, electron):
        assert electron.classical_radius == pytest.approx(2.8179403262e-13, rel=1e-9)

    def test_thomson(self, electron):
        assert electron.thomson_cross_section == pytest.approx(6.6524587321e-25, rel=1e-9)

    @given(omegas)
    def test_optical_theorem_exact(self, w):
        e = Electron()
        assert np.imag(e.alpha(w)) == pytest.approx(radiative_alpha_I(e, w), rel=1e-12)

    @given(omegas)
    def test_low_frequency_alpha_I(self, w):
        e = Electron()
        # the radiative correction is (tau_e omega)^2 <= 4e-14 in this range
        assert alpha_I_effective(e, w) == pytest.approx(e.alpha_I_approx(w), rel=1e-12)
        assert e.alpha_I_approx(w) == pytest.approx(C * e.thomson_cross_section / (4 * math.pi * w), rel=1e-13)

    def test_cross_section_is_thomson(self, electron):
        assert rayleigh_cross_section(electron, 1e15) == pytest.approx(electron.thomson_cross_section, rel=1e-12)

    def test_invalid(self):
        with pytest.raises(DomainError):
            Electron(mass=-1.0)


class TestSphere:
    def test_clausius_mossotti(self, sphere):
        assert sphere.clausius_mossotti == pytest.approx(1.1 / 4.1, rel=1e-15)

    @given(omegas)
    def test_lossless_uses_radiative_alpha_I(self, w):
        s = DielectricSphere(1e-5, 2.1)
        expected = 2 / 3 * (w / C) ** 3 * (s.radius**3 * 1.1 / 4.1) ** 2
        assert alpha_I_effective(s, w) == pytest.approx(expected, rel=1e-12)

    def test_lossy_uses_imaginary_part(self):
        s = DielectricSphere(1e-5, 2.1 + 0.1j)
        assert not satisfies_optical_theorem(s)
        assert alpha_I_effective(s, 1e14) == pytest.approx(np.imag(s.alpha(1e14)), rel=1e-15)

    def test_rayleigh_both_forms(self, sphere):
        w = 3e14
        sigma = rayleigh_cross_section(sphere, w)
        assert sigma == pytest.approx(8 * math.pi / 3 * (w / C) ** 4 * abs(sphere.alpha(w)) ** 2, rel=1e-15)

    def test_froehlich_pole_rejected(self):
        with pytest.raises(DomainError):
            DielectricSphere(1e-5, -2)

    def test_differential_integrates_to_total(self, sphere):
        w = 2e14
        th = np.linspace(0, math.pi, 4001)
        vals = differential_cross_section(sphere, w, th) * 2 * math.pi * np.sin(th)
        total = np.trapezoid(vals, th) if hasattr(np, "trapezoid") else np.trapz(vals, th)
        assert total == pytest.approx(rayleigh_cross_section(sphere, w), rel=1e-6)

    def test_angle_domain(self, sphere):
        with pytest.raises(DomainError):
            differential_cross_section(sphere, 1e14, 4.0)


class TestTwoLevel:
    def test_absorptive_sign(self, atom):
        assert np.imag(atom.alpha(atom.omega0)) > 0
        assert alpha_I_effective(atom, atom.omega0) == pytest.approx(atom.alpha_I_lorentzian(atom.omega0), rel=1e-15)

    def test_inversion_flips_sign(self):
        inv = TwoLevelAtom(omega0=2e14, mu=1e-18, beta=1e8, p1=0.0, p2=1.0)
        assert alpha_I_effective(inv, 2e14) < 0

    def test_negative_frequency_branch_is_conjugate(self, atom):
        w = np.array([-3e14, 3e14])
        a = alpha_signed(atom, w)
        assert a[0] == np.conj(a[1])

    def test_electron_signed_direct(self, electron):
        assert alpha_signed(electron, -1e15) == electron.alpha(-1e15)
        with pytest.raises(DomainError):
            alpha_signed(electron, 0.0)

    def test_optical_theorem_not_claimed(self, atom):
        assert not satisfies_optical_theorem(atom)

    @pytest.mark.parametrize("kw", [dict(p1=0.7, p2=0.7), dict(p1=1.2, p2=-0.2), dict(beta=0.0)])
    def test_invalid(self, kw):
        base = dict(omega0=2e14, mu=1e-18, beta=1e8)
        with pytest.raises(DomainError):
            TwoLevelAtom(**{**base, **kw})


def test_positive_frequency_required(electron):
    with pytest.raises(DomainError):
        alpha(electron, -1.0)


def test_consistency_error_when_forms_disagree(monkeypatch, sphere):
    import bbdipole.polarizability as pol

    monkeypatch.setattr(pol, "alpha_I_effective", lambda m, w: 2 * radiative_alpha_I(m, w))
    with pytest.raises(ConsistencyError):
        rayleigh_cross_section(sphere, 1e14)
