import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bbdipole.core import CGS
from bbdipole.diffusion import Statistics
from bbdipole.equilibrium import (
    BRANCH_FOR_STATISTICS,
    Branch,
    VelocityDistribution,
    analytic_occupation,
    equilibrium_residual,
    fokker_planck_evolve,
    fokker_planck_history,
    gaussian_start,
    integration_constant,
    maxwell_boltzmann,
    ou_mean,
    ou_variance,
    spectrum_ode_solve,
    thermal_speed,
    velocity_grid,
)
from bbdipole.errors import DomainError, StepRejectedError, StiffnessError

T = 300.0
WT = CGS.kB * T / CGS.hbar
# electron alpha_I ~ 1/omega leaves an x^4 weight: (4!/2^5) / (4!/2^5 + 4!) = 1/33
WIEN_RESIDUAL_ELECTRON = 1 / 33


class TestSpectrumOde:
    def test_branch_mapping(self):
        assert BRANCH_FOR_STATISTICS[Statistics.PARTICLE] is Branch.WIEN
        assert BRANCH_FOR_STATISTICS[Statistics.WAVE] is Branch.RAYLEIGH_JEANS
        assert BRANCH_FOR_STATISTICS[Statistics.FULL] is Branch.PLANCK

    @pytest.mark.parametrize("branch", list(Branch))
    def test_matches_analytic(self, branch):
        x = np.linspace(0.1, 20.0, 200)
        n0 = float(analytic_occupation(branch, 1.0, 1.0 if branch is Branch.WIEN else 0.0))
        sol = spectrum_ode_solve(branch, T, WT, n0, x * WT)
        exact = analytic_occupation(branch, x, sol.integration_constant)
        assert np.max(np.abs(sol.n_values / exact - 1)) < 1e-9

    @settings(max_examples=20, deadline=None)
    @given(st.floats(min_value=0.2, max_value=10.0), st.floats(min_value=-0.15, max_value=0.5))
    def test_planck_with_chemical_potential(self, x0, C0):
        n0 = float(analytic_occupation(Branch.PLANCK, x0, C0))
        assert integration_constant(Branch.PLANCK, x0, n0) == pytest.approx(C0, abs=1e-12)
        x = np.array([0.5, 3.0, 12.0])
        sol = spectrum_ode_solve(Branch.PLANCK, T, x0 * WT, n0, x * WT)
        assert sol.n_values == pytest.approx(analytic_occupation(Branch.PLANCK, x, C0), rel=1e-9)

    def test_planck_anchor_gives_zero_constant(self):
        n0 = 1 / math.expm1(2.0)
        assert integration_constant("planck", 2.0, n0) == pytest.approx(0.0, abs=1e-15)

    def test_rayleigh_jeans_blowup_is_stiffness(self):
        # 1/n = x + C with C = -1.5: n diverges at x = 1.5, inside the grid
        with pytest.raises(StiffnessError):
            spectrum_ode_solve("rayleigh_jeans", T, 2.0 * WT, 2.0, np.array([0.5, 3.0]) * WT)

    def test_invalid_grid(self):
        with pytest.raises(DomainError):
            spectrum_ode_solve("planck", T, WT, 0.5, [])


class TestResidual:
    def test_planck_balances(self, electron, sphere):
        for m in (electron, sphere):
            assert abs(equilibrium_residual(m, T)) < 1e-12

    def test_wien_imbalance_electron(self, electron):
        assert equilibrium_residual(electron, T, "wien") == pytest.approx(WIEN_RESIDUAL_ELECTRON, rel=1e-10)

    def test_rayleigh_jeans_rejected(self, electron):
        with pytest.raises(DomainError):
            equilibrium_residual(electron, T, "rayleigh_jeans")


class TestFokkerPlanck:
    M, XI = 1e-14, 1.0

    def start(self, v0=3.0, s0=0.2, cells=1024):
        vt = thermal_speed(self.M, T)
        return gaussian_start(v0 * vt, s0 * vt, self.M, T, self.XI, n_cells=cells)

    def test_relaxes_to_maxwell(self):
        f = fokker_planck_evolve(self.start(), self.XI, self.M, T, 10.0, 1e-3)
        assert f.l1_distance(maxwell_boltzmann(f.v_grid, self.M, T)) < 1e-3
        assert f.norm == pytest.approx(1.0, abs=1e-12)

    def test_tracks_ou_moments(self):
        f0 = self.start()
        vt = thermal_speed(self.M, T)
        hist = fokker_planck_history(f0, self.XI, self.M, T, [0.5, 1.0, 2.0], 1e-3)
        for t, f in hist:
            assert abs(f.mean - ou_mean(f0.mean, self.XI, t)) < 1e-4 * 3 * vt
            assert f.variance == pytest.approx(ou_variance(f0.variance, self.XI, self.M, T, t), rel=1e-4)

    def test_maxwell_is_stationary(self):
        v = velocity_grid(self.M, T)
        mb = maxwell_boltzmann(v, self.M, T)
        mb = mb / (mb.sum() * (v[1] - v[0]))
        f0 = VelocityDistribution(v, mb, self.M, T, self.XI)
        f = fokker_planck_evolve(f0, self.XI, self.M, T, 1.0, 1e-2)
        assert f.l1_distance(mb) < 1e-10

    def test_narrow_grid_rejected(self):
        f0 = gaussian_start(0.0, thermal_speed(self.M, T), self.M, T, self.XI, width=4.0)
        with pytest.raises(DomainError):
            fokker_planck_evolve(f0, self.XI, self.M, T, 1.0, 1e-2)

    def test_unnormalized_rejected(self):
        f0 = self.start()
        bad = VelocityDistribution(f0.v_grid, 2 * f0.f_values, self.M, T, self.XI)
        with pytest.raises(DomainError):
            fokker_planck_evolve(bad, self.XI, self.M, T, 1.0, 1e-2)

    def test_step_rejection_reports_smaller_dt(self):
        # a near-delta start with a Crank-Nicolson step of 100/xi oscillates negative
        f0 = self.start(v0=0.0, s0=0.01)
        with pytest.raises(StepRejectedError) as info:
            fokker_planck_history(f0, self.XI, self.M, T, [1e-9, 100.0], 200.0)
        assert info.value.suggested_dt == pytest.approx(100.0)
