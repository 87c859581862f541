import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bbdipole.core import CGS
from bbdipole.errors import DomainError, StepRejectedError
from bbdipole.stochastic import (
    FieldSampleSpec,
    KickProcessSpec,
    RecoilSampling,
    beta_for_kicks,
    gaussian_independence_test,
    ou_trajectories,
    phase_function_moment_quadrature,
    recoil_projections,
    recoil_second_moment,
    rng_for,
    sample_field_and_gradient,
    simulate_kicks,
)


class TestRng:
    def test_streams_differ_and_repeat(self):
        a = rng_for(7, 0).standard_normal(5)
        assert np.array_equal(a, rng_for(7, 0).standard_normal(5))
        assert not np.array_equal(a, rng_for(7, 1).standard_normal(5))


class TestRecoil:
    @pytest.mark.parametrize("sampling", ["paper_uniform", "phase_function"])
    def test_second_moment_two_thirds(self, sampling):
        mean, err = recoil_second_moment(sampling, 400_000, 3)
        assert abs(mean - 2 / 3) < 4 * err

    def test_forward_scattering_gives_no_recoil(self):
        assert np.all(recoil_projections(RecoilSampling.FORWARD, 1000, rng_for(0)) == 0.0)

    def test_phase_function_quadrature(self):
        assert phase_function_moment_quadrature() == pytest.approx(2 / 3, rel=1e-14)

    def test_rayleigh_angle_distribution(self):
        from bbdipole.stochastic import _rayleigh_cos

        c = _rayleigh_cos(rng_for(5), 400_000)
        assert np.all(np.abs(c) <= 1 + 1e-12)
        # <c^2> under (3/8)(1 + c^2) is 2/5
        assert np.mean(c**2) == pytest.approx(0.4, abs=4 * np.std(c**2) / math.sqrt(c.size))

    @settings(max_examples=20, deadline=None)
    @given(st.integers(min_value=0, max_value=2**32 - 1))
    def test_bit_identical(self, seed):
        assert recoil_second_moment("paper_uniform", 1000, seed) == recoil_second_moment("paper_uniform", 1000, seed)

    def test_projection_bounds(self):
        p = recoil_projections("phase_function", 10_000, rng_for(2))
        assert np.all(np.abs(p) <= 2 + 1e-12)

    def test_too_few_samples(self):
        with pytest.raises(DomainError):
            recoil_second_moment("paper_uniform", 1, 0)


class TestKicks:
    def test_diffusion_within_three_sigma(self, sphere):
        T = 300.0
        beta = beta_for_kicks(sphere, T, 2e5)
        r = simulate_kicks(KickProcessSpec(sphere, T, beta, seed=11))
        assert r.warning is None
        assert abs(r.z_score) < 3
        assert r.n_kicks == pytest.approx(2e5, rel=0.01)

    def test_reproducible(self, electron):
        spec = KickProcessSpec(electron, 300.0, beta_for_kicks(electron, 300.0, 2e4), seed=5)
        a, b = simulate_kicks(spec), simulate_kicks(spec)
        assert a.diffusion_estimate == b.diffusion_estimate
        assert a.msq_momentum == b.msq_momentum

    def test_low_statistics_warning(self, electron):
        spec = KickProcessSpec(electron, 300.0, beta_for_kicks(electron, 300.0, 500, duration=100), duration=100)
        assert simulate_kicks(spec).warning

    def test_short_duration_rejected(self, electron):
        with pytest.raises(DomainError):
            KickProcessSpec(electron, 300.0, 1.0, duration=5)


class TestOrnsteinUhlenbeck:
    def test_stationary_variance(self):
        m, T, xi = 1e-14, 300.0, 2.0
        ens = ou_trajectories(xi, m, T, 20_000, 5.0, 0.005, seed=1, record_every=100)
        target = CGS.kB * T / m
        # Euler-Maruyama stationary variance is kT/m / (1 - xi h / 2)
        em = target / (1 - xi * 0.005 / 2)
        assert abs(ens.variance[-1] - em) < 4 * ens.variance_err[-1]

    def test_mean_decay(self):
        ens = ou_trajectories(1.0, 1e-14, 0.0, 2, 1.0, 0.001, seed=0, v0=1.0)
        # deterministic when T = 0: (1 - h)^n
        assert ens.mean[-1] == pytest.approx((1 - 0.001) ** 1000, rel=1e-12)

    def test_large_step_rejected(self):
        with pytest.raises(StepRejectedError) as info:
            ou_trajectories(1.0, 1e-14, 300.0, 10, 1.0, 0.1, seed=0)
        assert info.value.suggested_dt == pytest.approx(0.01)

    def test_reproducible(self):
        a = ou_trajectories(1.0, 1e-14, 300.0, 100, 0.5, 0.01, seed=9)
        b = ou_trajectories(1.0, 1e-14, 300.0, 100, 0.5, 0.01, seed=9)
        assert np.array_equal(a.final_velocities, b.final_velocities)


class TestIndependence:
    def test_field_gradient_independent(self):
        rep = gaussian_independence_test(FieldSampleSpec(200, 10_000, seed=4))
        assert rep.passed

    def test_negative_control_fails(self):
        rep = gaussian_independence_test(FieldSampleSpec(200, 10_000, seed=4), dependent_control=True)
        assert not rep.factorization_ok
        assert not rep.correlation_ok

    def test_variances(self):
        # per mode <a^2> <eps_z^2> <cos^2> = 2 (1/3)(1/2); the gradient weights by k_x^2:
        # <k_x^2 (1 - k_z^2)> / <1 - k_z^2> = (2/15) / (1/3) = 2/5
        X, Y = sample_field_and_gradient(FieldSampleSpec(200, 20_000, seed=8))
        assert np.var(X) == pytest.approx(200 / 3, rel=0.05)
        assert np.var(Y) / np.var(X) == pytest.approx(0.4, rel=0.05)

    def test_invalid(self):
        with pytest.raises(DomainError):
            FieldSampleSpec(0, 10)
