"""Monte Carlo checks: Poisson momentum kicks, recoil angles, Ornstein-Uhlenbeck
paths and the statistical independence of E_z and dE_z/dx.

Random streams come from numpy's PCG64 seeded with SeedSequence([seed, stream]),
so identical seeds give bit-identical output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .core.constants import CGS
from .core.quadrature import QuadratureConfig, integrate_finite
from .core.results import Method, RateResult
from .core.special import bose_occupation
from .diffusion import P_SPACE_UNIT, Statistics, ThermalEnvironment, diffusion_constant
from .errors import DomainError, StepRejectedError
from .polarizability import PolarizabilityModel, TwoLevelAtom, alpha_I_effective

HBAR, C, KB = CGS.hbar, CGS.c, CGS.kB

MSQ_UNIT = "g^2 cm^2 s^-2"


def rng_for(seed: int, stream: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(stream)])))


class RecoilSampling(str, Enum):
    PAPER_UNIFORM = "paper_uniform"
    PHASE_FUNCTION = "phase_function"
    FORWARD = "forward"


def _isotropic(rng, n):
    mu = rng.uniform(-1.0, 1.0, n)
    phi = rng.uniform(0.0, 2 * math.pi, n)
    s = np.sqrt(1 - mu**2)
    return np.stack([s * np.cos(phi), s * np.sin(phi), mu], axis=1)


def _rayleigh_cos(rng, n):
    """cos(theta) with density (3/8)(1 + c^2) on [-1, 1], by exact cubic inversion."""
    u = rng.uniform(0.0, 1.0, n)
    # CDF (c^3 + 3c + 4)/8 = u  ->  c^3 + 3c + 4 - 8u = 0 (one real root)
    q = 4 - 8 * u
    d = np.sqrt(q**2 / 4 + 1)
    return np.cbrt(-q / 2 + d) + np.cbrt(-q / 2 - d)


def _scattered(rng, k_in, sampling: RecoilSampling):
    n = k_in.shape[0]
    if sampling is RecoilSampling.PAPER_UNIFORM:
        return _isotropic(rng, n)
    if sampling is RecoilSampling.FORWARD:
        return k_in.copy()
    c = _rayleigh_cos(rng, n)
    phi = rng.uniform(0.0, 2 * math.pi, n)
    # orthonormal frame around k_in
    helper = np.where(np.abs(k_in[:, [2]]) < 0.9, [[0.0, 0.0, 1.0]], [[1.0, 0.0, 0.0]])
    e1 = np.cross(k_in, helper)
    e1 /= np.linalg.norm(e1, axis=1, keepdims=True)
    e2 = np.cross(k_in, e1)
    s = np.sqrt(1 - c**2)
    return c[:, None] * k_in + (s * np.cos(phi))[:, None] * e1 + (s * np.sin(phi))[:, None] * e2


def recoil_projections(sampling: RecoilSampling | str, samples: int, rng) -> np.ndarray:
    """(k - k').x for ``samples`` scattering events with isotropic incidence."""
    sampling = RecoilSampling(sampling)
    k_in = _isotropic(rng, samples)
    k_out = _scattered(rng, k_in, sampling)
    return k_in[:, 0] - k_out[:, 0]


def recoil_second_moment(sampling: RecoilSampling | str, samples: int, seed: int) -> tuple[float, float]:
    """Mean of [(k - k').x]^2 in units of (hbar omega / c)^2, with its standard error.

    paper_uniform draws the scattered direction independently and uniformly
    over the sphere; phase_function draws it from the (1 + cos^2) Rayleigh law.
    """
    if samples < 2:
        raise DomainError("need at least two samples")
    d2 = recoil_projections(sampling, samples, rng_for(seed)) ** 2
    return float(d2.mean()), float(d2.std(ddof=1) / math.sqrt(samples))


def phase_function_moment_quadrature() -> float:
    """(1/3) <4 sin^2(theta/2)> under the (3/8)(1 + cos^2) law, by quadrature."""
    val, _ = integrate_finite(lambda c: 2 * (1 - c) * 0.375 * (1 + c * c), -1.0, 1.0)
    return val / 3


@dataclass(frozen=True)
class KickProcessSpec:
    model: PolarizabilityModel
    T: float
    beta: float
    frequency_bins: int = 256
    duration: float = 1e4  # in units of 1/beta
    seed: int = 0
    sampling: RecoilSampling = RecoilSampling.PAPER_UNIFORM

    def __post_init__(self):
        if not (self.T > 0 and self.beta > 0):
            raise DomainError("T and beta must be positive")
        if self.duration < 20:
            raise DomainError("duration must be at least 20/beta for a steady state")
        if self.frequency_bins < 1:
            raise DomainError("need at least one frequency bin")
        object.__setattr__(self, "sampling", RecoilSampling(self.sampling))


@dataclass(frozen=True)
class KickSimulationResult:
    msq_momentum: RateResult
    diffusion_estimate: RateResult
    reference: RateResult
    n_kicks: int
    warning: str | None = None

    @property
    def z_score(self) -> float:
        err = self.diffusion_estimate.err_estimate
        if err == 0:
            return 0.0 if self.diffusion_estimate.value == self.reference.value else math.inf
        return (self.diffusion_estimate.value - self.reference.value) / err


@dataclass(frozen=True)
class _BinTable:
    rates: np.ndarray     # photons per second scattered, per bin
    omega_rms: np.ndarray  # sqrt(<omega^2>) within each bin

    @property
    def total(self) -> float:
        return float(self.rates.sum())


def _bin_table(model: PolarizabilityModel, T: float, bins: int, cfg: QuadratureConfig | None) -> _BinTable:
    """Scattered-photon rate u(omega) = 4 omega^3 alpha_I n / (pi c^3) integrated per bin."""
    omega_T = KB * T / HBAR
    x_max = 30.0
    if isinstance(model, TwoLevelAtom):
        x_max = max(x_max, 2 * model.omega0 / omega_T)
    edges = np.linspace(0.0, x_max, bins + 1)
    rates = np.empty(bins)
    m2 = np.empty(bins)
    pref = 4 * omega_T**4 / (math.pi * C**3)

    def u(x):
        return x**3 * alpha_I_effective(model, x * omega_T) * bose_occupation(x)

    for i, (a, b) in enumerate(zip(edges[:-1], edges[1:])):
        r, _ = integrate_finite(u, a, b, cfg)
        s, _ = integrate_finite(lambda x: x * x * u(x), a, b, cfg)
        rates[i] = pref * r
        m2[i] = s / r if r > 0 else 0.0
    if np.any(rates < 0):
        raise DomainError("negative scattering rate (population inversion)")
    return _BinTable(rates, omega_T * np.sqrt(m2))


def _filtered_process(times, kicks, beta, t_end):
    """Exact solution of p' = -beta p + sum kicks delta(t - t_j) from p(0) = 0.

    Returns (integral of p^2 dt over [0, t_end], p just after each kick).
    Blocks keep beta * (block span) below 200 so the exponential weights stay finite.
    """
    n = times.size
    p_after = np.empty(n)
    carry_p, carry_t = 0.0, 0.0
    start = 0
    while start < n:
        stop = int(np.searchsorted(times, times[start] + 200.0 / beta, side="right"))
        stop = max(stop, start + 1)
        t = times[start:stop]
        w = np.exp(beta * (t - t[0]))
        acc = np.cumsum(kicks[start:stop] * w)
        p_after[start:stop] = carry_p * np.exp(-beta * (t - carry_t)) + acc / w
        carry_p, carry_t = p_after[stop - 1], t[-1]
        start = stop
    # p^2 decays as exp(-2 beta s) between kicks
    gaps = np.diff(np.append(times, t_end))
    integral = np.sum(p_after**2 * -np.expm1(-2 * beta * gaps) / (2 * beta))
    return integral, p_after


def simulate_kicks(spec: KickProcessSpec, cfg: QuadratureConfig | None = None, batches: int = 50) -> KickSimulationResult:
    """Poisson kick process driven by blackbody photon scattering.

    Photons of each frequency bin arrive as an independent Poisson stream at
    the bin's scattering rate; each kick is (hbar omega / c)(k - k').x with
    the bin's rms frequency.  The steady-state <p^2> is the time average of
    p^2 after discarding 10/beta of warm-up, with a batch-means error; the
    diffusion estimate is 2 beta <p^2>.  The comparison value is the
    particle-statistics diffusion constant, since independent arrivals carry
    no Bose bunching.
    """
    beta = spec.beta
    t_end = spec.duration / beta
    table = _bin_table(spec.model, spec.T, spec.frequency_bins, cfg)
    reference = diffusion_constant(spec.model, ThermalEnvironment(spec.T, Statistics.PARTICLE), cfg)
    rng = rng_for(spec.seed, 0)
    n_kicks = int(rng.poisson(table.total * t_end)) if table.total > 0 else 0
    if n_kicks == 0:
        zero = RateResult(0.0, MSQ_UNIT, 0.0, Method.MONTE_CARLO)
        return KickSimulationResult(zero, RateResult(0.0, P_SPACE_UNIT, 0.0, Method.MONTE_CARLO),
                                    reference, 0, "no photon arrivals in the simulated window")
    times = np.sort(rng.uniform(0.0, t_end, n_kicks))
    which = rng.choice(table.rates.size, size=n_kicks, p=table.rates / table.total)
    proj = recoil_projections(spec.sampling, n_kicks, rng_for(spec.seed, 1))
    kicks = HBAR * table.omega_rms[which] / C * proj

    warm = 10.0 / beta
    span = t_end - warm
    edges = warm + span * np.arange(batches + 1) / batches
    batch_means = np.empty(batches)
    _, p_after = _filtered_process(times, kicks, beta, t_end)
    # p at each batch edge, for exact piecewise integration
    idx_edges = np.searchsorted(times, edges, side="right") - 1
    for b in range(batches):
        lo, hi = edges[b], edges[b + 1]
        i0, i1 = idx_edges[b], idx_edges[b + 1]
        # segment from lo to the first kick after lo (or hi)
        p_lo = p_after[i0] * math.exp(-beta * (lo - times[i0])) if i0 >= 0 else 0.0
        first = times[i0 + 1] if i0 + 1 <= i1 else hi
        total = p_lo**2 * -math.expm1(-2 * beta * (first - lo)) / (2 * beta)
        if i1 > i0:
            ts = times[i0 + 1:i1 + 1]
            ends = np.append(ts[1:], hi)
            ps = p_after[i0 + 1:i1 + 1]
            total += float(np.sum(ps**2 * -np.expm1(-2 * beta * (ends - ts)) / (2 * beta)))
        batch_means[b] = total / (hi - lo)
    msq = float(batch_means.mean())
    msq_err = float(batch_means.std(ddof=1) / math.sqrt(batches))
    warning = None
    kicks_per_corr = n_kicks / spec.duration
    if n_kicks < 1e4 or kicks_per_corr < 1:
        warning = f"low statistics: {n_kicks} kicks, {kicks_per_corr:.3g} per correlation time"
    msq_r = RateResult(msq, MSQ_UNIT, msq_err, Method.MONTE_CARLO)
    d_r = RateResult(2 * beta * msq, P_SPACE_UNIT, 2 * beta * msq_err, Method.MONTE_CARLO)
    return KickSimulationResult(msq_r, d_r, reference, n_kicks, warning)


def beta_for_kicks(model: PolarizabilityModel, T: float, n_kicks: float, duration: float = 1e4,
                   frequency_bins: int = 256, cfg: QuadratureConfig | None = None) -> float:
    """Drag rate that makes the expected kick count n_kicks over duration/beta."""
    total = _bin_table(model, T, frequency_bins, cfg).total
    if total <= 0:
        raise DomainError("zero scattering rate")
    return total * duration / n_kicks


@dataclass(frozen=True)
class OUEnsemble:
    times: np.ndarray
    mean: np.ndarray
    variance: np.ndarray
    mean_err: np.ndarray
    variance_err: np.ndarray
    final_velocities: np.ndarray = field(repr=False)


def ou_trajectories(
    xi: float, m: float, T: float, n_paths: int, t_final: float, dt: float, seed: int,
    v0: float = 0.0, record_every: int = 1,
) -> OUEnsemble:
    """Euler-Maruyama ensemble of dv = -xi v dt + sqrt(2 xi kB T / m) dW from v(0) = v0."""
    if not (xi > 0 and m > 0 and T >= 0 and n_paths >= 2 and t_final > 0 and dt > 0):
        raise DomainError("need xi, m, t_final, dt > 0, T >= 0 and n_paths >= 2")
    if dt > 0.01 / xi:
        raise StepRejectedError(f"dt={dt} exceeds 0.01/xi", suggested_dt=0.01 / xi)
    n_steps = int(math.ceil(t_final / dt - 1e-9))
    h = t_final / n_steps
    amp = math.sqrt(2 * xi * KB * T / m * h)
    rng = rng_for(seed, 0)
    v = np.full(n_paths, float(v0))
    times, means, vars_, merr, verr = [0.0], [v.mean()], [0.0], [0.0], [0.0]
    for k in range(1, n_steps + 1):
        v = v - xi * v * h
        if amp:
            v = v + amp * rng.standard_normal(n_paths)
        if k % record_every == 0 or k == n_steps:
            var = v.var(ddof=1)
            times.append(k * h)
            means.append(v.mean())
            vars_.append(var)
            merr.append(math.sqrt(var / n_paths))
            verr.append(var * math.sqrt(2.0 / (n_paths - 1)))
    return OUEnsemble(np.array(times), np.array(means), np.array(vars_), np.array(merr), np.array(verr), v)


@dataclass(frozen=True)
class FieldSampleSpec:
    mode_count: int = 200
    sample_count: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if self.mode_count < 1 or self.sample_count < 2:
            raise DomainError("need mode_count >= 1 and sample_count >= 2")


@dataclass(frozen=True)
class IndependenceReport:
    correlation: float
    correlation_bound: float
    max_cf_deviation: float
    cf_bound: float
    grid: list

    @property
    def correlation_ok(self) -> bool:
        return abs(self.correlation) <= self.correlation_bound

    @property
    def factorization_ok(self) -> bool:
        return self.max_cf_deviation <= self.cf_bound

    @property
    def passed(self) -> bool:
        return self.correlation_ok and self.factorization_ok


def sample_field_and_gradient(spec: FieldSampleSpec) -> tuple[np.ndarray, np.ndarray]:
    """Samples of X = E_z and Y = dE_z/dx at the origin of an isotropic random field.

    Each sample superposes ``mode_count`` plane waves with isotropic wave
    vectors of unit length, random transverse polarization, Rayleigh
    amplitudes and uniform phases.
    """
    rng = rng_for(spec.seed, 0)
    n, M = spec.sample_count, spec.mode_count
    khat = _isotropic(rng, n * M).reshape(n, M, 3)
    helper = np.where(np.abs(khat[..., [2]]) < 0.9, np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0]))
    e1 = np.cross(khat, helper)
    e1 /= np.linalg.norm(e1, axis=-1, keepdims=True)
    e2 = np.cross(khat, e1)
    psi = rng.uniform(0.0, 2 * math.pi, (n, M))
    eps_z = np.cos(psi) * e1[..., 2] + np.sin(psi) * e2[..., 2]
    amp = rng.rayleigh(1.0, (n, M))
    phase = rng.uniform(0.0, 2 * math.pi, (n, M))
    X = np.sum(amp * eps_z * np.cos(phase), axis=1)
    Y = -np.sum(amp * eps_z * khat[..., 0] * np.sin(phase), axis=1)
    return X, Y


def gaussian_independence_test(spec: FieldSampleSpec, dependent_control: bool = False) -> IndependenceReport:
    """Correlation and characteristic-function factorization test for (X, Y).

    With ``dependent_control`` Y is replaced by X, which must fail.
    """
    X, Y = sample_field_and_gradient(spec)
    if dependent_control:
        Y = X.copy()
    X = (X - X.mean()) / X.std()
    Y = (Y - Y.mean()) / Y.std()
    n = X.size
    corr = float(np.mean(X * Y))
    grid = [-1.0, -0.5, 0.5, 1.0]
    worst = 0.0
    for s in grid:
        cx = np.mean(np.exp(1j * s * X))
        for t in grid:
            cy = np.mean(np.exp(1j * t * Y))
            cxy = np.mean(np.exp(1j * (s * X + t * Y)))
            worst = max(worst, abs(cxy - cx * cy))
    return IndependenceReport(corr, 3 / math.sqrt(n), float(worst), 5 / math.sqrt(n), grid)
