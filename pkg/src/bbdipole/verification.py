"""Cross-validation suite behind the ``verify`` command.

Each criterion function returns rows of :class:`Check`; a row passes when
its residual is at or below its threshold.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .core.constants import CGS
from .decoherence import (
    angular_kernel,
    decoherence_factor,
    emission_rates,
    DipolePairGeometry,
    interference_envelope,
    lambda_from_limit,
)
from .diffusion import (
    AirEnvironment,
    Statistics,
    ThermalEnvironment,
    air_diffusion,
    diffusion_closed_form,
    diffusion_constant,
    k_space_diffusion,
    scattering_constant_lambda,
)
from .drag import (
    RelativisticState,
    drag_closed_form,
    drag_coefficient_nonrel,
    nonrel_slopes,
    total_force_relativistic,
)
from .equilibrium import (
    Branch,
    analytic_occupation,
    equilibrium_residual,
    fokker_planck_history,
    gaussian_start,
    integration_constant,
    maxwell_boltzmann,
    ou_mean,
    ou_variance,
    spectrum_ode_solve,
    thermal_speed,
)
from .polarizability import DielectricSphere, Electron
from .stochastic import (
    FieldSampleSpec,
    KickProcessSpec,
    beta_for_kicks,
    gaussian_independence_test,
    recoil_second_moment,
    simulate_kicks,
)

HBAR, C, KB = CGS.hbar, CGS.c, CGS.kB

SPHERE_RADIUS = 1e-5  # cm
SPHERE_EPSILON = 2.1
SPHERE_DENSITY = 2.2  # g cm^-3
AIR_MASS = 28.97 * 1.66053906660e-24  # g
AIR_DENSITY = 2.5e19  # cm^-3


def reference_electron() -> Electron:
    return Electron()


def reference_sphere() -> DielectricSphere:
    mass = SPHERE_DENSITY * 4 * math.pi / 3 * SPHERE_RADIUS**3
    return DielectricSphere(SPHERE_RADIUS, SPHERE_EPSILON, mass=mass)


@dataclass(frozen=True)
class Check:
    criterion: int
    name: str
    residual: float
    threshold: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.threshold)

    def to_dict(self) -> dict:
        return {"criterion": self.criterion, "name": self.name, "residual": self.residual,
                "threshold": self.threshold, "passed": self.passed, "detail": self.detail}


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


def angular_kernel_cubature(x: float, n_mu: int = 64, n_phi: int = 16) -> float:
    """Brute-force 4D cubature of int dOmega dOmega' exp(i x (k - k').z)(1 + (k.k')^2).

    Gauss-Legendre in both polar cosines and the trapezoid rule in both
    azimuths (exact here, the integrand being a low-order trigonometric
    polynomial in the azimuths).
    """
    mu, w = np.polynomial.legendre.leggauss(n_mu)
    phi = 2 * math.pi * np.arange(n_phi) / n_phi
    wphi = 2 * math.pi / n_phi
    s = np.sqrt(1 - mu**2)
    M1, P1, M2, P2 = np.meshgrid(mu, phi, mu, phi, indexing="ij")
    S1, _, S2, _ = np.meshgrid(s, phi, s, phi, indexing="ij")
    W = np.einsum("i,k->ik", w, w)[:, None, :, None] * wphi**2
    cos_theta = S1 * S2 * np.cos(P1 - P2) + M1 * M2
    integrand = np.cos(x * (M1 - M2)) * (1 + cos_theta**2)
    return float(np.sum(W * integrand))


def criterion_1() -> list[Check]:
    e = reference_electron()
    rows = []
    t0 = time.perf_counter()
    for T in (3.0, 300.0, 3000.0):
        q = diffusion_constant(e, ThermalEnvironment(T, Statistics.FULL)).value
        cf = diffusion_closed_form(e, T, Statistics.FULL).value
        rows.append(Check(1, f"electron diffusion quadrature vs closed form, T={T:g} K", _rel(q, cf), 1e-8))
    rows.append(Check(1, "electron diffusion runtime [s]", time.perf_counter() - t0, 1.0))
    return rows


def criterion_2() -> list[Check]:
    rows = []
    for label, model, target, tol in (
        ("electron", reference_electron(), 0.9575, 5e-4),
        ("sphere", reference_sphere(), 0.9980, 2e-4),
    ):
        ratios = []
        for T in (3.0, 300.0, 3000.0):
            part = diffusion_constant(model, ThermalEnvironment(T, Statistics.PARTICLE)).value
            full = diffusion_constant(model, ThermalEnvironment(T, Statistics.FULL)).value
            ratios.append(float(part / full))
        worst = max(abs(r - target) for r in ratios)
        rows.append(Check(2, f"{label} particle/full ratio within {tol:g} of {target}", worst, tol,
                          f"ratios={[round(r, 7) for r in ratios]}"))
        rows.append(Check(2, f"{label} ratio temperature spread", max(ratios) - min(ratios), 1e-10))
    return rows


def criterion_3() -> list[Check]:
    s = reference_sphere()
    rows = []
    for T in (3.0, 300.0, 3000.0):
        k = k_space_diffusion(s, ThermalEnvironment(T, Statistics.FULL)).value
        cf = diffusion_closed_form(s, T, Statistics.FULL).value / HBAR**2
        rows.append(Check(3, f"sphere K-space diffusion vs closed form, T={T:g} K", _rel(k, cf), 1e-8))
        lam = scattering_constant_lambda(s, T).value
        half_closed = diffusion_closed_form(s, T, Statistics.PARTICLE).value / HBAR**2 / 2
        half_quad = k_space_diffusion(s, ThermalEnvironment(T, Statistics.PARTICLE)).value / 2
        rows.append(Check(3, f"Lambda vs half particle closed form, T={T:g} K", _rel(lam, half_closed), 1e-12))
        rows.append(Check(3, f"Lambda vs half particle quadrature, T={T:g} K", _rel(lam, half_quad), 1e-8))
    return rows


def criterion_4() -> list[Check]:
    rows = []
    for x in (0.0, 0.5, 1.0, 2.0, 5.0, 10.0):
        red = angular_kernel(x)
        cub = angular_kernel_cubature(x)
        rows.append(Check(4, f"kernel reduction vs 4D cubature, x={x:g}", _rel(red, cub), 1e-6))
    s = reference_sphere()
    T = 300.0
    rows.append(Check(4, "F(0) = 0", abs(decoherence_factor(s, T, 0.0)), 0.0))
    # peak of k^6 n(k): x = 6 + W(-6 e^-6)
    x_peak = 5.9847
    d = 50.0 / (x_peak * KB * T / (HBAR * C))
    r11, r12 = emission_rates(s, T, DipolePairGeometry(d))
    F = decoherence_factor(s, T, d)
    env = interference_envelope(s, T, d)
    rows.append(Check(4, "|F - R11| within kernel envelope at kd=50", abs(F - r11) / env, 1.0,
                      f"|R12|/R11={abs(r12) / r11:.3e}, envelope/R11={env / r11:.3e}"))
    return rows


def criterion_5() -> list[Check]:
    s = reference_sphere()
    rows = []
    t0 = time.perf_counter()
    for T in (100.0, 300.0, 1000.0):
        lam, res = lambda_from_limit(s, T)
        ref = scattering_constant_lambda(s, T).value
        rows.append(Check(5, f"Lambda from F(d)/d^2 vs closed form, T={T:g} K", _rel(lam, ref), 1e-2,
                          f"extraction residual={res:.2e}"))
    rows.append(Check(5, "long-wavelength runtime [s]", time.perf_counter() - t0, 30.0))
    return rows


def criterion_6() -> list[Check]:
    rows = []
    for label, model in (("electron", reference_electron()), ("sphere", reference_sphere())):
        for T in (3.0, 300.0, 3000.0):
            q = drag_coefficient_nonrel(model, T).xi.value
            cf = drag_closed_form(model, T).xi.value
            rows.append(Check(6, f"xi_{label[0]} quadrature vs closed form, T={T:g} K", _rel(q, cf), 1e-8))
    return rows


def criterion_7() -> list[Check]:
    rows = []
    for label, model in (("electron", reference_electron()), ("sphere", reference_sphere())):
        for T in (3.0, 300.0, 3000.0):
            D = diffusion_constant(model, ThermalEnvironment(T, Statistics.FULL)).value
            mxi = drag_coefficient_nonrel(model, T).m_xi.value
            rows.append(Check(7, f"{label} D = 2 m xi kB T, T={T:g} K", abs(D - 2 * mxi * KB * T) / D, 1e-6))
    return rows


def criterion_8() -> list[Check]:
    rows = []
    T = 300.0
    for label, model in (("electron", reference_electron()), ("sphere", reference_sphere())):
        worst = 0.0
        for b in (0.1, 0.5, 0.9):
            for tp in (0.5, 1.0, 2.0):
                r = total_force_relativistic(RelativisticState(b * C, T, tp * T), model, tol=math.inf)
                worst = max(worst, _rel(r.checks["composition"], r.value))
        rows.append(Check(8, f"{label} Doppler form vs F_ind + F_dd + F_abs on v/c x T'/T grid", worst, 1e-6))
        sl = nonrel_slopes(model, T)
        rows.append(Check(
            8, f"{label} Richardson convergence of F_x/v at T'=T", sl["extrapolation_residual"], 1e-6,
            f"slope={sl['slope_extrapolated']:.6e}; induced-only={sl['slope_induced_only']:.6e} "
            f"(ratio {sl['ratio_induced_only']:.6f}); with radiation reaction="
            f"{sl['slope_induced_plus_radiation_reaction']:.6e} "
            f"(ratio {sl['ratio_induced_plus_radiation_reaction']:.6f})",
        ))
    return rows


def criterion_9() -> list[Check]:
    rows = []
    T = 300.0
    wT = KB * T / HBAR
    x = np.linspace(0.1, 20.0, 400)
    anchors = {Branch.WIEN: math.exp(-1.0), Branch.RAYLEIGH_JEANS: 1.0, Branch.PLANCK: 1 / math.expm1(1.0)}
    for br, n0 in anchors.items():
        sol = spectrum_ode_solve(br, T, wT, n0, x * wT)
        exact = analytic_occupation(br, x, integration_constant(br, 1.0, n0))
        rows.append(Check(9, f"{br.value} ODE vs analytic form", float(np.max(np.abs(sol.n_values / exact - 1))), 1e-6))
    for label, model in (("electron", reference_electron()), ("sphere", reference_sphere())):
        rows.append(Check(9, f"{label} equilibrium residual with Planck occupation",
                          abs(equilibrium_residual(model, T)), 1e-6))
    return rows


def criterion_10() -> list[Check]:
    T, m, xi = 300.0, reference_sphere().mass, 1.0
    vt = thermal_speed(m, T)
    v0 = 3 * vt
    t0 = time.perf_counter()
    f0 = gaussian_start(v0, 0.2 * vt, m, T, xi)
    hist = fokker_planck_history(f0, xi, m, T, [1.0, 5.0, 10.0], 1e-3)
    elapsed = time.perf_counter() - t0
    final = hist[-1][1]
    rows = [Check(10, "L1 distance to Maxwell-Boltzmann at xi t = 10",
                  final.l1_distance(maxwell_boltzmann(final.v_grid, m, T)), 1e-3)]
    mean_err = max(abs(d.mean - ou_mean(f0.mean, xi, t)) / v0 for t, d in hist)
    var_err = max(_rel(d.variance, ou_variance(f0.variance, xi, m, T, t)) for t, d in hist)
    rows.append(Check(10, "mean vs v0 exp(-xi t) (relative to v0)", mean_err, 1e-4))
    rows.append(Check(10, "variance vs OU variance (relative)", var_err, 1e-4))
    rows.append(Check(10, "Fokker-Planck runtime [s]", elapsed, 10.0))
    return rows


def criterion_11() -> list[Check]:
    rows = []
    T = 300.0
    for label, model in (("electron", reference_electron()), ("sphere", reference_sphere())):
        beta = beta_for_kicks(model, T, 1e6)
        spec = KickProcessSpec(model, T, beta, seed=2024)
        r = simulate_kicks(spec)
        rows.append(Check(11, f"{label} kick diffusion vs particle statistics [sigma]", abs(r.z_score), 3.0,
                          f"kicks={r.n_kicks}, rel err={r.diffusion_estimate.rel_err:.3e}"))
        again = simulate_kicks(spec)
        same = again.diffusion_estimate.value == r.diffusion_estimate.value and \
            again.msq_momentum.err_estimate == r.msq_momentum.err_estimate
        rows.append(Check(11, f"{label} identical seed reproduces output bit for bit", 0.0 if same else 1.0, 0.0))
    mean, err = recoil_second_moment("paper_uniform", 1_000_000, 99)
    rows.append(Check(11, "uniform recoil second moment vs 2/3 [sigma]", abs(mean - 2 / 3) / err, 3.0))
    return rows


def criterion_12() -> list[Check]:
    env = AirEnvironment(T=300.0, m_air=AIR_MASS, number_density=AIR_DENSITY, radius=SPHERE_RADIUS)
    r = air_diffusion(env)
    return [Check(12, "air diffusion quadrature vs closed form", _rel(r.checks["quadrature"], r.value), 1e-8)]


def criterion_13() -> list[Check]:
    spec = FieldSampleSpec(mode_count=200, sample_count=10_000, seed=13)
    rep = gaussian_independence_test(spec)
    ctrl = gaussian_independence_test(spec, dependent_control=True)
    return [
        Check(13, "|corr(E_z, dE_z/dx)| / 3 sigma", abs(rep.correlation) / rep.correlation_bound, 1.0),
        Check(13, "characteristic-function factorization / CLT bound", rep.max_cf_deviation / rep.cf_bound, 1.0),
        Check(13, "negative control rejected (0 = rejected)", 0.0 if not ctrl.factorization_ok else 1.0, 0.0,
              f"control deviation={ctrl.max_cf_deviation:.3f}"),
    ]


CRITERIA = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
    6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10,
    11: criterion_11, 12: criterion_12, 13: criterion_13,
}


def run_all(criteria=None) -> list[Check]:
    rows = []
    for k in criteria or sorted(CRITERIA):
        rows.extend(CRITERIA[k]())
    return rows

