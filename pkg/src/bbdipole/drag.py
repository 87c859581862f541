"""Einstein-Hopf drag on a polarizable particle moving through thermal radiation.

Nonrelativistic coefficient::

    m xi = (4 hbar / 3 pi c^5) int d omega omega^5 alpha_I(omega) (-dn/d omega)

Relativistic forces on a particle moving along +x with speed v = beta c,
lab temperature T and particle-frame temperature T'::

    F_ind = (2 hbar / pi c^4) int d omega omega^4 alpha_I int_-1^1 dmu mu n(gamma omega (1 + beta mu); T)
    F_dd  = -(4 v hbar / pi c^5) int d omega omega^4 alpha_I n(omega; T')
    F_abs = (4 v hbar / pi c^5) int d omega omega^4 alpha_I (1/2) int_-1^1 dmu n(gamma omega (1 + beta mu); T)

F_abs is the (v/c^2) dE'/dt' term of the force transformation carried by the
power the particle absorbs from the boosted field.  Their sum equals the
closed double integral over the Doppler variable y in [u-, u+]::

    F_x = -(2 hbar / pi gamma^2 beta^2 c^4) int d omega omega^4 alpha_I
          int dy (y - 1/gamma) [n(omega; T') - n(omega y; T)]
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core.constants import CGS
from .core.quadrature import QuadratureConfig, integrate_finite, integrate_semi_infinite
from .core.results import Method, RateResult
from .core.special import bose_difference, bose_n_times_n_plus_1, bose_occupation
from .diffusion import thermal_moment
from .errors import ConsistencyError, DomainError, RegimeError, UnsupportedModelError
from .polarizability import DielectricSphere, Electron, PolarizabilityModel, TwoLevelAtom, alpha_I_effective

HBAR, C, KB = CGS.hbar, CGS.c, CGS.kB

FORCE_UNIT = "dyn"
FRICTION_UNIT = "g s^-1"
RATE_UNIT = "s^-1"


@dataclass(frozen=True)
class DragCoefficient:
    m_xi: RateResult
    xi: RateResult | None


@dataclass(frozen=True)
class RelativisticState:
    v: float
    T_lab: float
    T_particle: float

    def __post_init__(self):
        if not abs(self.v) < C:
            raise DomainError("speed must satisfy |v| < c")
        if not self.T_lab > 0:
            raise DomainError("lab temperature must be positive")
        if not self.T_particle >= 0:
            raise DomainError("particle temperature must be >= 0")

    @property
    def beta(self) -> float:
        return self.v / C

    @property
    def gamma(self) -> float:
        return 1.0 / math.sqrt((1.0 - self.beta) * (1.0 + self.beta))

    @property
    def u_plus(self) -> float:
        return math.sqrt((1 + self.beta) / (1 - self.beta))

    @property
    def u_minus(self) -> float:
        return math.sqrt((1 - self.beta) / (1 + self.beta))


def _model_mass(model: PolarizabilityModel) -> float | None:
    return getattr(model, "mass", None)


def drag_coefficient_nonrel(
    model: PolarizabilityModel, T: float, cfg: QuadratureConfig | None = None, allow_gain: bool = False
) -> DragCoefficient:
    """m xi by quadrature, with -dn/d omega = (hbar / kB T) n (n + 1) in the integrand.

    ``xi`` is filled in when the model carries a mass.
    """
    if not T > 0:
        raise DomainError("temperature must be positive")
    val, err = thermal_moment(model, T, 5, bose_n_times_n_plus_1, cfg, allow_gain=allow_gain)
    pref = 4 * HBAR / (3 * math.pi * C**5) * HBAR / (KB * T)
    m_xi = RateResult(pref * val, FRICTION_UNIT, pref * err, Method.QUADRATURE)
    mass = _model_mass(model)
    xi = m_xi.scaled(1 / mass, RATE_UNIT) if mass else None
    return DragCoefficient(m_xi, xi)


def drag_closed_form(model: PolarizabilityModel, T: float) -> DragCoefficient:
    """Closed forms m xi_e = (32 pi^3 hbar/135) r_e^2 (kB T/hbar c)^4 and
    m xi_s = (512 pi^7 hbar/135) a^6 |CM|^2 (kB T/hbar c)^8."""
    if not T > 0:
        raise DomainError("temperature must be positive")
    kT = KB * T / (HBAR * C)
    if isinstance(model, Electron):
        val = 32 * math.pi**3 * HBAR / 135 * model.classical_radius**2 * kT**4
    elif isinstance(model, DielectricSphere):
        val = 512 * math.pi**7 * HBAR / 135 * model.radius**6 * model.cm_abs2 * kT**8
    else:
        raise UnsupportedModelError(f"no closed-form drag coefficient for {model.kind}")
    m_xi = RateResult(val, FRICTION_UNIT, 0.0, Method.CLOSED_FORM)
    mass = _model_mass(model)
    return DragCoefficient(m_xi, m_xi.scaled(1 / mass, RATE_UNIT) if mass else None)


def _omega_T(T: float) -> float:
    return KB * T / HBAR


def _alpha_ref(model, omega_T):
    if isinstance(model, TwoLevelAtom):
        return abs(model.alpha_I_lorentzian(model.omega0)) or 1.0
    return abs(alpha_I_effective(model, omega_T)) or 1.0


def _alpha_I_checked(model, omega):
    a = alpha_I_effective(model, omega)
    if a < 0:
        raise DomainError("negative alpha_I; relativistic drag needs an absorbing particle")
    return a


def _outer(model, state: RelativisticState, inner, cfg, scale):
    """int_0^inf dx x^4 (alpha_I / ref) inner(x) with x = hbar omega / kB T_lab."""
    omega_T = _omega_T(state.T_lab)
    ref = _alpha_ref(model, omega_T)

    def integrand(x):
        return x**4 * _alpha_I_checked(model, x * omega_T) / ref * inner(x)

    val, err = integrate_semi_infinite(integrand, scale, cfg)
    return val * ref * omega_T**5, err * ref * omega_T**5


def force_induced(state: RelativisticState, model: PolarizabilityModel, cfg: QuadratureConfig | None = None) -> RateResult:
    """Lab-frame force from the dipole induced by the boosted blackbody field."""
    if state.v == 0:
        return RateResult(0.0, FORCE_UNIT, 0.0, Method.QUADRATURE)
    b, g = state.beta, state.gamma

    def inner(x):
        # odd part in mu: int_0^1 mu [n(g x (1 + b mu)) - n(g x (1 - b mu))]
        f = lambda mu: mu * bose_difference(g * x * (1 + b * mu), g * x * (1 - b * mu))
        return integrate_finite(f, 0.0, 1.0, cfg)[0]

    val, err = _outer(model, state, inner, cfg, scale=max(1.0, 1.0 / (g * (1 - abs(b)))))
    pref = 2 * HBAR / (math.pi * C**4)
    return RateResult(pref * val, FORCE_UNIT, pref * err, Method.QUADRATURE)


def force_dd(state: RelativisticState, model: PolarizabilityModel, cfg: QuadratureConfig | None = None) -> RateResult:
    """Radiation-reaction force -(4 v hbar / pi c^5) int omega^4 alpha_I n(omega; T')."""
    if state.v == 0 or state.T_particle == 0:
        return RateResult(0.0, FORCE_UNIT, 0.0, Method.QUADRATURE)
    tau = state.T_particle / state.T_lab
    val, err = _outer(model, state, lambda x: bose_occupation(x / tau), cfg, scale=max(1.0, tau))
    pref = -4 * state.v * HBAR / (math.pi * C**5)
    return RateResult(pref * val, FORCE_UNIT, abs(pref) * err, Method.QUADRATURE)


def force_absorbed(state: RelativisticState, model: PolarizabilityModel, cfg: QuadratureConfig | None = None) -> RateResult:
    """(v/c^2) times the power absorbed in the particle frame from the boosted field."""
    if state.v == 0:
        return RateResult(0.0, FORCE_UNIT, 0.0, Method.QUADRATURE)
    b, g = state.beta, state.gamma

    def inner(x):
        return 0.5 * integrate_finite(lambda mu: bose_occupation(g * x * (1 + b * mu)), -1.0, 1.0, cfg)[0]

    val, err = _outer(model, state, inner, cfg, scale=max(1.0, 1.0 / (g * (1 - abs(b)))))
    pref = 4 * state.v * HBAR / (math.pi * C**5)
    return RateResult(pref * val, FORCE_UNIT, abs(pref) * err, Method.QUADRATURE)


def force_composed(state: RelativisticState, model: PolarizabilityModel, cfg: QuadratureConfig | None = None) -> RateResult:
    """F_ind + F_dd + F_abs, the term-by-term route to the total force."""
    parts = [force_induced(state, model, cfg), force_dd(state, model, cfg), force_absorbed(state, model, cfg)]
    return RateResult(
        math.fsum(p.value for p in parts),
        FORCE_UNIT,
        math.fsum(p.err_estimate for p in parts),
        Method.QUADRATURE,
        {"induced": parts[0].value, "radiation_reaction": parts[1].value, "absorbed_power": parts[2].value},
    )


def total_force_relativistic(
    state: RelativisticState,
    model: PolarizabilityModel,
    cfg: QuadratureConfig | None = None,
    cross_check: bool = True,
    tol: float = 1e-6,
) -> RateResult:
    """Total drag from the Doppler double integral over y in [u-, u+].

    With ``cross_check`` the composition F_ind + F_dd + F_abs is evaluated
    as well and stored under ``checks["composition"]``; disagreement beyond
    ``tol`` raises ConsistencyError.
    """
    if state.v == 0:
        raise RegimeError("the Doppler form is 0/0 at v = 0; use the nonrelativistic drag coefficient")
    b, g = state.beta, state.gamma
    up, um = state.u_plus, state.u_minus
    tau = state.T_particle / state.T_lab

    def bracket(x, y):
        if tau == 0:
            return -bose_occupation(x * y)
        return bose_difference(x / tau, x * y)

    def inner(x):
        return integrate_finite(lambda y: (y - 1 / g) * bracket(x, y), um, up, cfg)[0]

    val, err = _outer(model, state, inner, cfg, scale=max(1.0, tau, 1.0 / um))
    pref = -2 * HBAR / (math.pi * g**2 * b**2 * C**4)
    res = RateResult(pref * val, FORCE_UNIT, abs(pref) * err, Method.QUADRATURE)
    if cross_check:
        comp = force_composed(state, model, cfg)
        if abs(comp.value - res.value) > tol * abs(res.value):
            raise ConsistencyError(
                f"Doppler form {res.value!r} vs composition {comp.value!r} at beta={b}"
            )
        res = RateResult(res.value, res.unit, res.err_estimate, res.method,
                         {"composition": comp.value, **comp.checks})
    return res


def _richardson_zero(values, hs, order=2):
    """Extrapolate values(h) = s0 + c h^order + ... to h -> 0 from consecutive pairs."""
    est = []
    for (v1, h1), (v2, h2) in zip(zip(values, hs), zip(values[1:], hs[1:])):
        r = (h1 / h2) ** order
        est.append(v2 + (v2 - v1) / (r - 1))
    return est


def nonrel_slopes(
    model: PolarizabilityModel,
    T: float,
    cfg: QuadratureConfig | None = None,
    betas: tuple[float, ...] = (1e-2, 1e-3, 1e-4),
) -> dict:
    """Small-velocity slope of the total force at T' = T and both candidate limits.

    Returns a dict with the Richardson slope of F_x / v from the Doppler form,
    the induced-force-only slope -m xi, the slope including the
    radiation-reaction term, their ratios to the extrapolated value, and the
    convergence residual of the extrapolation.
    """
    samples = []
    for beta in betas:
        st = RelativisticState(beta * C, T, T)
        samples.append(total_force_relativistic(st, model, cfg, cross_check=False).value / st.v)
    ext = _richardson_zero(samples, list(betas))
    slope = ext[-1]
    residual = abs(ext[-1] - ext[0]) / abs(slope) if len(ext) > 1 else math.nan
    m_xi = drag_coefficient_nonrel(model, T, cfg).m_xi.value
    dd_val, _ = thermal_moment(model, T, 4, bose_occupation, cfg)
    dd_slope = -4 * HBAR / (math.pi * C**5) * dd_val
    eh = -m_xi
    with_dd = -m_xi + dd_slope
    return {
        "betas": list(betas),
        "slopes_sampled": samples,
        "slope_extrapolated": slope,
        "extrapolation_residual": residual,
        "slope_induced_only": eh,
        "slope_induced_plus_radiation_reaction": with_dd,
        "ratio_induced_only": slope / eh,
        "ratio_induced_plus_radiation_reaction": slope / with_dd,
    }


def two_level_drag(atom: TwoLevelAtom, T: float) -> float:
    """Force per unit velocity -(hbar omega0 / c^2)(p1 - p2) B [rho - (omega0/3) d rho/d omega]
    at omega0, with B = 4 pi^2 mu^2 / 3 hbar^2 and rho = hbar omega^3 n / pi^2 c^3.

    Negative for p1 > p2 (drag); positive under inversion (gain).
    """
    if not isinstance(atom, TwoLevelAtom):
        raise UnsupportedModelError("two_level_drag needs a two-level atom")
    if not T > 0:
        raise DomainError("temperature must be positive")
    w0 = atom.omega0
    x0 = HBAR * w0 / (KB * T)
    n = bose_occupation(x0)
    dn = -HBAR / (KB * T) * bose_n_times_n_plus_1(x0)
    rho = HBAR * w0**3 * n / (math.pi**2 * C**3)
    drho = HBAR * (3 * w0**2 * n + w0**3 * dn) / (math.pi**2 * C**3)
    B = 4 * math.pi**2 * atom.mu**2 / (3 * HBAR**2)
    return -(HBAR * w0 / C**2) * (atom.p1 - atom.p2) * B * (rho - w0 / 3 * drho)


def two_level_drag_quadrature(atom: TwoLevelAtom, T: float, cfg: QuadratureConfig | None = None) -> float:
    """-m xi from the general drag integral with the Lorentzian alpha_I (gain allowed)."""
    return -drag_coefficient_nonrel(atom, T, cfg, allow_gain=True).m_xi.value


def vacuum_friction_excited_atom(v: float, omega0: float, Gamma: float, t: float) -> float:
    """-(v/c^2) hbar omega0 Gamma exp(-Gamma t), valid to first order in v/c."""
    if abs(v) / C >= 0.1:
        raise RegimeError("first-order formula needs |v|/c < 0.1")
    if omega0 <= 0 or Gamma < 0 or t < 0:
        raise DomainError("need omega0 > 0, Gamma >= 0, t >= 0")
    return -(v / C**2) * HBAR * omega0 * Gamma * math.exp(-Gamma * t)
