"""Equilibrium between momentum diffusion and drag.

Balancing diffusion with photon-statistics weight S(n) against drag gives
the occupation ODE dn/dx = -S(n) in x = hbar omega / kB T.  The three
weights produce three spectra:

    S = n        -> Wien            n = C e^-x
    S = n^2      -> Rayleigh-Jeans  1/n = x + C
    S = n^2 + n  -> Planck          ln(1 + 1/n) = x + C

The integration constant C plays the role of a chemical potential; anchoring
on the Planck curve sets it to zero.  The module also evolves the 1D
velocity Fokker-Planck equation toward Maxwell-Boltzmann.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import solve_banded

from .core.constants import CGS
from .core.quadrature import QuadratureConfig
from .core.special import bose_n_times_n_plus_1, bose_occupation
from .diffusion import Statistics, statistics_of_occupation, thermal_moment
from .errors import DomainError, StepRejectedError, StiffnessError
from .polarizability import PolarizabilityModel

HBAR, KB = CGS.hbar, CGS.kB


class Branch(str, Enum):
    WIEN = "wien"
    RAYLEIGH_JEANS = "rayleigh_jeans"
    PLANCK = "planck"


BRANCH_FOR_STATISTICS = {
    Statistics.PARTICLE: Branch.WIEN,
    Statistics.WAVE: Branch.RAYLEIGH_JEANS,
    Statistics.FULL: Branch.PLANCK,
}
STATISTICS_FOR_BRANCH = {b: s for s, b in BRANCH_FOR_STATISTICS.items()}


@dataclass(frozen=True)
class SpectrumSolution:
    omega_grid: np.ndarray
    n_values: np.ndarray
    branch: Branch
    integration_constant: float


def integration_constant(branch: Branch | str, x0: float, n0: float) -> float:
    branch = Branch(branch)
    if branch is Branch.WIEN:
        return n0 * math.exp(x0)
    if branch is Branch.RAYLEIGH_JEANS:
        return 1.0 / n0 - x0
    return math.log1p(1.0 / n0) - x0


def analytic_occupation(branch: Branch | str, x, C: float):
    """Closed-form solution of the balance ODE with integration constant C."""
    branch = Branch(branch)
    x = np.asarray(x, dtype=float)
    if branch is Branch.WIEN:
        return C * np.exp(-x)
    if branch is Branch.RAYLEIGH_JEANS:
        return 1.0 / (x + C)
    return 1.0 / np.expm1(x + C)


def spectrum_ode_solve(
    branch: Branch | str,
    T: float,
    omega0: float,
    n0: float,
    grid,
    rtol: float = 1e-12,
) -> SpectrumSolution:
    """Integrate dn/dx = -S(n) from the anchor (omega0, n0) across ``grid`` [rad/s].

    Uses an 8th-order Runge-Kutta integrator in each direction from the
    anchor.  A failed integration (for example a Rayleigh-Jeans anchor whose
    solution blows up inside the grid) raises StiffnessError.
    """
    branch = Branch(branch)
    if not (n0 > 0 and omega0 > 0 and T > 0):
        raise DomainError("need n0 > 0, omega0 > 0 and T > 0")
    omega = np.asarray(grid, dtype=float)
    if omega.ndim != 1 or omega.size == 0 or np.any(omega <= 0):
        raise DomainError("grid must be a nonempty 1D array of positive frequencies")
    scale = HBAR / (KB * T)
    x = omega * scale
    x0 = omega0 * scale
    stat = STATISTICS_FOR_BRANCH[branch]

    def rhs(_, n):
        return -statistics_of_occupation(stat, n)

    out = np.empty_like(x)
    for mask in (x >= x0, x < x0):
        if not mask.any():
            continue
        targets = x[mask]
        order = np.argsort(np.abs(targets - x0))
        t_eval = targets[order]
        end = t_eval[-1]
        if end == x0:
            out[mask] = n0
            continue
        sol = solve_ivp(rhs, (x0, end), [n0], method="DOP853", t_eval=t_eval,
                        rtol=rtol, atol=1e-300)
        if not sol.success or sol.y.shape[1] != t_eval.size or not np.all(np.isfinite(sol.y)):
            raise StiffnessError(f"{branch.value} ODE integration failed: {sol.message}")
        vals = np.empty_like(targets)
        vals[order] = sol.y[0]
        out[mask] = vals
    if np.any(out <= 0):
        raise StiffnessError(f"{branch.value} ODE produced a nonpositive occupation")
    return SpectrumSolution(omega, out, branch, integration_constant(branch, x0, n0))


def equilibrium_residual(
    model: PolarizabilityModel, T: float, occupation: Branch | str = Branch.PLANCK, cfg: QuadratureConfig | None = None
) -> float:
    """Relative imbalance between diffusion heating and drag cooling.

    Returns [int x^5 alpha_I (n^2 + n) + int x^5 alpha_I dn/dx] / int x^5 alpha_I (n^2 + n)
    for the chosen occupation (zero integration constant).  Zero for the
    Planck occupation; positive for Wien, where the drag term misses the n^2
    part of the full diffusion.
    """
    branch = Branch(occupation)
    if branch is Branch.RAYLEIGH_JEANS:
        raise DomainError("the Rayleigh-Jeans occupation makes the balance integrals diverge")
    if branch is Branch.PLANCK:
        heat = bose_n_times_n_plus_1
        cool = bose_n_times_n_plus_1  # -dn/dx
    else:
        heat = lambda x: math.exp(-2 * x) + math.exp(-x)
        cool = lambda x: math.exp(-x)
    a, _ = thermal_moment(model, T, 5, heat, cfg)
    b, _ = thermal_moment(model, T, 5, cool, cfg)
    return (a - b) / a


@dataclass(frozen=True)
class VelocityDistribution:
    v_grid: np.ndarray
    f_values: np.ndarray
    mass: float
    T: float
    xi: float

    @property
    def dv(self) -> float:
        return float(self.v_grid[1] - self.v_grid[0])

    @property
    def norm(self) -> float:
        return float(np.sum(self.f_values) * self.dv)

    @property
    def mean(self) -> float:
        return float(np.sum(self.v_grid * self.f_values) * self.dv / self.norm)

    @property
    def variance(self) -> float:
        m = self.mean
        return float(np.sum((self.v_grid - m) ** 2 * self.f_values) * self.dv / self.norm)

    def l1_distance(self, other_f) -> float:
        return float(np.sum(np.abs(self.f_values - other_f)) * self.dv)


def thermal_speed(m: float, T: float) -> float:
    return math.sqrt(KB * T / m)


def velocity_grid(m: float, T: float, n_cells: int = 1024, width: float = 8.0) -> np.ndarray:
    """Cell centres on [-width, width] thermal speeds."""
    s = thermal_speed(m, T)
    h = 2 * width * s / n_cells
    return -width * s + h * (np.arange(n_cells) + 0.5)


def maxwell_boltzmann(v, m: float, T: float):
    s2 = KB * T / m
    return np.exp(-np.asarray(v) ** 2 / (2 * s2)) / math.sqrt(2 * math.pi * s2)


def gaussian_start(
    v0: float, sigma0: float, m: float, T: float, xi: float, n_cells: int = 1024, width: float = 8.0
) -> VelocityDistribution:
    """Discretely normalized Gaussian centred at v0 with standard deviation sigma0."""
    v = velocity_grid(m, T, n_cells, width)
    f = np.exp(-((v - v0) ** 2) / (2 * sigma0**2))
    f /= f.sum() * (v[1] - v[0])
    return VelocityDistribution(v, f, m, T, xi)


def _bernoulli(z):
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    small = np.abs(z) < 1e-8
    out[small] = 1 - z[small] / 2
    out[~small] = z[~small] / np.expm1(z[~small])
    return out


def _operator(u):
    """Tridiagonal Fokker-Planck operator in u = v / v_th, tau = xi t.

    Scharfetter-Gummel fluxes J = B(dU) f_i - B(-dU) f_{i+1} over h, with
    U = u^2/2, keep the discrete Gaussian stationary and the scheme
    positivity-friendly; zero-flux walls conserve mass exactly.
    """
    h = u[1] - u[0]
    dU = np.diff(u**2 / 2)
    a = _bernoulli(dU) / h**2
    b = _bernoulli(-dU) / h**2
    n = u.size
    main, up, lo = np.zeros(n), np.zeros(n), np.zeros(n)
    main[:-1] -= a
    up[1:] += b
    main[1:] -= b
    lo[:-1] += a
    return main, up, lo


def fokker_planck_history(
    f0: VelocityDistribution, xi: float, m: float, T: float, checkpoints, dt: float
) -> list[tuple[float, VelocityDistribution]]:
    """Evolve df/dt = xi d(v f)/dv + (xi kB T / m) d^2 f/dv^2 and return snapshots.

    Crank-Nicolson stepping after four half-size implicit Euler steps, which
    damp the start-up oscillations of a sharp initial state.  A step that
    drives any cell negative is rejected with a suggested smaller dt.
    """
    if not (xi > 0 and m > 0 and T > 0 and dt > 0):
        raise DomainError("xi, m, T and dt must be positive")
    v = np.asarray(f0.v_grid, dtype=float)
    h = v[1] - v[0]
    if v.size < 3 or not np.allclose(np.diff(v), h, rtol=1e-9, atol=0):
        raise DomainError("velocity grid must be uniform with at least 3 cells")
    vth = thermal_speed(m, T)
    if min(abs(v[0]), abs(v[-1])) + h / 2 < 6 * vth:
        raise DomainError("velocity grid must extend to at least 6 thermal speeds")
    f = np.asarray(f0.f_values, dtype=float).copy()
    if np.any(f < 0):
        raise DomainError("initial distribution must be nonnegative")
    norm0 = f.sum() * h
    if abs(norm0 - 1) > 1e-6:
        raise DomainError(f"initial distribution must be normalized, got {norm0}")
    times = sorted(float(t) for t in checkpoints)
    if not times or times[0] < 0:
        raise DomainError("checkpoints must be nonempty and nonnegative")

    main, up, lo = _operator(v / vth)
    tau_step = xi * dt

    def implicit(theta, step):
        A = np.zeros((3, v.size))
        A[0] = -theta * step * up
        A[1] = 1 - theta * step * main
        A[2] = -theta * step * lo
        return A

    def explicit(g, c):
        out = g + c * main * g
        out[:-1] += c * up[1:] * g[1:]
        out[1:] += c * lo[:-1] * g[:-1]
        return out

    def guard(g):
        if g.min() < -1e-13 * g.max():
            raise StepRejectedError(f"negative density after step dt={dt}", suggested_dt=dt / 2)
        return np.maximum(g, 0.0)

    snapshots = []
    t = 0.0
    started = False
    for t_target in times:
        remaining = xi * (t_target - t)
        if remaining > 0:
            if not started:
                be = implicit(1.0, tau_step / 2)
                n_start = min(4, int(remaining // (tau_step / 2)))
                for _ in range(n_start):
                    f = guard(solve_banded((1, 1), be, f))
                remaining -= n_start * tau_step / 2
                started = n_start > 0
            n_steps = max(1, math.ceil(remaining / tau_step - 1e-9)) if remaining > 1e-15 else 0
            if n_steps:
                step = remaining / n_steps
                cn = implicit(0.5, step)
                for _ in range(n_steps):
                    f = guard(solve_banded((1, 1), cn, explicit(f, 0.5 * step)))
        t = t_target
        snapshots.append((t, VelocityDistribution(v.copy(), f.copy(), m, T, xi)))
    return snapshots


def fokker_planck_evolve(
    f0: VelocityDistribution, xi: float, m: float, T: float, t_final: float, dt: float
) -> VelocityDistribution:
    return fokker_planck_history(f0, xi, m, T, [t_final], dt)[-1][1]


def ou_mean(v0: float, xi: float, t: float) -> float:
    return v0 * math.exp(-xi * t)


def ou_variance(var0: float, xi: float, m: float, T: float, t: float) -> float:
    e2 = math.exp(-2 * xi * t)
    return var0 * e2 + KB * T / m * (1 - e2)
