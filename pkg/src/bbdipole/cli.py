"""Command-line front end.

Numeric flags take bare SI values or values with an explicit unit suffix
(``1e-5cm``, ``100nm``, ``2D``); everything is converted to Gaussian-cgs on
entry.  Options may also come from a ``key = value`` config file given by
``--config`` or the BBDIPOLE_CONFIG environment variable; flags on the
command line win.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 domain
error, 4 numerical failure.  Errors are written to stderr as JSON.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from functools import partial

import numpy as np

from . import __version__
from .core.constants import CGS, to_si
from .core.quadrature import QuadratureConfig
from .core.results import Method, RateResult
from .decoherence import decoherence_factor_with_error, lambda_from_limit
from .diffusion import (
    AirEnvironment,
    ThermalEnvironment,
    air_diffusion,
    diffusion_closed_form,
    diffusion_constant,
    scattering_constant_lambda,
)
from .drag import (
    RelativisticState,
    drag_closed_form,
    drag_coefficient_nonrel,
    nonrel_slopes,
    total_force_relativistic,
    two_level_drag,
)
from .equilibrium import (
    Branch,
    analytic_occupation,
    fokker_planck_history,
    gaussian_start,
    maxwell_boltzmann,
    spectrum_ode_solve,
    thermal_speed,
)
from .errors import BBDipoleError, QuadratureError, StepRejectedError, UnsupportedModelError
from .polarizability import DielectricSphere, Electron, TwoLevelAtom
from .stochastic import (
    FieldSampleSpec,
    KickProcessSpec,
    beta_for_kicks,
    gaussian_independence_test,
    ou_trajectories,
    recoil_second_moment,
    simulate_kicks,
)
from .verification import AIR_DENSITY, AIR_MASS, CRITERIA, run_all

HBAR, C, KB = CGS.hbar, CGS.c, CGS.kB
SCHEMA_ID = "bbdipole-output/1"
CONFIG_ENV = "BBDIPOLE_CONFIG"


class UsageError(Exception):
    exit_code = 2


# unit suffix -> factor to Gaussian-cgs, per quantity kind; "" is the bare SI value
_UNITS = {
    "length": {"": 1e2, "m": 1e2, "cm": 1.0, "mm": 0.1, "um": 1e-4, "nm": 1e-7},
    "mass": {"": 1e3, "kg": 1e3, "g": 1.0, "u": 1.66053906660e-24},
    "temperature": {"": 1.0, "K": 1.0},
    "angular_frequency": {"": 1.0, "rad/s": 1.0, "s^-1": 1.0},
    "rate": {"": 1.0, "s^-1": 1.0},
    "time": {"": 1.0, "s": 1.0},
    "velocity": {"": 1e2, "m/s": 1e2, "cm/s": 1.0},
    "dipole": {"": CGS.c * 10 * 1e2, "C*m": CGS.c * 10 * 1e2, "esu*cm": 1.0, "statC*cm": 1.0, "D": 1e-18},
    "number_density": {"": 1e-6, "m^-3": 1e-6, "cm^-3": 1.0},
}
_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z^*/\-0-9]*)\s*$")


def parse_quantity(text: str, kind: str) -> float:
    m = _QUANTITY.match(str(text))
    if not m:
        raise UsageError(f"cannot parse {kind} value {text!r}")
    number, suffix = float(m.group(1)), m.group(2)
    table = _UNITS[kind]
    if suffix not in table:
        raise UsageError(f"unknown {kind} unit {suffix!r}; expected one of {sorted(k for k in table if k)}")
    return number * table[suffix]


def parse_sweep(text: str, kind: str | None = None) -> list[float]:
    """``start:stop:logN`` | ``start:stop:linN`` | comma list; must be sorted and nonempty."""
    conv = (lambda s: parse_quantity(s, kind)) if kind else (lambda s: float(s))
    text = str(text).strip()
    parts = text.split(":")
    try:
        if len(parts) == 3:
            a, b = conv(parts[0]), conv(parts[1])
            spec = parts[2]
            mode, count = spec[:3], int(spec[3:])
            if count < 1 or mode not in ("log", "lin"):
                raise UsageError(f"bad sweep spec {spec!r}")
            if mode == "log":
                if a <= 0 or b <= 0:
                    raise UsageError("log sweeps need positive endpoints")
                values = list(np.geomspace(a, b, count))
            else:
                values = list(np.linspace(a, b, count))
        elif len(parts) == 1:
            values = [conv(p) for p in text.split(",") if p.strip()]
        else:
            raise UsageError(f"cannot parse sweep {text!r}")
    except ValueError as exc:
        raise UsageError(f"cannot parse sweep {text!r}: {exc}") from None
    if not values:
        raise UsageError("sweep is empty")
    if any(b < a for a, b in zip(values, values[1:])):
        raise UsageError("sweep values must be sorted ascending")
    return [float(v) for v in values]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _sweep_map(fn, points, jobs: int) -> list:
    """Evaluate ``fn`` over sweep points, in worker processes when jobs > 1; order is preserved."""
    if jobs == 1 or len(points) < 2:
        return [fn(x) for x in points]
    with ProcessPoolExecutor(max_workers=min(jobs, len(points))) as pool:
        return list(pool.map(fn, points))


def _force_point(b, model, T, Tp, cfg):
    if b == 0:
        return RateResult(0.0, "dyn", 0.0, Method.QUADRATURE)
    return total_force_relativistic(RelativisticState(b * C, T, Tp), model, cfg)


def _common(p: argparse.ArgumentParser, model: bool = True, temperature: bool = True,
            formats=("json", "csv")):
    if model:
        p.add_argument("--model", choices=["electron", "sphere", "two_level"], default="electron")
        p.add_argument("--radius", help="sphere radius (bare value in m)")
        p.add_argument("--epsilon", help="sphere relative permittivity, may be complex like 2.1+0.01j")
        p.add_argument("--mass", help="particle mass (bare value in kg)")
        p.add_argument("--omega0", help="two-level transition angular frequency (rad/s)")
        p.add_argument("--mu", help="two-level dipole moment (bare value in C m; suffix D or esu*cm)")
        p.add_argument("--linewidth", help="two-level linewidth rate beta (s^-1)")
        p.add_argument("--p1", type=float, default=1.0)
        p.add_argument("--p2", type=float, default=0.0)
    if temperature:
        p.add_argument("--temperature", default="300", help="temperature in K")
    p.add_argument("--format", choices=list(formats), default=formats[0])
    p.add_argument("--units", choices=["gaussian", "si"], default="si")
    p.add_argument("--rel-tol", type=float, default=None, help="quadrature relative tolerance")
    p.add_argument("--output", help="write the document here instead of stdout")
    p.add_argument("--config", help="key = value config file")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for sweep points (rows stay in input order)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bbdipole", description="Blackbody momentum diffusion, decoherence and drag.")
    parser.add_argument("--version", action="version", version=f"bbdipole {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)

    p = sub.add_parser("diffusion", help="momentum diffusion constant")
    _common(p)
    p.add_argument("--statistics", choices=["particle", "wave", "full"], default="full")

    p = sub.add_parser("drag", help="nonrelativistic drag coefficient")
    _common(p)

    p = sub.add_parser("drag-relativistic", help="relativistic drag force over a velocity sweep")
    _common(p)
    p.add_argument("--v-over-c", default="0.1,0.5,0.9", help="sweep of v/c")
    p.add_argument("--particle-temperature", help="particle-frame temperature T' (default: T)")
    p.add_argument("--slopes", action="store_true", help="also report small-velocity slopes")

    p = sub.add_parser("decoherence", help="decoherence factor F(d) over a separation sweep")
    _common(p)
    p.add_argument("--separations", required=True, help="sweep of separations (bare values in m)")

    p = sub.add_parser("lambda", help="scattering constant, closed form and small-separation limit")
    _common(p)

    p = sub.add_parser("spectrum", help="solve an occupation balance ODE")
    _common(p, model=False)
    p.add_argument("--branch", choices=[b.value for b in Branch], default="planck")
    p.add_argument("--anchor-x", type=float, default=1.0, help="anchor hbar omega / kB T")
    p.add_argument("--anchor-n", type=float, help="anchor occupation (default: on the zero-constant curve)")
    p.add_argument("--x-grid", default="0.1:20:lin100", help="sweep of hbar omega / kB T")

    p = sub.add_parser("fokker-planck", help="relax a velocity distribution toward Maxwell-Boltzmann")
    _common(p, model=False)
    p.add_argument("--mass", default="1e-17", help="particle mass (bare value in kg)")
    p.add_argument("--xi", default="1.0", help="drag rate xi (s^-1)")
    p.add_argument("--v0", type=float, default=3.0, help="initial mean in thermal speeds")
    p.add_argument("--sigma0", type=float, default=0.2, help="initial width in thermal speeds")
    p.add_argument("--checkpoints", default="1,5,10", help="sweep of xi t values")
    p.add_argument("--dt", type=float, default=1e-3, help="time step in units of 1/xi")
    p.add_argument("--cells", type=int, default=1024)

    p = sub.add_parser("montecarlo", help="stochastic simulations (JSON output)")
    _common(p)
    p.add_argument("--process", choices=["kicks", "recoil", "ou", "independence"], default="kicks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-kicks", type=float, default=1e6)
    p.add_argument("--duration", type=float, default=1e4, help="kick run length in units of 1/beta")
    p.add_argument("--bins", type=int, default=256)
    p.add_argument("--sampling", choices=["paper_uniform", "phase_function"], default="paper_uniform")
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--modes", type=int, default=200)
    p.add_argument("--paths", type=int, default=10_000)
    p.add_argument("--xi", default="1.0", help="OU drag rate (s^-1)")
    p.add_argument("--t-final", type=float, default=20.0, help="OU run length in units of 1/xi")
    p.add_argument("--dt", type=float, default=0.01, help="OU step in units of 1/xi")
    p.add_argument("--dump-paths", help="write per-path final velocities as CSV")

    p = sub.add_parser("air", help="momentum diffusion from air-molecule collisions")
    _common(p, model=False)
    p.add_argument("--radius", default="1e-7", help="particle radius (bare value in m)")
    p.add_argument("--air-mass", default=f"{AIR_MASS}g", help="molecular mass (bare value in kg)")
    p.add_argument("--number-density", default=f"{AIR_DENSITY}cm^-3", help="bare value in m^-3")

    p = sub.add_parser("verify", help="run the cross-validation suite")
    _common(p, model=False, temperature=False, formats=("table", "json", "csv"))
    p.add_argument("--criteria", help="comma list of criterion numbers (default: all)")
    return parser


def _read_config(path: str) -> list[str]:
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path!r}: {exc}") from None
    flags = []
    for raw in lines:
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line {raw!r} is not key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("_", "-")
        if value.lower() in ("true", "yes") and key == "slopes":
            flags.append(f"--{key}")
        else:
            flags += [f"--{key}", value]
    return flags


def _with_config(argv: list[str]) -> list[str]:
    path = None
    for i, a in enumerate(argv):
        if a == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif a.startswith("--config="):
            path = a.split("=", 1)[1]
    path = path or os.environ.get(CONFIG_ENV)
    if not path or not argv or argv[0].startswith("-"):
        return argv
    return [argv[0]] + _read_config(path) + argv[1:]


def _cfg(args) -> QuadratureConfig | None:
    return QuadratureConfig(rel_tol=args.rel_tol) if args.rel_tol else None


def build_model(args):
    if args.model == "electron":
        mass = parse_quantity(args.mass, "mass") if args.mass else CGS.m_e
        return Electron(mass=mass)
    if args.model == "sphere":
        if not args.radius or not args.epsilon:
            raise UsageError("sphere model needs --radius and --epsilon")
        try:
            eps = complex(args.epsilon.replace(" ", ""))
        except ValueError:
            raise UsageError(f"cannot parse epsilon {args.epsilon!r}") from None
        eps = eps.real if eps.imag == 0 else eps
        mass = parse_quantity(args.mass, "mass") if args.mass else None
        return DielectricSphere(parse_quantity(args.radius, "length"), eps, mass=mass)
    missing = [f for f in ("omega0", "mu", "linewidth") if not getattr(args, f)]
    if missing:
        raise UsageError("two_level model needs " + ", ".join(f"--{m}" for m in missing))
    mass = parse_quantity(args.mass, "mass") if args.mass else None
    return TwoLevelAtom(
        omega0=parse_quantity(args.omega0, "angular_frequency"),
        mu=parse_quantity(args.mu, "dipole"),
        beta=parse_quantity(args.linewidth, "rate"),
        p1=args.p1, p2=args.p2, mass=mass,
    )


def _out(result: RateResult, args, name: str, **coords) -> dict:
    r = result.to_si() if args.units == "si" else result
    d = r.to_dict(name)
    if coords:
        d["coordinates"] = coords
    return d


def _coord(value: float, unit: str, args) -> float:
    return to_si(value, unit)[0] if args.units == "si" else value


def _document(args, parameters: dict, results: list, notes: list | None = None) -> dict:
    doc = {
        "schema": SCHEMA_ID,
        "version": __version__,
        "command": args.command,
        "units": args.units,
        "parameters": parameters,
        "results": results,
    }
    if notes:
        doc["notes"] = notes
    return doc


def _model_params(model) -> dict:
    out = {"model": model.kind}
    for k, v in vars(model).items():
        out[k] = {"real": v.real, "imag": v.imag} if isinstance(v, complex) else v
    return out


def _temps(args) -> list[float]:
    return parse_sweep(args.temperature, "temperature")


def cmd_diffusion(args):
    model = build_model(args)
    results, rows = [], []
    for T in _temps(args):
        env = ThermalEnvironment(T, args.statistics)
        r = diffusion_constant(model, env, _cfg(args))
        try:
            cf = diffusion_closed_form(model, T, env.statistics).value
            r = RateResult(r.value, r.unit, r.err_estimate, r.method, {"closed_form": cf})
        except UnsupportedModelError:
            pass
        results.append(_out(r, args, "momentum_diffusion", temperature_K=T))
        rows.append([T, results[-1]["value"], results[-1]["err_estimate"]])
    header = ["temperature_K", f"D_{_unit_slug(results[-1]['unit'])}", "err_estimate"]
    params = {**_model_params(model), "statistics": env.statistics.value}
    return _document(args, params, results), (header, rows)


def _unit_slug(unit: str) -> str:
    return unit.replace(" ", "_").replace("^", "")


def cmd_drag(args):
    model = build_model(args)
    results = []
    for T in _temps(args):
        if isinstance(model, TwoLevelAtom):
            # closed form returns force per velocity, i.e. -m xi
            m_xi = -two_level_drag(model, T)
            quad = drag_coefficient_nonrel(model, T, _cfg(args), allow_gain=True).m_xi.value
            r = RateResult(m_xi, "g s^-1", 0.0, Method.CLOSED_FORM, {"quadrature": quad})
            results.append(_out(r, args, "friction_coefficient_m_xi", temperature_K=T))
        else:
            dc = drag_coefficient_nonrel(model, T, _cfg(args))
            m_xi = dc.m_xi
            try:
                cf = drag_closed_form(model, T)
                m_xi = RateResult(m_xi.value, m_xi.unit, m_xi.err_estimate, m_xi.method,
                                  {"closed_form": cf.m_xi.value})
            except UnsupportedModelError:
                cf = None
            results.append(_out(m_xi, args, "friction_coefficient_m_xi", temperature_K=T))
            if dc.xi is not None:
                xi = dc.xi
                if cf is not None and cf.xi is not None:
                    xi = RateResult(xi.value, xi.unit, xi.err_estimate, xi.method, {"closed_form": cf.xi.value})
                results.append(_out(xi, args, "drag_rate_xi", temperature_K=T))
    rows = [[r["coordinates"]["temperature_K"], r["name"], r["value"], r["unit"]] for r in results]
    return _document(args, _model_params(model), results), (["temperature_K", "name", "value", "unit"], rows)


def cmd_drag_relativistic(args):
    model = build_model(args)
    T = parse_quantity(args.temperature, "temperature")
    Tp = parse_quantity(args.particle_temperature, "temperature") if args.particle_temperature else T
    betas = parse_sweep(args.v_over_c)
    forces = _sweep_map(partial(_force_point, model=model, T=T, Tp=Tp, cfg=_cfg(args)), betas, args.jobs)
    results, rows = [], []
    for b, r in zip(betas, forces):
        results.append(_out(r, args, "force_x", v_over_c=b))
        rows.append([b, results[-1]["value"]])
    notes = []
    if args.slopes:
        sl = nonrel_slopes(model, T, _cfg(args))
        for key in ("slope_extrapolated", "slope_induced_only", "slope_induced_plus_radiation_reaction"):
            rr = RateResult(sl[key], "g s^-1", abs(sl[key]) * sl["extrapolation_residual"], Method.QUADRATURE)
            results.append(_out(rr, args, key))
        notes.append(f"extrapolated slope / induced-only slope = {sl['ratio_induced_only']:.9f}")
        notes.append("extrapolated slope / (induced + radiation reaction) slope = "
                     f"{sl['ratio_induced_plus_radiation_reaction']:.9f}")
    header = ["v_over_c", "F_newtons" if args.units == "si" else "F_dyn"]
    params = {**_model_params(model), "T_lab": T, "T_particle": Tp}
    return _document(args, params, results, notes), (header, rows)


def cmd_decoherence(args):
    model = build_model(args)
    T = parse_quantity(args.temperature, "temperature")
    seps = parse_sweep(args.separations, "length")
    values = _sweep_map(partial(decoherence_factor_with_error, model, T, cfg=_cfg(args)), seps, args.jobs)
    results, rows = [], []
    for d, (F, err) in zip(seps, values):
        r = RateResult(F, "s^-1", err, Method.QUADRATURE)
        dd = _coord(d, "cm", args)
        results.append(_out(r, args, "decoherence_factor", separation=dd))
        rows.append([dd, F])
    header = ["d_meters" if args.units == "si" else "d_cm", "F_per_second"]
    params = {**_model_params(model), "temperature_K": T,
              "separation_unit": "m" if args.units == "si" else "cm"}
    return _document(args, params, results), (header, rows)


def cmd_lambda(args):
    model = build_model(args)
    results, rows = [], []
    for T in _temps(args):
        lam, res = lambda_from_limit(model, T, _cfg(args))
        r = RateResult(lam, "cm^-2 s^-1", abs(lam) * res, Method.QUADRATURE)
        try:
            cf = scattering_constant_lambda(model, T)
            r = RateResult(r.value, r.unit, r.err_estimate, r.method, {"closed_form": cf.value})
            results.append(_out(cf, args, "lambda_closed_form", temperature_K=T))
        except UnsupportedModelError:
            pass
        results.append(_out(r, args, "lambda_from_limit", temperature_K=T))
        rows.append([T, results[-1]["value"], results[-1].get("checks", {}).get("closed_form", math.nan)])
    slug = "per_m2_per_s" if args.units == "si" else "per_cm2_per_s"
    return _document(args, _model_params(model), results), (
        ["temperature_K", f"lambda_from_limit_{slug}", f"lambda_closed_form_{slug}"], rows)


def cmd_spectrum(args):
    T = parse_quantity(args.temperature, "temperature")
    branch = Branch(args.branch)
    xs = parse_sweep(args.x_grid)
    if xs[0] <= 0:
        raise UsageError("x grid must be positive")
    wT = KB * T / HBAR
    x0 = args.anchor_x
    C0 = 1.0 if branch is Branch.WIEN else 0.0
    n0 = args.anchor_n if args.anchor_n is not None else float(analytic_occupation(branch, x0, C0))
    sol = spectrum_ode_solve(branch, T, x0 * wT, n0, np.array(xs) * wT)
    exact = analytic_occupation(branch, np.array(xs), sol.integration_constant)
    results, rows = [], []
    for x, w, n, ex in zip(xs, sol.omega_grid, sol.n_values, exact):
        err = abs(n - ex)
        results.append(_out(RateResult(float(n), "1", float(err), Method.QUADRATURE), args, "occupation",
                            x=x, omega_rad_per_s=float(w)))
        rows.append([x, float(w), float(n), float(ex)])
    params = {"branch": branch.value, "temperature_K": T, "anchor_x": x0, "anchor_n": n0,
              "integration_constant": sol.integration_constant}
    return _document(args, params, results), (["x", "omega_rad_per_s", "n", "n_analytic"], rows)


def cmd_fokker_planck(args):
    T = parse_quantity(args.temperature, "temperature")
    m = parse_quantity(args.mass, "mass")
    xi = parse_quantity(args.xi, "rate")
    vt = thermal_speed(m, T)
    f0 = gaussian_start(args.v0 * vt, args.sigma0 * vt, m, T, xi, n_cells=args.cells)
    checkpoints = parse_sweep(args.checkpoints)
    try:
        hist = fokker_planck_history(f0, xi, m, T, [c / xi for c in checkpoints], args.dt / xi)
    except StepRejectedError as exc:
        exc.suggested_dt *= xi
        raise
    si = args.units == "si"
    results, rows = [], []
    for (t, dist), ct in zip(hist, checkpoints):
        mb = maxwell_boltzmann(dist.v_grid, m, T)
        for name, val, unit in (
            ("mean_velocity", dist.mean, "cm s^-1"),
            ("velocity_variance", dist.variance, "cm^2 s^-2"),
            ("l1_distance_to_maxwell_boltzmann", dist.l1_distance(mb), "1"),
            ("norm", dist.norm, "1"),
        ):
            results.append(_out(RateResult(val, unit, 0.0, Method.QUADRATURE), args, name, xi_t=ct))
        vfac = 1e-2 if si else 1.0
        for v, f in zip(dist.v_grid, dist.f_values):
            rows.append([ct, v * vfac, f / vfac])
    header = ["xi_t", "v_m_per_s", "f_s_per_m"] if si else ["xi_t", "v_cm_per_s", "f_s_per_cm"]
    params = {"temperature_K": T, "mass_g": m, "xi_per_s": xi, "v0_thermal": args.v0,
              "sigma0_thermal": args.sigma0, "dt_over_xi": args.dt, "cells": args.cells}
    return _document(args, params, results), (header, rows)


def cmd_montecarlo(args):
    if args.format == "csv":
        raise UsageError("montecarlo emits JSON only; use --dump-paths for per-path CSV")
    results, notes = [], []
    params = {"process": args.process, "seed": args.seed}
    if args.process == "kicks":
        model = build_model(args)
        T = parse_quantity(args.temperature, "temperature")
        beta = beta_for_kicks(model, T, args.n_kicks, args.duration, args.bins, _cfg(args))
        spec = KickProcessSpec(model, T, beta, args.bins, args.duration, args.seed, args.sampling)
        r = simulate_kicks(spec, _cfg(args))
        results += [_out(r.msq_momentum, args, "steady_state_msq_momentum"),
                    _out(r.diffusion_estimate, args, "diffusion_estimate"),
                    _out(r.reference, args, "particle_statistics_reference")]
        notes.append(f"kicks={r.n_kicks}; z-score vs reference={r.z_score:.3f}")
        if r.warning:
            notes.append(r.warning)
        params.update(_model_params(model), temperature_K=T, beta_per_s=beta, duration_over_beta=args.duration)
    elif args.process == "recoil":
        mean, err = recoil_second_moment(args.sampling, args.samples, args.seed)
        results.append(_out(RateResult(mean, "1", err, Method.MONTE_CARLO), args, "recoil_second_moment"))
        params.update(sampling=args.sampling, samples=args.samples)
    elif args.process == "ou":
        T = parse_quantity(args.temperature, "temperature")
        m = parse_quantity(args.mass, "mass") if args.mass else 1e-14
        xi = parse_quantity(args.xi, "rate")
        ens = ou_trajectories(xi, m, T, args.paths, args.t_final / xi, args.dt / xi, args.seed,
                              record_every=max(1, int(round(1.0 / args.dt))))
        for t, mu, var, me, ve in zip(ens.times, ens.mean, ens.variance, ens.mean_err, ens.variance_err):
            results.append(_out(RateResult(float(mu), "cm s^-1", float(me), Method.MONTE_CARLO), args,
                                "mean_velocity", xi_t=float(t * xi)))
            results.append(_out(RateResult(float(var), "cm^2 s^-2", float(ve), Method.MONTE_CARLO), args,
                                "velocity_variance", xi_t=float(t * xi)))
        results.append(_out(RateResult(KB * T / m, "cm^2 s^-2", 0.0, Method.CLOSED_FORM), args,
                            "stationary_variance_kT_over_m"))
        if args.dump_paths:
            fac = 1e-2 if args.units == "si" else 1.0
            with open(args.dump_paths, "w", newline="", encoding="utf-8") as fh:
                w = csv.writer(fh)
                w.writerow(["path", "v_final_m_per_s" if args.units == "si" else "v_final_cm_per_s"])
                for i, v in enumerate(ens.final_velocities):
                    w.writerow([i, repr(float(v * fac))])
        params.update(temperature_K=T, mass_g=m, xi_per_s=xi, paths=args.paths)
    else:
        rep = gaussian_independence_test(FieldSampleSpec(args.modes, args.samples, args.seed))
        results.append(_out(RateResult(rep.correlation, "1", rep.correlation_bound / 3, Method.MONTE_CARLO),
                            args, "correlation_Ez_dEz_dx"))
        results.append(_out(RateResult(rep.max_cf_deviation, "1", rep.cf_bound / 5, Method.MONTE_CARLO),
                            args, "max_characteristic_function_deviation"))
        notes.append(f"correlation within 3 sigma: {rep.correlation_ok}; factorization within bound: "
                     f"{rep.factorization_ok}")
        params.update(modes=args.modes, samples=args.samples)
    return _document(args, params, results, notes), None


def cmd_air(args):
    T = parse_quantity(args.temperature, "temperature")
    env = AirEnvironment(T, parse_quantity(args.air_mass, "mass"),
                         parse_quantity(args.number_density, "number_density"),
                         parse_quantity(args.radius, "length"))
    r = air_diffusion(env, _cfg(args))
    res = [_out(r, args, "air_momentum_diffusion")]
    rows = [[T, res[0]["value"]]]
    params = {"temperature_K": T, "m_air_g": env.m_air, "number_density_per_cm3": env.number_density,
              "radius_cm": env.radius}
    return _document(args, params, res), (["temperature_K", f"D_{_unit_slug(res[0]['unit'])}"], rows)


def cmd_verify(args):
    if args.criteria:
        try:
            crit = [int(c) for c in args.criteria.split(",")]
        except ValueError:
            raise UsageError("criteria must be a comma list of integers") from None
        bad = [c for c in crit if c not in CRITERIA]
        if bad:
            raise UsageError(f"unknown criteria {bad}")
    else:
        crit = None
    t0 = time.perf_counter()
    rows = run_all(crit)
    elapsed = time.perf_counter() - t0
    doc = {
        "schema": SCHEMA_ID,
        "version": __version__,
        "command": "verify",
        "units": args.units,
        "parameters": {"criteria": crit or sorted(CRITERIA)},
        "results": [],
        "checks": [r.to_dict() for r in rows],
        "passed": all(r.passed for r in rows),
        "elapsed_s": elapsed,
    }
    table = [[r.criterion, r.name, r.residual, r.threshold, "PASS" if r.passed else "FAIL"] for r in rows]
    return doc, (["criterion", "check", "residual", "threshold", "status"], table)


COMMANDS = {
    "diffusion": cmd_diffusion,
    "drag": cmd_drag,
    "drag-relativistic": cmd_drag_relativistic,
    "decoherence": cmd_decoherence,
    "lambda": cmd_lambda,
    "spectrum": cmd_spectrum,
    "fokker-planck": cmd_fokker_planck,
    "montecarlo": cmd_montecarlo,
    "air": cmd_air,
    "verify": cmd_verify,
}


def _format_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _format_table(doc) -> str:
    lines = [f"{'crit':>4}  {'status':6}  {'residual':>11}  {'threshold':>9}  check"]
    for c in doc["checks"]:
        lines.append(f"{c['criterion']:>4}  {'PASS' if c['passed'] else 'FAIL':6}  "
                     f"{c['residual']:11.3e}  {c['threshold']:9.2e}  {c['name']}")
        if c["detail"]:
            lines.append(f"{'':>37}{c['detail']}")
    lines.append(f"overall: {'PASS' if doc['passed'] else 'FAIL'} in {doc['elapsed_s']:.1f} s")
    return "\n".join(lines) + "\n"


def _emit_error(exc: BaseException, code: int):
    err = {"type": type(exc).__name__, "message": str(exc), "exit_code": code}
    if isinstance(exc, QuadratureError):
        err["partial"] = exc.partial if math.isfinite(exc.partial) else None
        err["err"] = exc.err if math.isfinite(exc.err) else None
    if isinstance(exc, StepRejectedError):
        err["suggested_dt"] = exc.suggested_dt
    sys.stderr.write(json.dumps({"error": err}) + "\n")


def run(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(_with_config(argv))
        if args.jobs < 1:
            raise UsageError("--jobs must be >= 1")
        doc, table = COMMANDS[args.command](args)
        if args.format == "table":
            text = _format_table(doc)
        elif args.format == "csv":
            text = _format_csv(*table)
        else:
            text = json.dumps(doc, indent=2, allow_nan=False) + "\n"
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        if args.command == "verify" and not doc["passed"]:
            return 1
        return 0
    except UsageError as exc:
        _emit_error(exc, 2)
        return 2
    except BBDipoleError as exc:
        _emit_error(exc, exc.exit_code)
        return exc.exit_code
    except ValueError as exc:
        _emit_error(exc, 3)
        return 3


def main() -> None:
    sys.exit(run())
