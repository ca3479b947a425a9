"""Acceptance criteria, runnable from the CLI (`ymac check`) and from pytest.

Each criterion is a function returning (passed, detail).  Tolerances are
fixed here; ``YM_CHECK_FAST=1`` halves the cylinder grids for CI runs.
"""
from __future__ import annotations

import itertools
import os
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.stats import qmc

from . import classify as cl
from .closedform import SolitonParams, energy, pde_residual, sample_soliton, soliton_cylinder
from .cylinder import (horizontal_identity, moving_plane_check, profile_field, random_field,
                       relax, soliton_field)
from .geometry import kelvin
from .orbit import (VT_ZERO, PhasePoint, detect_period, integrate,
                    is_equilibrium)
from .period import period_agm, period_integral, period_ode, small_amplitude_period

M_GRID = tuple(round(0.1 * k, 10) for k in range(1, 10))
ODE_TOL = 1e-10


def fast_mode() -> bool:
    return os.environ.get("YM_CHECK_FAST", "") == "1"


def _grid(n):
    return max(8, n // 2) if fast_mode() else n


@dataclass
class CheckResult:
    id: int
    name: str
    group: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.id:2d} {self.name} ({self.seconds:.1f}s) {_short(self.detail)}"


def _short(detail):
    parts = []
    for k, v in detail.items():
        if isinstance(v, float):
            parts.append(f"{k}={v:.3g}")
        elif isinstance(v, (int, bool, str)):
            parts.append(f"{k}={v}")
    return " ".join(parts)


# -- criteria --------------------------------------------------------------

def period_triple_agreement(**_):
    t0 = time.perf_counter()
    quad_agm = ode_rel = 0.0
    for M in M_GRID:
        tq = period_integral(M).T
        quad_agm = max(quad_agm, abs(tq - period_agm(M).T))
        ode_rel = max(ode_rel, abs(tq - period_ode(M).T) / tq)
    runtime = time.perf_counter() - t0
    ok = quad_agm <= 1e-10 and ode_rel <= 1e-6 and runtime < 10
    return ok, {"max_quad_agm": quad_agm, "max_quad_ode_rel": ode_rel, "runtime_s": runtime}


def small_amplitude_limit(**_):
    dev = abs(period_integral(1e-4).T - small_amplitude_period())
    return dev <= 1e-8, {"deviation": dev, "tolerance": 1e-8}


def first_integral_conservation(ode_tol=ODE_TOL, **_):
    starts = [PhasePoint(M, 0.0) for M in M_GRID]
    starts += [PhasePoint(0.0, 0.0), PhasePoint(1.0, 0.0), PhasePoint(-1.0, 0.0),
               PhasePoint(0.0, 0.5), PhasePoint(-0.3, 0.4)]
    drift = 0.0
    for p in starts:
        drift = max(drift, integrate(p, (0.0, 100.0), ode_tol).drift)
    return drift <= 1e-8, {"max_drift": drift, "ode_tol": ode_tol, "orbits": len(starts)}


def soliton_exactness(**_):
    p = SolitonParams(1.0, 1)
    res = []
    for h in (0.1, 0.05, 0.025):
        n = int(round(20 / h)) + 1
        res.append(float(np.max(np.abs(pde_residual(sample_soliton(p, -10, 10, n))))))
    orders = [float(np.log2(res[i] / res[i + 1])) for i in range(2)]
    orbit = integrate(PhasePoint(0.0, -1.0), (-10.0, 10.0), 1e-18, t0=0.0)
    t = np.linspace(-10, 10, 4001)
    match = float(np.max(np.abs(orbit(t)[:, 0] - soliton_cylinder(p, t))))
    ok = all(abs(o - 2.0) <= 0.1 for o in orders) and match <= 1e-8
    return ok, {"order_1": orders[0], "order_2": orders[1], "heteroclinic_error": match}


def soliton_energy(**_):
    target = 16 * np.pi / 3
    values = []
    for a in (0.5, 1.0, 2.0):
        prof = sample_soliton(SolitonParams(a, 1), -20.0, 20.0, 160001)
        values.append(energy(prof, window=(-20.0, 20.0)).value)
    err = max(abs(v - target) for v in values)
    pair = max(abs(x - y) for x, y in itertools.combinations(values, 2))
    return err <= 1e-6 and pair <= 1e-8, {"max_error": err, "max_pairwise": pair}


def _observed_class(p: PhasePoint, span=60.0, tol=ODE_TOL):
    orbit = integrate(p, (0.0, span), tol)
    if orbit.escaped:
        return "UnboundedBranch", orbit
    if is_equilibrium(orbit):
        return ("TrivialZero" if p.v == 0 else "Equilibrium"), orbit
    if len(orbit.events_of(VT_ZERO)) >= 3 and np.max(np.abs(orbit.v)) < 1:
        return "Periodic", orbit
    both = integrate(p, (-10.0, 10.0), 1e-18, t0=0.0)
    ends = both(np.array([-10.0, 10.0]))[:, 0]
    if np.all(np.abs(np.abs(ends) - 1) < 1e-6) and ends[0] * ends[1] < 0:
        return "Soliton", orbit
    return "unresolved", orbit


def taxonomy_consistency(n=1000, **_):
    t0 = time.perf_counter()
    pts = 4.0 * qmc.Halton(d=2, scramble=False).random(n) - 2.0
    mismatches = []
    counts = {}
    for v, vt in pts:
        p = PhasePoint(float(v), float(vt))
        predicted = cl.classify_initial(p)
        observed, orbit = _observed_class(p)
        ok = predicted.name == observed
        if ok and isinstance(predicted, cl.Periodic):
            ok = abs(detect_period(orbit) - predicted.T) <= 1e-6 * predicted.T
        counts[predicted.name] = counts.get(predicted.name, 0) + 1
        if not ok:
            mismatches.append((float(v), float(vt), predicted.name, observed))
    runtime = time.perf_counter() - t0
    detail = {"points": n, "mismatches": len(mismatches), "runtime_s": runtime}
    detail.update({f"n_{k}": c for k, c in sorted(counts.items())})
    if mismatches:
        detail["first_mismatch"] = str(mismatches[0])
    return not mismatches and runtime < 60, detail


def classification_roundtrips(**_):
    sol = cl.classify_profile(sample_soliton(SolitonParams(2.0, 1)))
    per = cl.classify_profile(cl.sample_periodic(0.5))
    kel = cl.classify_profile(kelvin(sample_soliton(SolitonParams(2.0, 1))))
    T = period_integral(0.5).T
    ok_sol = isinstance(sol, cl.Soliton) and sol.sign == 1 and abs(sol.a - 2.0) <= 1e-6
    ok_per = isinstance(per, cl.Periodic) and abs(per.M - 0.5) <= 1e-6 and abs(per.T - T) <= 1e-6 * T
    ok_kel = isinstance(kel, cl.Soliton) and kel.sign == -1 and abs(kel.a - 0.5) <= 1e-6
    return ok_sol and ok_per and ok_kel, {
        "soliton_a": getattr(sol, "a", float("nan")),
        "periodic_M": getattr(per, "M", float("nan")),
        "kelvin_a": getattr(kel, "a", float("nan")),
        "kelvin_sign": getattr(kel, "sign", 0),
    }


def cylinder_rigidity(**_):
    t0 = time.perf_counter()
    f = soliton_field(1.0, 1, -8.0, 8.0, _grid(256), _grid(64), perturbation=0.1)
    g, rep = relax(f, 1e-8, 400_000)
    runtime = time.perf_counter() - t0
    ok = (rep.converged and rep.anisotropy <= 1e-6 and rep.final_residual <= 1e-8
          and rep.max_abs <= 1 + 1e-12 and runtime < 300)
    return ok, {"anisotropy": rep.anisotropy, "residual": rep.final_residual,
                "max_abs": rep.max_abs, "steps": rep.steps, "runtime_s": runtime,
                "grid": f"{f.n_t}x{f.n_theta}"}


def horizontal_identity_check(**_):
    tol = 1e-8
    f = soliton_field(1.0, 1, -8.0, 8.0, _grid(256), _grid(64))
    g, rep = relax(f, tol, 400_000)
    t, H = horizontal_identity(g)
    bound = 50 * (g.h_t ** 2 + tol)
    tails = np.abs(g.values[1:-1, 0]) > 0.999
    std = float(np.std(H))
    tail_dev = float(np.max(np.abs(H[tails] + np.pi)))
    return rep.converged and std <= bound and tail_dev <= bound, {
        "std_H": std, "tail_dev_from_minus_pi": tail_dev, "bound": bound}


def zero_trap(**_):
    worst = 0.0
    for seed in range(5):
        f = random_field(0.3, seed, -1.0, 1.0, 17, 32)
        g, rep = relax(f, 1e-10, 500_000)
        worst = max(worst, float(np.max(np.abs(g.values))))
    return worst <= 1e-8, {"max_abs_v": worst, "seeds": 5, "window": "[-1,1]"}


def dichotomy_diagnostics(**_):
    M = 0.5
    T = period_integral(M).T
    orbit = integrate(PhasePoint(M, 0.0), (0.0, T), 1e-13)
    n_t = _grid(257) | 1
    per_field = profile_field(0.0, T, n_t, 8, lambda t: orbit(t)[..., 0])
    rep = moving_plane_check(per_field)
    t1 = T / 2
    ok_per = rep.reflection_defect <= 1e-6 and abs(rep.best_lambda - t1) <= per_field.h_t
    sol_field = soliton_field(1.0, -1, -8.0, 8.0, _grid(256), 8)
    srep = moving_plane_check(sol_field)
    ok_sol = srep.min_vt > 0 and srep.reflection_defect > 1e-6
    return ok_per and ok_sol, {
        "periodic_defect": rep.reflection_defect, "lambda_minus_t1": rep.best_lambda - t1,
        "soliton_min_vt": srep.min_vt, "soliton_best_defect": srep.reflection_defect}


CRITERIA: list[tuple[int, str, str, Callable]] = [
    (1, "period triple agreement", "period", period_triple_agreement),
    (2, "small-amplitude limit", "period", small_amplitude_limit),
    (3, "first-integral conservation", "orbit", first_integral_conservation),
    (4, "soliton exactness", "orbit", soliton_exactness),
    (5, "soliton energy", "energy", soliton_energy),
    (6, "taxonomy consistency", "classify", taxonomy_consistency),
    (7, "classification round-trips", "classify", classification_roundtrips),
    (8, "cylinder rigidity", "cylinder", cylinder_rigidity),
    (9, "horizontal identity", "cylinder", horizontal_identity_check),
    (10, "zero trap", "cylinder", zero_trap),
    (11, "reflection/monotone dichotomy", "cylinder", dichotomy_diagnostics),
]


def select(only=None):
    if not only:
        return list(CRITERIA)
    keys = {str(k).strip() for k in only}
    return [c for c in CRITERIA if str(c[0]) in keys or c[2] in keys]


def run_one(entry, **kwargs) -> CheckResult:
    cid, name, group, fn = entry
    t0 = time.perf_counter()
    passed, detail = fn(**kwargs)
    return CheckResult(cid, name, group, bool(passed), detail, time.perf_counter() - t0)


def run_checks(only=None, progress=None, **kwargs) -> list[CheckResult]:
    results = []
    for entry in select(only):
        r = run_one(entry, **kwargs)
        if progress is not None:
            progress(r)
        results.append(r)
    return results
