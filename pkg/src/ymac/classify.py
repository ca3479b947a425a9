"""Classification of phase data and sampled profiles.

Every finite phase point (v, v_t) falls in exactly one class, decided by the
first integral c = v_t² - (v²-1)² and, inside c ∈ (-1, 0), by which band
|v| <= M or |v| >= sqrt(2 - M²) the point lies on.  Values of c within
``EPS_C`` of 0 or -1 are snapped to the boundary class; the raw c is kept
on every result.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .closedform import SolitonParams, pde_residual, uniform_step
from .errors import DomainError, NotASolutionError, NumericalFailure
from .geometry import RadialProfile
from .orbit import (V_ZERO, VT_ZERO, PhasePoint, amplitude_from_c, first_integral,
                    integrate)
from .period import period_integral

EPS_C = 1e-9
EPS_V = 1e-8
PHASE_TOL = 1e-12

C_ABOVE_ZERO = "c_above_zero"
C_BELOW_MINUS_ONE = "c_below_minus_one"
OUTER_BAND = "outer_band"

DISCONTINUOUS = "discontinuous"


@dataclass(frozen=True)
class TrivialZero:
    c: float = -1.0
    name = "TrivialZero"


@dataclass(frozen=True)
class Equilibrium:
    sign: int
    c: float = 0.0
    name = "Equilibrium"


@dataclass(frozen=True)
class Soliton:
    params: SolitonParams
    c: float = 0.0
    name = "Soliton"

    @property
    def a(self):
        return self.params.a

    @property
    def sign(self):
        return self.params.sign


@dataclass(frozen=True)
class Periodic:
    M: float
    T: float
    phase: float
    c: float
    name = "Periodic"


@dataclass(frozen=True)
class UnboundedBranch:
    c: float
    reason: str
    # outside the bounded classification; reported as an extension
    name = "UnboundedBranch"


Classification = Union[TrivialZero, Equilibrium, Soliton, Periodic, UnboundedBranch]


def to_dict(cls: Classification) -> dict:
    out = {"class": cls.name, "c": cls.c, "M": None, "T": None, "a": None,
           "sign": None, "origin": origin_value(cls)}
    if isinstance(cls, Equilibrium):
        out["sign"] = cls.sign
    elif isinstance(cls, Soliton):
        out["a"] = cls.a
        out["sign"] = cls.sign
    elif isinstance(cls, Periodic):
        out.update(M=cls.M, T=cls.T, phase=cls.phase)
    elif isinstance(cls, UnboundedBranch):
        out["reason"] = cls.reason
        out["extension"] = True
    return out


def _soliton_through(p: PhasePoint, c: float, tol: float) -> Soliton:
    """Heteroclinic -sign tanh(t - ln a) through p, with p placed at t = 0."""
    sign = -1 if p.v_t > 0 else 1
    if p.v == 0.0:
        return Soliton(SolitonParams(1.0, sign), c)
    # v(t) = sign tanh(t0 - t) vanishes at t0, ahead of p iff sign*v > 0
    ahead = sign * p.v > 0
    reach = float(np.arctanh(min(abs(p.v), 1 - 1e-16))) + 1.0
    span = (0.0, reach) if ahead else (-reach, 0.0)
    orbit = integrate(p, span, tol, t0=0.0)
    zeros = [e.time for e in orbit.events_of(V_ZERO)]
    if not zeros:
        raise NumericalFailure(f"no zero crossing found on the heteroclinic through {p}")
    t0 = min(zeros, key=abs)
    return Soliton(SolitonParams(float(np.exp(t0)), sign), c)


def _phase_to_next_max(p: PhasePoint, T: float, tol: float) -> float:
    if p.v_t == 0.0 and p.v > 0:
        return 0.0
    orbit = integrate(p, (0.0, 1.25 * T), tol)
    maxima = [e.time for e in orbit.events_of(VT_ZERO) if e.direction < 0]
    if not maxima:
        raise NumericalFailure(f"no maximum found within 1.25 periods from {p}")
    return float(maxima[0] % T)


def classify_initial(p: PhasePoint, eps_c: float = EPS_C, eps_v: float = EPS_V,
                     tol: float = 1e-12) -> Classification:
    """Class of the orbit through phase point ``p``."""
    if not isinstance(p, PhasePoint):
        p = PhasePoint(*p)
    c = first_integral(p)
    if abs(c + 1) <= eps_c:
        return TrivialZero(c)
    if c < -1:
        return UnboundedBranch(c, C_BELOW_MINUS_ONE)
    if abs(c) <= eps_c:
        if abs(abs(p.v) - 1) <= eps_v and abs(p.v_t) <= eps_v:
            return Equilibrium(int(np.sign(p.v)), c)
        if abs(p.v) < 1:
            return _soliton_through(p, c, tol)
        return UnboundedBranch(c, OUTER_BAND)
    if c > 0:
        return UnboundedBranch(c, C_ABOVE_ZERO)
    M = amplitude_from_c(c)
    if abs(p.v) <= M + eps_v:
        T = period_integral(M).T
        return Periodic(M, T, _phase_to_next_max(p, T, tol), c)
    if abs(p.v) >= np.sqrt(2 - M * M) - eps_v:
        return UnboundedBranch(c, OUTER_BAND)
    raise DomainError(f"phase point {p} lies between the bands for c={c}")


def origin_value(cls: Classification):
    """Limit of u at r -> 0: -1, 0, +1, or "discontinuous"."""
    if isinstance(cls, TrivialZero):
        return 0
    if isinstance(cls, Soliton):
        return cls.sign
    if isinstance(cls, Equilibrium):
        return cls.sign
    if isinstance(cls, Periodic):
        return DISCONTINUOUS
    return None


# central-difference weights of order 8 for the first derivative, offsets 1..4
_D1 = np.array([4 / 5, -1 / 5, 4 / 105, -1 / 280])


def _derivative_o8(v, h):
    n = v.size
    d = np.zeros(n - 8)
    for k, w in enumerate(_D1, start=1):
        d += w * (v[4 + k:n - 4 + k] - v[4 - k:n - 4 - k])
    return d / h


@dataclass(frozen=True)
class ProfileDiagnostics:
    index: int
    v: float
    v_t: float
    c_median: float
    c_spread: float
    residual_max: float
    residual_gate: float


def profile_phase_data(profile: RadialProfile, min_decades: float = 3.0) -> ProfileDiagnostics:
    """Phase data (v, v_t) of a sampled profile, with gate diagnostics."""
    t = profile.t
    if len(profile) < 9 or t[-1] - t[0] < min_decades * np.log(10) - 1e-9:
        raise DomainError(f"profile must cover at least {min_decades} decades of r with >= 9 points")
    h = uniform_step(t)
    res = np.abs(pde_residual(profile))
    residual_max = float(res.max())
    gate = 100 * h * h
    if residual_max > gate:
        raise NotASolutionError(f"residual {residual_max:.3g} exceeds 100 h^2 = {gate:.3g}")
    v = profile.u
    vt = _derivative_o8(v, h)
    vi = v[4:-4]
    cs = vt * vt - (vi * vi - 1) ** 2
    # sample where |v| is smallest: the heteroclinic is best conditioned there
    k = int(np.argmin(np.abs(vi)))
    return ProfileDiagnostics(k + 4, float(vi[k]), float(vt[k]), float(np.median(cs)),
                              float(cs.max() - cs.min()), residual_max, gate)


def classify_profile(profile: RadialProfile, tol: float = 1e-12) -> Classification:
    """Class of a sampled radial solution.

    The residual gate rejects non-solutions.  The snapping threshold for c is
    widened to 10x the spread of the finite-difference estimates of c along
    the profile, since that spread measures how well c is known.
    """
    d = profile_phase_data(profile)
    eps_c = max(EPS_C, 10 * d.c_spread)
    eps_v = max(EPS_V, np.sqrt(eps_c))
    cls = classify_initial(PhasePoint(d.v, d.v_t), eps_c=eps_c, eps_v=eps_v, tol=tol)
    # classify_initial puts the sample at t = 0; move back to r = 1
    t_k = float(profile.t[d.index])
    if isinstance(cls, Soliton):
        return Soliton(SolitonParams(cls.a * float(np.exp(t_k)), cls.sign), cls.c)
    if isinstance(cls, Periodic):
        return Periodic(cls.M, cls.T, float((t_k + cls.phase) % cls.T), cls.c)
    return cls


def sample_periodic(M: float, t_min: float = -10.0, t_max: float = 10.0, n: int = 2001,
                    t_peak: float = 0.0, tol: float = 1e-13) -> RadialProfile:
    """Periodic solution with maximum M at t_peak, sampled uniformly in t."""
    t = np.linspace(t_min, t_max, n)
    orbit = integrate(PhasePoint(M, 0.0), (t_min, t_max), tol, t0=t_peak)
    return RadialProfile.from_cylinder(t, orbit(t)[:, 0])
