"""Exact solutions, the energy functional and the discrete residual.

Everything is evaluated on the cylinder, where the weighted equation
-Δu = 2u(1-u^2)/|x|^2 for radial u reads -v'' = 2v(1-v^2).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DomainError
from .geometry import RadialProfile, from_cylinder

TAIL_DECAY = 1e-12


@dataclass(frozen=True)
class SolitonParams:
    a: float
    sign: int = 1

    def __post_init__(self):
        if not (self.a > 0 and np.isfinite(self.a)):
            raise DomainError(f"soliton scale must be positive, got {self.a}")
        if self.sign not in (1, -1):
            raise DomainError(f"soliton sign must be +1 or -1, got {self.sign}")


@dataclass(frozen=True)
class EnergyValue:
    """Energy 2π∫(v_t² + (v²-1)²) dt; ``window`` is None for the whole line."""

    value: float
    window: Optional[tuple[float, float]]
    finite: bool = True
    windowed_value: Optional[float] = None

    def to_dict(self):
        return {
            "value": self.value if self.finite else "inf",
            "finite": self.finite,
            "window": list(self.window) if self.window is not None else None,
            "windowed_value": self.windowed_value,
        }


def soliton_value(p: SolitonParams, r):
    """sign * (a² - r²) / (a² + r²)."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise DomainError("soliton_value requires r >= 0")
    with np.errstate(over="ignore", invalid="ignore"):
        s = r / p.a
        val = np.where(s < 1e150, (1 - s * s) / (1 + s * s), -1.0)
    out = p.sign * val
    return float(out) if out.ndim == 0 else out


def soliton_cylinder(p: SolitonParams, t):
    """The soliton on the cylinder: -sign * tanh(t - ln a)."""
    out = -p.sign * np.tanh(np.asarray(t, dtype=float) - np.log(p.a))
    return float(out) if out.ndim == 0 else out


def soliton_cylinder_dt(p: SolitonParams, t):
    s = np.asarray(t, dtype=float) - np.log(p.a)
    # sech² s = 4e^{-2|s|} / (1 + e^{-2|s|})², free of overflow for large |s|
    e = np.exp(-2 * np.abs(s))
    out = -p.sign * 4 * e / (1 + e) ** 2
    return float(out) if out.ndim == 0 else out


def sample_soliton(p: SolitonParams, t_min=-10.0, t_max=10.0, n=2001) -> RadialProfile:
    """Soliton sampled on radii uniform in t."""
    t = np.linspace(t_min, t_max, n)
    return RadialProfile(from_cylinder(t), soliton_cylinder(p, t), origin_value=float(p.sign))


def uniform_step(t, rtol=1e-6) -> float:
    t = np.asarray(t, dtype=float)
    if t.size < 2:
        raise DomainError("need at least two grid points")
    d = np.diff(t)
    h = (t[-1] - t[0]) / (t.size - 1)
    if np.max(np.abs(d - h)) > rtol * abs(h):
        raise DomainError("grid is not uniform in t = ln r")
    return float(h)


def pde_residual(profile: RadialProfile) -> np.ndarray:
    """-v_tt - 2v(1-v²) at interior grid points, by central differences."""
    if len(profile) < 3:
        raise DomainError("pde_residual needs at least 3 grid points")
    h = uniform_step(profile.t)
    v = profile.u
    vtt = (v[2:] - 2 * v[1:-1] + v[:-2]) / (h * h)
    vi = v[1:-1]
    return -vtt - 2 * vi * (1 - vi * vi)


def energy_density(v, vt):
    v = np.asarray(v, dtype=float)
    return np.asarray(vt, dtype=float) ** 2 + (v * v - 1) ** 2


def cylinder_energy(t, v, vt=None, window=None) -> EnergyValue:
    """Trapezoid-rule energy of samples v(t_i) on a t-grid.

    ``vt`` defaults to second-order finite differences of ``v``.  With
    ``window=None`` the whole-line value is reported as finite only if the
    energy density has decayed below 1e-12 at both grid ends.
    """
    t = np.asarray(t, dtype=float)
    v = np.asarray(v, dtype=float)
    if t.size < 3:
        raise DomainError("energy needs at least 3 samples")
    if vt is None:
        vt = np.gradient(v, t, edge_order=2)
    dens = energy_density(v, vt)
    if window is None:
        total = 2 * np.pi * float(np.trapezoid(dens, t))
        if dens[0] < TAIL_DECAY and dens[-1] < TAIL_DECAY:
            return EnergyValue(total, None, True, total)
        return EnergyValue(float("inf"), None, False, total)
    t0, t1 = window
    if not (t[0] - 1e-12 <= t0 < t1 <= t[-1] + 1e-12):
        raise DomainError(f"window {window} outside grid [{t[0]}, {t[-1]}]")
    mask = (t >= t0 - 1e-12) & (t <= t1 + 1e-12)
    value = 2 * np.pi * float(np.trapezoid(dens[mask], t[mask]))
    return EnergyValue(value, (float(t0), float(t1)), True, value)


def energy(profile, window=None, derivative: Optional[Callable] = None, n: int = 20001) -> EnergyValue:
    """Energy of a RadialProfile, or of a callable v(t) sampled on ``window``.

    For a callable, ``derivative`` (v_t as a callable) is used when given;
    otherwise the samples are differenced.
    """
    if isinstance(profile, RadialProfile):
        return cylinder_energy(profile.t, profile.u, window=window)
    if callable(profile):
        if window is None:
            raise DomainError("a window is required when integrating a function")
        t = np.linspace(window[0], window[1], n)
        vt = derivative(t) if derivative is not None else None
        return cylinder_energy(t, profile(t), vt, window=window)
    raise DomainError(f"cannot take the energy of {type(profile).__name__}")
