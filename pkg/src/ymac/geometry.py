"""Plane <-> cylinder coordinates and the Kelvin inversion for radial profiles.

A radial function u(r) on the punctured plane becomes v(t) = u(e^t) on the
cylinder.  Profiles are stored on log-spaced radii so that this change of
variables is a relabelling of samples.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import DomainError


def _frozen(a):
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Samples u(r_i) of a radial function on strictly increasing radii."""

    r: np.ndarray
    u: np.ndarray
    origin_value: Optional[float] = None

    def __post_init__(self):
        r = _frozen(self.r)
        u = _frozen(self.u)
        if r.ndim != 1 or r.shape != u.shape:
            raise DomainError("r and u must be 1-D arrays of equal length")
        if r.size == 0 or np.any(r <= 0) or np.any(np.diff(r) <= 0):
            raise DomainError("radii must be positive and strictly increasing")
        if not np.all(np.isfinite(u)):
            raise DomainError("profile values must be finite")
        if self.origin_value is not None and not np.isfinite(self.origin_value):
            raise DomainError("origin_value must be finite when given")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "u", u)

    @classmethod
    def from_cylinder(cls, t, v, origin_value=None) -> "RadialProfile":
        return cls(from_cylinder(np.asarray(t, dtype=float)), v, origin_value)

    @property
    def t(self) -> np.ndarray:
        return to_cylinder(self.r)

    def __len__(self):
        return self.r.size

    # -- serialization -----------------------------------------------------

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["r", "u"])
            for ri, ui in zip(self.r, self.u):
                writer.writerow([f"{ri:.17g}", f"{ui:.17g}"])

    @classmethod
    def from_csv(cls, path) -> "RadialProfile":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = [h.strip() for h in next(reader)]
            rows = [[float(x) for x in row] for row in reader if row]
        cols = dict(zip(header, np.array(rows, dtype=float).T))
        if "r" in cols and "u" in cols:
            return cls(cols["r"], cols["u"])
        if "t" in cols and "v" in cols:
            return cls.from_cylinder(cols["t"], cols["v"])
        raise DomainError(f"{path}: expected header 'r,u' or 't,v', got {header}")

    def to_json(self) -> str:
        return json.dumps({
            "r": [float(f"{x:.17g}") for x in self.r],
            "u": [float(f"{x:.17g}") for x in self.u],
            "origin_value": self.origin_value,
        })

    @classmethod
    def from_json(cls, text: str) -> "RadialProfile":
        d = json.loads(text)
        return cls(d["r"], d["u"], d.get("origin_value"))

    @classmethod
    def load(cls, path) -> "RadialProfile":
        path = Path(path)
        if path.suffix == ".json":
            return cls.from_json(path.read_text())
        return cls.from_csv(path)


@dataclass(frozen=True)
class CylinderCoords:
    t: float
    theta: float

    @classmethod
    def from_plane(cls, x: float, y: float) -> "CylinderCoords":
        r = np.hypot(x, y)
        return cls(float(to_cylinder(r)), float(np.arctan2(y, x) % (2 * np.pi)))

    def to_plane(self) -> tuple[float, float]:
        r = from_cylinder(self.t)
        return float(r * np.cos(self.theta)), float(r * np.sin(self.theta))


def to_cylinder(r):
    """t = ln r."""
    r_arr = np.asarray(r, dtype=float)
    if np.any(~(r_arr > 0)):
        raise DomainError("to_cylinder requires r > 0")
    t = np.log(r_arr)
    return float(t) if t.ndim == 0 else t


def from_cylinder(t):
    """r = e^t."""
    r = np.exp(np.asarray(t, dtype=float))
    return float(r) if r.ndim == 0 else r


def kelvin(profile: RadialProfile) -> RadialProfile:
    """Radial Kelvin transform u(r) -> u(1/r), i.e. t -> -t on the cylinder."""
    return RadialProfile(1.0 / profile.r[::-1], profile.u[::-1])


def log_grid(t_min: float, t_max: float, n: int) -> np.ndarray:
    """Radii e^{t_i} for n points uniform in t."""
    return from_cylinder(np.linspace(t_min, t_max, n))
