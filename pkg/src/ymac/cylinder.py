"""Relaxation of  -v_tt - v_θθ = 2v(1-v²)  on a truncated θ-periodic cylinder.

The stationary equation is reached as the steady state of the gradient flow
v_s = Δv + 2v(1-v²), stepped with explicit Euler.  With the time step
dt = 0.2 min(h_t², h_θ²) every iterate obeys a discrete maximum principle:
data in [-1, 1] stay in [-1, 1].

Grid: rows t_i = t_min + i h_t (i = 0..n_t-1, both ends included), columns
θ_j = 2πj/n_θ with wrap-around indexing.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .closedform import SolitonParams, soliton_cylinder
from .errors import ConfigurationError, DomainError

DIRICHLET = "dirichlet"
NEUMANN_ZERO = "neumann_zero"
MAX_DT_FACTOR = 0.25
DEFAULT_DT_FACTOR = 0.2


@dataclass(frozen=True)
class BoundaryCondition:
    kind: str
    value: Optional[float] = None

    def __post_init__(self):
        if self.kind not in (DIRICHLET, NEUMANN_ZERO):
            raise DomainError(f"unknown boundary condition {self.kind!r}")
        if self.kind == DIRICHLET and (self.value is None or not np.isfinite(self.value)):
            raise DomainError("Dirichlet condition needs a finite value")

    @classmethod
    def dirichlet(cls, value: float) -> "BoundaryCondition":
        return cls(DIRICHLET, float(value))

    @classmethod
    def neumann_zero(cls) -> "BoundaryCondition":
        return cls(NEUMANN_ZERO)

    @classmethod
    def parse(cls, spec: str) -> "BoundaryCondition":
        """'neumann' or 'dirichlet:<value>' (a bare number means Dirichlet)."""
        spec = spec.strip()
        if spec in ("neumann", NEUMANN_ZERO):
            return cls.neumann_zero()
        if spec.startswith("dirichlet:"):
            return cls.dirichlet(float(spec.split(":", 1)[1]))
        return cls.dirichlet(float(spec))

    def to_dict(self):
        return {"kind": self.kind, "value": self.value}


@dataclass(frozen=True, eq=False)
class CylinderField:
    t_min: float
    t_max: float
    values: np.ndarray
    bc_left: BoundaryCondition
    bc_right: BoundaryCondition

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] < 3 or v.shape[1] < 3:
            raise DomainError("field needs at least 3 rows and 3 columns")
        if not self.t_max > self.t_min:
            raise DomainError("t_max must exceed t_min")
        if not np.all(np.isfinite(v)):
            raise DomainError("field values must be finite")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def n_t(self) -> int:
        return self.values.shape[0]

    @property
    def n_theta(self) -> int:
        return self.values.shape[1]

    @property
    def h_t(self) -> float:
        return (self.t_max - self.t_min) / (self.n_t - 1)

    @property
    def h_theta(self) -> float:
        return 2 * np.pi / self.n_theta

    @property
    def t(self) -> np.ndarray:
        return np.linspace(self.t_min, self.t_max, self.n_t)

    @property
    def theta(self) -> np.ndarray:
        return self.h_theta * np.arange(self.n_theta)

    @classmethod
    def from_function(cls, f, t_min, t_max, n_t, n_theta, bc_left=None, bc_right=None):
        """Sample f(t, θ) (broadcasting) and impose the boundary rows.

        Boundary conditions default to Dirichlet with the θ-mean of the
        sampled end rows.
        """
        t = np.linspace(t_min, t_max, n_t)[:, None]
        th = (2 * np.pi / n_theta) * np.arange(n_theta)[None, :]
        v = np.broadcast_to(f(t, th), (n_t, n_theta)).astype(float)
        if bc_left is None:
            bc_left = BoundaryCondition.dirichlet(float(v[0].mean()))
        if bc_right is None:
            bc_right = BoundaryCondition.dirichlet(float(v[-1].mean()))
        return cls(t_min, t_max, _apply_bc(v.copy(), bc_left, bc_right), bc_left, bc_right)

    def with_values(self, values) -> "CylinderField":
        return replace(self, values=values)

    # -- serialization -----------------------------------------------------

    def to_csv(self, path) -> None:
        t, th = self.t, self.theta
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "theta", "v"])
            for i in range(self.n_t):
                for j in range(self.n_theta):
                    w.writerow([f"{t[i]:.17g}", f"{th[j]:.17g}", f"{self.values[i, j]:.17g}"])

    @classmethod
    def from_csv(cls, path, bc_left=None, bc_right=None) -> "CylinderField":
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        t = np.unique(data[:, 0])
        th = np.unique(data[:, 1])
        v = data[:, 2].reshape(t.size, th.size)
        bc_left = bc_left or BoundaryCondition.dirichlet(float(v[0].mean()))
        bc_right = bc_right or BoundaryCondition.dirichlet(float(v[-1].mean()))
        return cls(float(t[0]), float(t[-1]), v, bc_left, bc_right)


def _apply_bc(v, bc_left, bc_right):
    if bc_left.kind == DIRICHLET:
        v[0] = bc_left.value
    if bc_right.kind == DIRICHLET:
        v[-1] = bc_right.value
    return v


@dataclass(frozen=True)
class RelaxReport:
    steps: int
    final_residual: float
    anisotropy: float
    converged: bool
    initial_residual: float = float("nan")
    max_abs: float = float("nan")
    dt: float = float("nan")

    def to_dict(self):
        return dict(self.__dict__)


def _laplacian(v, h_t, h_th, bc_left, bc_right, out):
    """Five-point Laplacian; rows held by Dirichlet data are set to 0."""
    it2 = 1.0 / (h_t * h_t)
    ith2 = 1.0 / (h_th * h_th)
    out[1:-1] = (v[2:] - 2 * v[1:-1] + v[:-2]) * it2
    out[0] = 2 * (v[1] - v[0]) * it2 if bc_left.kind == NEUMANN_ZERO else 0.0
    out[-1] = 2 * (v[-2] - v[-1]) * it2 if bc_right.kind == NEUMANN_ZERO else 0.0
    out += (np.roll(v, 1, axis=1) - 2 * v + np.roll(v, -1, axis=1)) * ith2
    return out


def _active_rows(n_t, bc_left, bc_right):
    lo = 0 if bc_left.kind == NEUMANN_ZERO else 1
    hi = n_t if bc_right.kind == NEUMANN_ZERO else n_t - 1
    return slice(lo, hi)


def residual(f: CylinderField) -> np.ndarray:
    """v_tt + v_θθ + 2v(1-v²) on the rows that are not held fixed."""
    v = f.values
    lap = _laplacian(v, f.h_t, f.h_theta, f.bc_left, f.bc_right, np.empty_like(v))
    rows = _active_rows(f.n_t, f.bc_left, f.bc_right)
    return (lap + 2 * v * (1 - v * v))[rows]


def relax(field_: CylinderField, tol: float, max_steps: int,
          dt_factor: float = DEFAULT_DT_FACTOR, check_every: int = 10):
    """Explicit-Euler gradient flow until the max residual is <= tol.

    Returns the relaxed field and a RelaxReport.  The boundary conditions are
    imposed before the first step and held fixed.
    """
    if not 0 < dt_factor <= MAX_DT_FACTOR:
        raise ConfigurationError(f"dt factor {dt_factor} outside (0, {MAX_DT_FACTOR}]")
    if not tol > 0:
        raise DomainError("tol must be positive")
    h_t, h_th = field_.h_t, field_.h_theta
    dt = dt_factor * min(h_t * h_t, h_th * h_th)
    bl, br = field_.bc_left, field_.bc_right
    rows = _active_rows(field_.n_t, bl, br)

    v = _apply_bc(np.array(field_.values, dtype=float), bl, br)
    lap = np.empty_like(v)
    max_abs = float(np.abs(v).max())

    def current_residual():
        _laplacian(v, h_t, h_th, bl, br, lap)
        return float(np.abs((lap + 2 * v * (1 - v * v))[rows]).max())

    res = current_residual()
    initial = res
    steps = 0
    while res > tol and steps < max_steps:
        for _ in range(min(check_every, max_steps - steps)):
            _laplacian(v, h_t, h_th, bl, br, lap)
            v[rows] += dt * (lap[rows] + 2 * v[rows] * (1 - v[rows] * v[rows]))
            steps += 1
            max_abs = max(max_abs, float(np.abs(v).max()))
        res = current_residual()
    out = field_.with_values(v)
    report = RelaxReport(steps, res, theta_anisotropy(out), res <= tol, initial, max_abs, dt)
    return out, report


def theta_anisotropy(f: CylinderField) -> float:
    """max_i (max_j v_ij - min_j v_ij)."""
    v = f.values
    return float(np.max(v.max(axis=1) - v.min(axis=1)))


def _theta_integral(a, h_th):
    # trapezoid on a periodic grid
    return h_th * a.sum(axis=-1)


def horizontal_identity(f: CylinderField):
    """H(t_i) = -½∫v_t² + ½∫v_θ² - ∫v² + ½∫v⁴ (θ-integrals) on interior rows.

    Returns (t_interior, H).  For stationary fields H is constant in t.
    """
    v = f.values
    vt = (v[2:] - v[:-2]) / (2 * f.h_t)
    vi = v[1:-1]
    vth = (np.roll(vi, -1, axis=1) - np.roll(vi, 1, axis=1)) / (2 * f.h_theta)
    h = f.h_theta
    H = (-0.5 * _theta_integral(vt ** 2, h) + 0.5 * _theta_integral(vth ** 2, h)
         - _theta_integral(vi ** 2, h) + 0.5 * _theta_integral(vi ** 4, h))
    return f.t[1:-1], H


def phi_profile(f: CylinderField) -> np.ndarray:
    """φ(t_i) = ∫ v² dθ per row."""
    return _theta_integral(f.values ** 2, f.h_theta)


def is_nondecreasing(a, atol: float = 0.0) -> bool:
    return bool(np.all(np.diff(np.asarray(a)) >= -atol))


@dataclass(frozen=True)
class MovingPlaneReport:
    best_lambda: Optional[float]
    reflection_defect: float
    min_vt: float
    symmetric_favored: bool
    monotone_favored: bool
    degenerate: bool
    threshold: float

    def to_dict(self):
        return dict(self.__dict__)


def reflection_defects(f: CylinderField, min_overlap: float = 0.5):
    """L∞ defect of v(2Λ - t, θ) = v(t, θ) for every half-grid centre Λ.

    Only centres whose mirrored window covers at least ``min_overlap`` of
    the rows are scanned.  Returns (lambdas, defects).
    """
    v = f.values
    n = f.n_t
    need = max(2, int(np.ceil(min_overlap * n)))
    lams, defs = [], []
    for k in range(0, 2 * n - 1):
        lo = max(0, k - (n - 1))
        hi = min(n - 1, k)
        if hi - lo + 1 < need:
            continue
        i = np.arange(lo, hi + 1)
        defs.append(float(np.max(np.abs(v[i] - v[k - i]))))
        lams.append(f.t_min + 0.5 * k * f.h_t)
    return np.array(lams), np.array(defs)


def moving_plane_check(f: CylinderField, threshold: float = 1e-6,
                       min_overlap: float = 0.5) -> MovingPlaneReport:
    """Evidence for the two branches of the moving-plane dichotomy.

    Reports the smallest reflection defect over admissible centres Λ (with
    parabolic refinement of Λ between neighbouring half-grid centres) and the
    minimum of the centred difference v_t over interior rows.
    """
    lams, defs = reflection_defects(f, min_overlap)
    v = f.values
    vt = (v[2:] - v[:-2]) / (2 * f.h_t)
    min_vt = float(vt.min())
    if lams.size == 0:
        return MovingPlaneReport(None, float("inf"), min_vt, False, min_vt > 0, False, threshold)
    k = int(np.argmin(defs))
    best = float(lams[k])
    if 0 < k < defs.size - 1:
        d0, dm, dp = defs[k], defs[k - 1], defs[k + 1]
        curv = dm - 2 * d0 + dp
        if curv > 0:
            shift = 0.5 * (dm - dp) / curv
            best += float(np.clip(shift, -0.5, 0.5)) * (lams[1] - lams[0])
    defect = float(defs[k])
    degenerate = bool(np.max(np.abs(vt)) <= threshold)
    return MovingPlaneReport(best, defect, min_vt, defect <= threshold, min_vt > 0,
                             degenerate, threshold)


# -- initial data ----------------------------------------------------------

def soliton_field(a=1.0, sign=1, t_min=-8.0, t_max=8.0, n_t=256, n_theta=64,
                  perturbation=0.0, width=1.0):
    """Soliton -sign tanh(t - ln a) plus perturbation·cos θ·exp(-((t-ln a)/width)²).

    Dirichlet ends take the unperturbed soliton's values.
    """
    p = SolitonParams(a, sign)
    t_c = np.log(a)

    def f(t, th):
        return soliton_cylinder(p, t) + perturbation * np.cos(th) * np.exp(-((t - t_c) / width) ** 2)

    return CylinderField.from_function(
        f, t_min, t_max, n_t, n_theta,
        BoundaryCondition.dirichlet(soliton_cylinder(p, t_min)),
        BoundaryCondition.dirichlet(soliton_cylinder(p, t_max)))


def random_field(amplitude, seed=0, t_min=-1.0, t_max=1.0, n_t=17, n_theta=32,
                 bc_left=None, bc_right=None):
    """Uniform noise in [-amplitude, amplitude] with zero Dirichlet ends by default."""
    rng = np.random.default_rng(seed)
    bc_left = bc_left or BoundaryCondition.dirichlet(0.0)
    bc_right = bc_right or BoundaryCondition.dirichlet(0.0)
    v = amplitude * rng.uniform(-1.0, 1.0, size=(n_t, n_theta))
    return CylinderField(t_min, t_max, _apply_bc(v, bc_left, bc_right), bc_left, bc_right)


def constant_field(value, t_min=-8.0, t_max=8.0, n_t=256, n_theta=64):
    bc = BoundaryCondition.dirichlet(value)
    return CylinderField(t_min, t_max, np.full((n_t, n_theta), float(value)), bc, bc)


def profile_field(t_min, t_max, n_t, n_theta, v_of_t):
    """θ-independent field from a function of t; Dirichlet ends at its end values."""
    return CylinderField.from_function(lambda t, th: v_of_t(t) + 0 * th, t_min, t_max, n_t, n_theta)


def parse_init(spec: str, t_min, t_max, n_t, n_theta, bc_left=None, bc_right=None):
    """Initial field from 'zero | soliton:a | perturbed-soliton:a:amp | random:amp:seed'."""
    parts = spec.split(":")
    kind = parts[0]
    try:
        if kind == "zero":
            f = constant_field(0.0, t_min, t_max, n_t, n_theta)
        elif kind == "soliton":
            f = soliton_field(float(parts[1]), 1, t_min, t_max, n_t, n_theta)
        elif kind == "perturbed-soliton":
            f = soliton_field(float(parts[1]), 1, t_min, t_max, n_t, n_theta, float(parts[2]))
        elif kind == "random":
            f = random_field(float(parts[1]), int(parts[2]) if len(parts) > 2 else 0,
                             t_min, t_max, n_t, n_theta)
        else:
            raise DomainError(f"unknown init spec {spec!r}")
    except (IndexError, ValueError) as exc:
        raise DomainError(f"malformed init spec {spec!r}: {exc}") from None
    if bc_left is not None or bc_right is not None:
        bl = bc_left or f.bc_left
        br = bc_right or f.bc_right
        f = CylinderField(f.t_min, f.t_max, _apply_bc(np.array(f.values), bl, br), bl, br)
    return f
