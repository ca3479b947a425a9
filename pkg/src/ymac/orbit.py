"""Trajectories of the reduced ODE  -v_tt = 2v(1-v²)  and their diagnostics.

The first integral c = v_t² - (v²-1)² is recomputed from the state at every
accepted step, so its drift measures integrator error only.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _dop853
from .errors import DomainError, InsufficientSpanError, IntegrationError, PreconditionError

ESCAPE_BOUND = 3.0
EVENT_TIME_TOL = 1e-12
# below this tolerance double precision cannot deliver what is asked
EXTENDED_PRECISION_TOL = 1e-13

VT_ZERO = "vt_zero"
V_ZERO = "v_zero"
BOUND_EXCEEDED = "bound_exceeded"


@dataclass(frozen=True)
class PhasePoint:
    v: float
    v_t: float

    def __post_init__(self):
        if not (np.isfinite(self.v) and np.isfinite(self.v_t)):
            raise DomainError(f"phase point must be finite, got ({self.v}, {self.v_t})")


@dataclass(frozen=True)
class Event:
    time: float
    kind: str
    # +1 when the monitored quantity crosses upward, -1 downward
    direction: int = 0

    def to_dict(self):
        return {"time": self.time, "kind": self.kind, "direction": self.direction}


def first_integral(p: PhasePoint) -> float:
    """c = v_t² - (v² - 1)²."""
    u = p.v * p.v - 1.0
    return p.v_t * p.v_t - u * u


def amplitude_from_c(c: float) -> float:
    """Maximum M = sqrt(1 - sqrt(-c)) of the periodic orbit with first integral c."""
    if not (-1.0 < c < 0.0):
        raise DomainError(f"amplitude_from_c needs -1 < c < 0, got {c}")
    return float(np.sqrt(1.0 - np.sqrt(-c)))


def c_from_amplitude(M: float) -> float:
    return -(1.0 - M * M) ** 2


class _Dense:
    """Piecewise 7th-order dense output over a union of accepted steps."""

    def __init__(self, lo, hi, y_old, t_old, h, poly):
        self.lo = lo
        self.hi = hi
        self.y_old = y_old
        self.t_old = t_old
        self.h = h
        self.poly = poly

    @classmethod
    def from_logs(cls, *logs):
        t_old = np.concatenate([np.asarray(g.t_old, dtype=float) for g in logs])
        h = np.concatenate([np.asarray(g.h, dtype=float) for g in logs])
        y_old = np.concatenate([np.asarray(g.y_old, dtype=float).reshape(-1, 2) for g in logs])
        poly = np.concatenate([np.asarray(g.poly, dtype=float).reshape(-1, 7, 2) for g in logs])
        lo = np.minimum(t_old, t_old + h)
        hi = np.maximum(t_old, t_old + h)
        order = np.argsort(lo, kind="stable")
        return cls(lo[order], hi[order], y_old[order], t_old[order], h[order], poly[order])

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.lo.size == 0:
            raise DomainError("orbit has no steps to interpolate")
        idx = np.clip(np.searchsorted(self.lo, t, side="right") - 1, 0, self.lo.size - 1)
        x = (t - self.t_old[idx]) / self.h[idx]
        return _dop853.eval_dense(self.poly[idx], self.y_old[idx], x)

    def step_eval(self, k, t):
        x = (t - self.t_old[k]) / self.h[k]
        return _dop853.eval_dense(self.poly[k], self.y_old[k], x)


@dataclass(frozen=True, eq=False)
class Orbit:
    t_samples: np.ndarray
    v: np.ndarray
    vt: np.ndarray
    c_series: np.ndarray
    events: tuple
    tol: float
    drift_tolerance: float
    t0: float = 0.0
    dense: Optional[_Dense] = field(default=None, repr=False)

    @property
    def states(self) -> list:
        return [PhasePoint(float(a), float(b)) for a, b in zip(self.v, self.vt)]

    @property
    def c0(self) -> float:
        return float(self.c_series[np.searchsorted(self.t_samples, self.t0)])

    @property
    def drift(self) -> float:
        return float(np.max(np.abs(self.c_series - self.c0)))

    @property
    def escaped(self) -> bool:
        return any(e.kind == BOUND_EXCEEDED for e in self.events)

    @property
    def span(self) -> tuple[float, float]:
        return float(self.t_samples[0]), float(self.t_samples[-1])

    def __call__(self, t):
        """(v, v_t) at times ``t`` from the dense output; shape (..., 2)."""
        if self.dense is None or self.dense.lo.size == 0:
            t = np.asarray(t, dtype=float)
            return np.broadcast_to(np.array([self.v[0], self.vt[0]]), t.shape + (2,)).copy()
        return self.dense(t)

    def events_of(self, kind: str) -> list:
        return [e for e in self.events if e.kind == kind]


def _bisect(f, a, b, fa, tol=EVENT_TIME_TOL):
    """Root of f in [a, b] (either order), given f(a) and a sign change."""
    while abs(b - a) > tol:
        m = 0.5 * (a + b)
        if m == a or m == b:
            break
        fm = f(m)
        if fm == 0:
            return m
        if np.sign(fm) == np.sign(fa):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def _locate_events(log, dense: _Dense, step_ids):
    """Sign changes of v_t and v between consecutive accepted samples."""
    events = []
    t = np.asarray(log.t, dtype=float)
    y = np.column_stack([np.asarray(log.v, dtype=float), np.asarray(log.w, dtype=float)])
    for k in range(len(t) - 1):
        ta, tb = t[k], t[k + 1]
        step = int(step_ids[k])
        for comp, kind in ((1, VT_ZERO), (0, V_ZERO)):
            ga, gb = y[k, comp], y[k + 1, comp]
            if ga == 0.0 or not (gb == 0.0 or np.sign(ga) != np.sign(gb)):
                continue
            if gb == 0.0:
                root = tb
            else:
                root = _bisect(lambda s: dense.step_eval(step, s)[comp], ta, tb, ga)
            # crossing direction in increasing time
            direction = int(np.sign(gb - ga)) if tb > ta else int(np.sign(ga - gb))
            events.append(Event(float(root), kind, direction))
    return events


def _bound_event(log, dense: _Dense, last_step: int, bound: float):
    ta, tb = log.t[-2], log.t[-1]
    va = float(log.v[-2])
    sgn = np.sign(float(log.v[-1]))
    g = lambda s: sgn * dense.step_eval(last_step, s)[0] - bound
    root = _bisect(g, ta, tb, sgn * va - bound)
    return Event(float(root), BOUND_EXCEEDED, int(sgn))


def _run(start, t0, t_end, tol, num, bound, max_step):
    try:
        return _dop853.integrate_direction(start.v, start.v_t, t0, t_end, tol, tol,
                                           num=num, bound=bound, max_step=max_step)
    except IntegrationError as exc:
        raise IntegrationError(str(exc), _partial_orbit(exc.partial, t0, tol)) from None


def _partial_orbit(log, t0, tol):
    t = np.asarray(log.t, dtype=float)
    order = np.argsort(t)
    dense = _Dense.from_logs(log) if log.h else None
    return Orbit(t[order], np.asarray(log.v, dtype=float)[order],
                 np.asarray(log.w, dtype=float)[order],
                 np.asarray(log.c, dtype=float)[order], (), tol, 100 * tol, t0, dense)


def integrate(start: PhasePoint, t_span, tol: float = 1e-10, t0: Optional[float] = None,
              drift_tolerance: Optional[float] = None, precision: Optional[str] = None,
              bound: float = ESCAPE_BOUND, max_step: float = np.inf) -> Orbit:
    """Integrate -v_tt = 2v(1-v²) from ``start`` given at time ``t0``.

    ``t0`` defaults to ``t_span[0]``; when it lies strictly inside the span the
    orbit is integrated in both directions.  Integration in a direction stops
    at the first accepted step with |v| > ``bound`` and a ``bound_exceeded``
    event is recorded at the crossing time.  ``precision`` is "double" or
    "extended"; by default extended precision is used when tol < 1e-13.
    """
    a, b = float(t_span[0]), float(t_span[1])
    if not (np.isfinite(a) and np.isfinite(b)) or a == b:
        raise DomainError(f"degenerate time span {t_span}")
    if a > b:
        a, b = b, a
    if not tol > 0:
        raise DomainError("tol must be positive")
    t0 = a if t0 is None else float(t0)
    if not a <= t0 <= b:
        raise DomainError(f"t0={t0} outside span [{a}, {b}]")
    if precision is None:
        precision = "extended" if tol < EXTENDED_PRECISION_TOL else "double"
    num = {"double": float, "extended": np.longdouble}[precision]
    if drift_tolerance is None:
        drift_tolerance = 100 * tol

    logs = []
    if t0 > a:
        logs.append(_run(start, t0, a, tol, num, bound, max_step))
    if t0 < b or not logs:
        logs.append(_run(start, t0, b, tol, num, bound, max_step))

    dense = _Dense.from_logs(*logs)
    events = []
    t_parts, v_parts, w_parts, c_parts = [], [], [], []
    for log in logs:
        nsteps = len(log.h)
        t_old = np.asarray(log.t_old, dtype=float)
        # slot of this log's k-th step in the sorted dense table
        step_ids = np.searchsorted(dense.lo, np.minimum(t_old, t_old + np.asarray(log.h, dtype=float)))
        evs = _locate_events(log, dense, step_ids)
        if nsteps and abs(float(log.v[-1])) > bound:
            evs.append(_bound_event(log, dense, int(step_ids[-1]), bound))
        events.extend(evs)
        t = np.asarray(log.t, dtype=float)
        order = np.argsort(t)
        t_parts.append(t[order])
        v_parts.append(np.asarray(log.v, dtype=float)[order])
        w_parts.append(np.asarray(log.w, dtype=float)[order])
        c_parts.append(np.asarray(log.c, dtype=float)[order])
    t = np.concatenate(t_parts)
    t, keep = np.unique(t, return_index=True)
    v = np.concatenate(v_parts)[keep]
    w = np.concatenate(w_parts)[keep]
    c = np.concatenate(c_parts)[keep]

    # an escape truncates the orbit at the crossing time
    for e in events:
        if e.kind == BOUND_EXCEEDED:
            y = dense(np.array([e.time]))[0]
            if e.time > t0:
                keep = t < e.time
            else:
                keep = t > e.time
            t = np.append(t[keep], e.time)
            v = np.append(v[keep], y[0])
            w = np.append(w[keep], y[1])
            c = np.append(c[keep], y[1] ** 2 - (y[0] ** 2 - 1) ** 2)
            order = np.argsort(t)
            t, v, w, c = t[order], v[order], w[order], c[order]

    events = sorted(set(events), key=lambda e: (e.time, e.kind))
    return Orbit(t, v, w, c, tuple(events), tol, drift_tolerance, t0, dense)


def is_equilibrium(orbit: Orbit, atol: float = 1e-12) -> bool:
    return bool(np.max(np.abs(orbit.v - orbit.v[0])) <= atol and np.max(np.abs(orbit.vt)) <= atol)


def detect_period(orbit: Orbit) -> Optional[float]:
    """Period from same-direction zeros of v_t, or None for an equilibrium."""
    if is_equilibrium(orbit):
        return None
    zeros = orbit.events_of(VT_ZERO)
    if len(zeros) < 3:
        raise InsufficientSpanError(
            f"need at least 3 zeros of v_t to measure a period, found {len(zeros)}")
    same = [e.time for e in zeros if e.direction == zeros[0].direction]
    return (same[-1] - same[0]) / (len(same) - 1)


@dataclass(frozen=True)
class ReflectionReport:
    even_defect: Optional[float]
    odd_defect: Optional[float]
    t1: Optional[float]
    threshold: float
    symmetric: bool
    started_at_extremum: bool

    def to_dict(self):
        return dict(self.__dict__)


def reflection_checks(orbit: Orbit, strict: bool = True, threshold: Optional[float] = None) -> ReflectionReport:
    """Defects of v(-t) = v(t) and v(2 t1 - t) = v(t) along an orbit.

    Times are measured from the start time t0.  t1 is the first zero of v_t
    after t0.  With ``strict`` a start that is not an extremum raises
    PreconditionError; otherwise the report just flags the asymmetry.
    """
    if threshold is None:
        threshold = 10 * orbit.tol
    i0 = int(np.searchsorted(orbit.t_samples, orbit.t0))
    at_extremum = bool(abs(orbit.vt[i0]) <= orbit.tol)
    if strict and not at_extremum:
        raise PreconditionError(f"orbit does not start at an extremum (v_t = {orbit.vt[i0]})")
    if is_equilibrium(orbit):
        return ReflectionReport(0.0, 0.0, None, threshold, True, at_extremum)

    t0 = orbit.t0
    lo, hi = orbit.span
    tau = orbit.t_samples - t0
    even = None
    reach = min(t0 - lo, hi - t0)
    if reach > 0:
        s = tau[(tau >= 0) & (tau <= reach)]
        even = float(np.max(np.abs(orbit(t0 - s)[:, 0] - orbit(t0 + s)[:, 0])))

    odd = None
    t1 = None
    after = [e.time for e in orbit.events_of(VT_ZERO) if e.time > t0 + EVENT_TIME_TOL]
    if after:
        t1 = after[0]
        ts = orbit.t_samples
        mirror = 2 * t1 - ts
        ok = (mirror >= lo) & (mirror <= hi)
        if np.any(ok):
            odd = float(np.max(np.abs(orbit(mirror[ok])[:, 0] - orbit(ts[ok])[:, 0])))
    defects = [d for d in (even, odd) if d is not None]
    symmetric = bool(defects) and max(defects) <= threshold
    return ReflectionReport(even, odd, None if t1 is None else t1 - t0, threshold, symmetric, at_extremum)
