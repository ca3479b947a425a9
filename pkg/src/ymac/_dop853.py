"""Adaptive Dormand-Prince 8(5,3) stepper for  v'' = -2 v (1 - v^2).

Scalar arithmetic is generic over the number type, so the same loop runs in
double precision (Python ``float``) or x87 extended precision
(``numpy.longdouble``).  Extended precision matters for orbits that pass close
to the saddles v = +-1, where rounding noise of order 1e-16 is amplified by
e^{2t}.
"""
from functools import lru_cache

import numpy as np

from . import _dop853_tableau as tab
from .errors import IntegrationError

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0
ERROR_EXPONENT = -1.0 / 8.0
MAX_STEPS = 1_000_000


class _Coefficients:
    def __init__(self, num):
        self.num = num
        self.c = [num(s) for s in tab.C]
        rows = {}
        for (i, j), s in tab.A.items():
            rows.setdefault(i, []).append((j, num(s)))
        self.rows = [sorted(rows.get(i, [])) for i in range(tab.N_STAGES_EXTENDED)]
        self.b = self.rows[tab.N_STAGES]
        b = dict(self.b)
        e3 = dict(b)
        for j, s in tab.BHH.items():
            e3[j] = e3.get(j, num(0)) - num(s)
        self.e3 = sorted(e3.items())
        self.e5 = sorted((j, num(s)) for j, s in tab.E5.items())
        d = {}
        for (i, j), s in tab.D.items():
            d.setdefault(i, []).append((j, num(s)))
        self.d = [sorted(d[i]) for i in range(tab.INTERPOLATOR_POWER - 3)]


@lru_cache(maxsize=None)
def coefficients(num):
    return _Coefficients(num)


def _rhs(v, w):
    return w, 2 * v * (v * v - 1)


def _combine(row, kv, kw):
    sv = 0
    sw = 0
    for j, a in row:
        sv += a * kv[j]
        sw += a * kw[j]
    return sv, sw


class StepLog:
    """Accepted steps of one integration direction."""

    def __init__(self):
        self.t = []
        self.v = []
        self.w = []
        self.c = []
        self.t_old = []
        self.h = []
        self.y_old = []
        self.poly = []


def _first_integral(v, w):
    u = v * v - 1
    return w * w - u * u


def _initial_step(v, w, fv, fw, direction, rtol, atol, num):
    sv = atol + abs(v) * rtol
    sw = atol + abs(w) * rtol
    d0 = np.sqrt(float((v / sv) ** 2 + (w / sw) ** 2) / 2)
    d1 = np.sqrt(float((fv / sv) ** 2 + (fw / sw) ** 2) / 2)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    v1 = v + direction * num(h0) * fv
    w1 = w + direction * num(h0) * fw
    gv, gw = _rhs(v1, w1)
    d2 = np.sqrt(float(((gv - fv) / sv) ** 2 + ((gw - fw) / sw) ** 2) / 2) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1.0 / 8.0)
    return min(100 * h0, h1)


def integrate_direction(v0, w0, t0, t_end, rtol, atol, num=float, bound=3.0,
                        max_step=np.inf):
    """Integrate from ``t0`` to ``t_end`` (either direction).

    Stops early after the first accepted step on which |v| > ``bound``.
    Returns a :class:`StepLog`; raises :class:`IntegrationError` with the
    partial log on step-size underflow.
    """
    co = coefficients(num)
    direction = 1.0 if t_end >= t0 else -1.0
    t = float(t0)
    v = num(v0)
    w = num(w0)
    log = StepLog()
    log.t.append(t)
    log.v.append(v)
    log.w.append(w)
    log.c.append(_first_integral(v, w))
    if t_end == t0:
        return log

    rtol_n = num(rtol)
    atol_n = num(atol)
    fv, fw = _rhs(v, w)
    h_abs = min(_initial_step(v, w, fv, fw, direction, rtol_n, atol_n, num),
                abs(t_end - t0), max_step)
    rejected = False
    kv = [num(0)] * tab.N_STAGES_EXTENDED
    kw = [num(0)] * tab.N_STAGES_EXTENDED
    nsteps = 0

    while direction * (t_end - t) > 0:
        nsteps += 1
        if nsteps > MAX_STEPS:
            raise IntegrationError(f"step budget exhausted at t={t}", log)
        min_step = 10 * abs(np.nextafter(t, direction * np.inf) - t)
        if h_abs < min_step:
            raise IntegrationError(f"step size underflow at t={t}", log)
        h = min(h_abs, max_step) * direction
        t_new = t + h
        if direction * (t_new - t_end) > 0:
            t_new = t_end
        h = t_new - t
        h_abs = abs(h)
        hn = num(h)

        kv[0], kw[0] = fv, fw
        for s in range(1, tab.N_STAGES):
            dv, dw = _combine(co.rows[s], kv, kw)
            kv[s], kw[s] = _rhs(v + hn * dv, w + hn * dw)
        dv, dw = _combine(co.b, kv, kw)
        v_new = v + hn * dv
        w_new = w + hn * dw
        kv[12], kw[12] = _rhs(v_new, w_new)

        scale_v = atol_n + max(abs(v), abs(v_new)) * rtol_n
        scale_w = atol_n + max(abs(w), abs(w_new)) * rtol_n
        e5v, e5w = _combine(co.e5, kv, kw)
        e3v, e3w = _combine(co.e3, kv, kw)
        e5 = float((e5v / scale_v) ** 2 + (e5w / scale_w) ** 2)
        e3 = float((e3v / scale_v) ** 2 + (e3w / scale_w) ** 2)
        if e5 == 0.0 and e3 == 0.0:
            err = 0.0
        else:
            err = h_abs * e5 / np.sqrt((e5 + 0.01 * e3) * 2)

        if not np.isfinite(err):
            h_abs *= MIN_FACTOR
            rejected = True
            continue
        if err >= 1:
            h_abs *= max(MIN_FACTOR, SAFETY * err ** ERROR_EXPONENT)
            rejected = True
            continue

        factor = MAX_FACTOR if err == 0 else min(MAX_FACTOR, SAFETY * err ** ERROR_EXPONENT)
        if rejected:
            factor = min(1.0, factor)
        rejected = False

        log.t_old.append(t)
        log.h.append(h)
        log.y_old.append((float(v), float(w)))
        log.poly.append(_dense_coefficients(co, v, w, v_new, w_new, hn, kv, kw))

        t, v, w = t_new, v_new, w_new
        fv, fw = kv[12], kw[12]
        log.t.append(t)
        log.v.append(v)
        log.w.append(w)
        log.c.append(_first_integral(v, w))
        h_abs *= factor
        if abs(v) > bound:
            break
    return log


def _dense_coefficients(co, v, w, v_new, w_new, hn, kv, kw):
    for s in range(tab.N_STAGES + 1, tab.N_STAGES_EXTENDED):
        dv, dw = _combine(co.rows[s], kv, kw)
        kv[s], kw[s] = _rhs(v + hn * dv, w + hn * dw)
    dv = v_new - v
    dw = w_new - w
    F = [
        (dv, dw),
        (hn * kv[0] - dv, hn * kw[0] - dw),
        (2 * dv - hn * (kv[12] + kv[0]), 2 * dw - hn * (kw[12] + kw[0])),
    ]
    for row in co.d:
        sv, sw = _combine(row, kv, kw)
        F.append((hn * sv, hn * sw))
    return np.array(F, dtype=float)


def eval_dense(poly, y_old, x):
    """Evaluate dense output polynomials.

    ``poly`` has shape (..., 7, 2), ``y_old`` (..., 2), ``x`` (...) is the
    fractional position inside each step.
    """
    x = np.asarray(x, dtype=float)[..., None]
    y = np.zeros(np.broadcast_shapes(x.shape[:-1] + (2,), np.shape(y_old)))
    for i in range(tab.INTERPOLATOR_POWER - 1, -1, -1):
        y = y + poly[..., i, :]
        if (tab.INTERPOLATOR_POWER - 1 - i) % 2 == 0:
            y = y * x
        else:
            y = y * (1 - x)
    return y + y_old
