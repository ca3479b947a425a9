"""Period of the bounded oscillations as a function of their amplitude M.

    T(M) = 2 ∫_{-M}^{M} dθ / sqrt((2 - M² - θ²)(M² - θ²))

Two independent evaluations are provided: Gauss-Legendre quadrature after
the substitution θ = M sin φ, and the closed form 4 K(m) / sqrt(2 - M²) with
m = M² / (2 - M²), where K is computed by the arithmetic-geometric mean.
Elliptic integrals use the *parameter* convention m = k² throughout.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, NumericalFailure

QUAD_TOL = 1e-12
MAX_NODES = 1 << 16
SUBSTITUTION_QUADRATURE = "substitution-quadrature"
ELLIPTIC_AGM = "elliptic-agm"
ODE = "ode"


@dataclass(frozen=True)
class PeriodResult:
    M: float
    T: float
    method: str
    est_error: float


def _check_amplitude(M):
    if not (0.0 < M < 1.0):
        raise DomainError(f"amplitude must satisfy 0 < M < 1, got {M}")


@lru_cache(maxsize=32)
def _gauss_legendre(n):
    return np.polynomial.legendre.leggauss(n)


def _gl(f, a, b, n):
    x, w = _gauss_legendre(n)
    half = 0.5 * (b - a)
    return half * float(np.dot(w, f(half * x + 0.5 * (a + b))))


def period_integral(M: float, tol: float = QUAD_TOL) -> PeriodResult:
    """T(M) by Gauss-Legendre on the sine-substituted integrand.

    After θ = M sin φ both inverse-square-root endpoint singularities cancel:
    T = 2 ∫_{-π/2}^{π/2} dφ / sqrt(2 - M² - M² sin² φ).  The node count is
    doubled until two successive values differ by less than ``tol``.
    """
    _check_amplitude(M)
    M2 = M * M

    def f(phi):
        s = np.sin(phi)
        return 1.0 / np.sqrt(2.0 - M2 - M2 * s * s)

    n = 8
    prev = 2 * _gl(f, -np.pi / 2, np.pi / 2, n)
    while n < MAX_NODES:
        n *= 2
        cur = 2 * _gl(f, -np.pi / 2, np.pi / 2, n)
        err = abs(cur - prev)
        if err < tol:
            return PeriodResult(M, cur, SUBSTITUTION_QUADRATURE, err)
        prev = cur
    raise NumericalFailure(f"period quadrature did not converge for M={M}")


def agm(a: float, b: float) -> float:
    # 1e-16 relative is below double resolution, so also stop at a fixed point
    for _ in range(64):
        if abs(a - b) <= 1e-16 * a:
            break
        a_next, b_next = 0.5 * (a + b), np.sqrt(a * b)
        if a_next == a and b_next == b:
            break
        a, b = a_next, b_next
    return 0.5 * (a + b)


def elliptic_K(m: float) -> float:
    """Complete elliptic integral of the first kind, K(m) = ∫_0^{π/2} dφ/sqrt(1 - m sin²φ).

    ``m`` is the parameter (m = k²), 0 <= m < 1.
    """
    if not (0.0 <= m < 1.0):
        raise DomainError(f"elliptic_K needs 0 <= m < 1, got {m}")
    return float(np.pi / (2.0 * agm(1.0, np.sqrt(1.0 - m))))


def elliptic_parameter(M: float) -> float:
    """m = M² / (2 - M²)."""
    return M * M / (2.0 - M * M)


def period_agm(M: float) -> PeriodResult:
    """T(M) = 4 K(M²/(2-M²)) / sqrt(2 - M²)."""
    _check_amplitude(M)
    T = 4.0 * elliptic_K(elliptic_parameter(M)) / np.sqrt(2.0 - M * M)
    return PeriodResult(M, T, ELLIPTIC_AGM, 4 * np.finfo(float).eps * T)


def period_ode(M: float, tol: float = 1e-12) -> PeriodResult:
    """Period measured on the orbit started at the maximum (M, 0)."""
    from .orbit import PhasePoint, detect_period, integrate

    _check_amplitude(M)
    # alternate v_t zeros sit at T/2 and 3T/2; leave margin past 3T/2
    span = 1.75 * period_agm(M).T
    T = detect_period(integrate(PhasePoint(M, 0.0), (0.0, span), tol))
    return PeriodResult(M, float(T), ODE, 10 * tol * span)


def small_amplitude_period() -> float:
    """Period π√2 of the linearization v_tt = -2v."""
    return float(np.pi * np.sqrt(2.0))
