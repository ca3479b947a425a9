import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad
from scipy.special import ellipk

from ymac.errors import DomainError
from ymac.period import (agm, elliptic_K, elliptic_parameter, period_agm, period_integral,
                         period_ode, small_amplitude_period)

amplitudes = st.floats(min_value=0.01, max_value=0.99)


def singular_period(M):
    """Oracle: T = 2∫_{-M}^{M} dθ/sqrt((2-M²-θ²)(M²-θ²)) with algebraic endpoint weights."""
    f = lambda th: 1.0 / math.sqrt(2 - M * M - th * th)
    val, _ = quad(f, -M, M, weight="alg", wvar=(-0.5, -0.5), epsabs=1e-14, epsrel=1e-14)
    return 2 * val


@pytest.mark.parametrize("M", [0.1, 0.3, 0.5, 0.7, 0.9, 0.99])
def test_quadrature_matches_weighted_quad_oracle(M):
    assert period_integral(M).T == pytest.approx(singular_period(M), rel=1e-12)


@given(st.floats(min_value=0.0, max_value=0.999))
def test_elliptic_K_matches_scipy(m):
    assert elliptic_K(m) == pytest.approx(float(ellipk(m)), rel=1e-14)


def test_elliptic_K_known_value():
    # K(1/2) = Γ(1/4)² / (4 sqrt(π))
    assert elliptic_K(0.5) == pytest.approx(math.gamma(0.25) ** 2 / (4 * math.sqrt(math.pi)), rel=1e-15)


def test_agm_terminates_and_is_symmetric():
    assert agm(1.0, 1.0) == 1.0
    assert agm(1.0, 0.5) == pytest.approx(agm(0.5, 1.0), rel=1e-16)
    assert agm(1.0, 1e-8) > 0


@given(amplitudes)
def test_two_routes_agree(M):
    assert abs(period_integral(M).T - period_agm(M).T) <= 1e-10


def test_ode_route_agrees():
    for M in (0.2, 0.6, 0.95):
        tq = period_integral(M).T
        assert abs(period_ode(M).T - tq) <= 1e-6 * tq


def test_period_increases_with_amplitude():
    T = [period_agm(M).T for M in (0.5, 0.9, 0.999)]
    assert T[0] < T[1] < T[2] < 20


def test_small_amplitude_series():
    # T(M) = π√2 (1 + 3M²/8 + O(M⁴)): the leading correction is quadratic
    for M in (1e-2, 1e-3):
        dev = period_integral(M).T - small_amplitude_period()
        assert dev == pytest.approx(3 * M * M / 8 * math.pi * math.sqrt(2), rel=1e-3)


def test_elliptic_parameter():
    assert elliptic_parameter(1.0) == 1.0
    assert elliptic_parameter(0.5) == pytest.approx(0.25 / 1.75)


@pytest.mark.parametrize("M", [0.0, 1.0, -0.5, 1.5, math.nan])
def test_amplitude_out_of_range(M):
    with pytest.raises(DomainError):
        period_integral(M)
    with pytest.raises(DomainError):
        period_agm(M)


def test_elliptic_K_domain():
    with pytest.raises(DomainError):
        elliptic_K(1.0)
