import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import solve_ivp
from scipy.special import ellipj, ellipk

from ymac.closedform import SolitonParams, soliton_cylinder
from ymac.errors import DomainError, InsufficientSpanError, IntegrationError, PreconditionError
from ymac.orbit import (BOUND_EXCEEDED, V_ZERO, VT_ZERO, PhasePoint, amplitude_from_c,
                        c_from_amplitude, detect_period, first_integral, integrate,
                        is_equilibrium, reflection_checks)
from ymac.period import period_agm


def cn_orbit(M, t):
    """Oracle: the orbit through (M, 0) is M sn(ωt + K, m), ω² = 2 - M², m = M²/(2 - M²)."""
    w = math.sqrt(2 - M * M)
    m = M * M / (2 - M * M)
    sn, cn, dn, _ = ellipj(w * np.asarray(t) + ellipk(m), m)
    return M * sn, M * w * cn * dn


def test_first_integral_values():
    assert first_integral(PhasePoint(0.0, 0.0)) == -1.0
    assert first_integral(PhasePoint(1.0, 0.0)) == 0.0
    assert first_integral(PhasePoint(0.5, 0.0)) == pytest.approx(-0.5625)


@given(st.floats(min_value=0.001, max_value=0.999))
def test_amplitude_roundtrip(M):
    assert amplitude_from_c(c_from_amplitude(M)) == pytest.approx(M, rel=1e-10)


@pytest.mark.parametrize("c", [-1.0, 0.0, 0.5, -2.0])
def test_amplitude_domain(c):
    with pytest.raises(DomainError):
        amplitude_from_c(c)


@pytest.mark.parametrize("M", [0.1, 0.5, 0.9])
def test_periodic_orbit_matches_elliptic_oracle(M):
    orbit = integrate(PhasePoint(M, 0.0), (0.0, 20.0), 1e-12)
    t = np.linspace(0, 20, 801)
    v, vt = cn_orbit(M, t)
    y = orbit(t)
    assert np.max(np.abs(y[:, 0] - v)) <= 1e-9
    assert np.max(np.abs(y[:, 1] - vt)) <= 1e-9


def test_agrees_with_scipy_dop853():
    p = PhasePoint(-0.3, 0.4)
    orbit = integrate(p, (0.0, 15.0), 1e-11)
    ref = solve_ivp(lambda t, y: [y[1], 2 * y[0] * (y[0] ** 2 - 1)], (0, 15), [p.v, p.v_t],
                    method="DOP853", rtol=1e-12, atol=1e-12, dense_output=True)
    t = np.linspace(0, 15, 301)
    assert np.max(np.abs(orbit(t) - ref.sol(t).T)) <= 1e-8


@pytest.mark.parametrize("M", [0.1, 0.5, 0.9])
def test_drift_over_long_span(M):
    orbit = integrate(PhasePoint(M, 0.0), (0.0, 100.0), 1e-10)
    assert orbit.drift <= 1e-8
    assert orbit.drift <= orbit.drift_tolerance


@given(st.floats(min_value=-0.95, max_value=0.95), st.floats(min_value=-0.5, max_value=0.5))
def test_bounded_orbits_stay_in_band(v, vt):
    p = PhasePoint(v, vt)
    c = first_integral(p)
    if not -1 < c < -1e-6:
        return
    M = amplitude_from_c(c)
    if abs(v) > M:
        return
    orbit = integrate(p, (0.0, 30.0), 1e-10)
    assert not orbit.escaped
    assert np.max(np.abs(orbit.v)) <= M + 1e-8


@pytest.mark.parametrize("p", [PhasePoint(0.0, 0.0), PhasePoint(1.0, 0.0), PhasePoint(-1.0, 0.0)])
def test_equilibria_are_fixed(p):
    orbit = integrate(p, (0.0, 50.0), 1e-10)
    assert is_equilibrium(orbit)
    assert detect_period(orbit) is None
    assert orbit.drift == 0.0


@pytest.mark.parametrize("p", [PhasePoint(2.0, 0.0), PhasePoint(0.0, 1.5), PhasePoint(1.3, 0.0),
                               PhasePoint(2.0, 3.0)])
def test_escape_is_recorded_and_truncates(p):
    orbit = integrate(p, (0.0, 50.0), 1e-10)
    assert orbit.escaped
    ev = orbit.events_of(BOUND_EXCEEDED)[0]
    assert orbit.t_samples[-1] == ev.time
    assert abs(orbit.v[-1]) == pytest.approx(3.0, abs=1e-8)


def test_heteroclinic_in_extended_precision():
    orbit = integrate(PhasePoint(0.0, -1.0), (-10.0, 10.0), 1e-18, t0=0.0)
    t = np.linspace(-10, 10, 2001)
    assert np.max(np.abs(orbit(t)[:, 0] - soliton_cylinder(SolitonParams(1.0, 1), t))) <= 1e-8


def test_double_precision_heteroclinic_is_limited_by_instability():
    # rounding grows like e^{2|t|} near the saddles: double precision cannot reach 1e-8 at |t|=10
    orbit = integrate(PhasePoint(0.0, -1.0), (-10.0, 10.0), 1e-12, t0=0.0, precision="double")
    t = np.linspace(-10, 10, 2001)
    err = np.max(np.abs(orbit(t)[:, 0] - soliton_cylinder(SolitonParams(1.0, 1), t)))
    assert 1e-10 < err < 1e-5


def test_events_located_precisely():
    M = 0.5
    T = period_agm(M).T
    orbit = integrate(PhasePoint(M, 0.0), (0.0, 2.2 * T), 1e-12)
    vt0 = [e.time for e in orbit.events_of(VT_ZERO)]
    np.testing.assert_allclose(vt0[:4], [0.5 * T, T, 1.5 * T, 2 * T], atol=1e-9)
    v0 = [e.time for e in orbit.events_of(V_ZERO)]
    np.testing.assert_allclose(v0[:2], [0.25 * T, 0.75 * T], atol=1e-9)


def test_detect_period_needs_span():
    orbit = integrate(PhasePoint(0.5, 0.0), (0.0, 3.0), 1e-10)
    with pytest.raises(InsufficientSpanError):
        detect_period(orbit)


def test_two_sided_integration_is_consistent():
    p = PhasePoint(0.3, 0.2)
    both = integrate(p, (-5.0, 5.0), 1e-11, t0=0.0)
    fwd = integrate(p, (0.0, 5.0), 1e-11)
    t = np.linspace(0, 5, 51)
    assert np.max(np.abs(both(t) - fwd(t))) <= 1e-12
    assert both.span == (-5.0, 5.0)


def test_step_limit_raises_with_partial_orbit(monkeypatch):
    from ymac import _dop853
    monkeypatch.setattr(_dop853, "MAX_STEPS", 200)
    with pytest.raises(IntegrationError) as info:
        integrate(PhasePoint(0.5, 0.0), (0.0, 1e4), 1e-10, max_step=1.0)
    assert info.value.partial is not None
    assert info.value.partial.t_samples[-1] > 0


@pytest.mark.parametrize("kw", [dict(t_span=(0, 0)), dict(t_span=(0, 1), tol=0.0),
                                dict(t_span=(0, 1), t0=2.0), dict(t_span=(0, np.inf))])
def test_bad_arguments(kw):
    with pytest.raises(DomainError):
        integrate(PhasePoint(0.1, 0.0), **kw)


def test_nonfinite_phase_point():
    with pytest.raises(DomainError):
        PhasePoint(np.nan, 0.0)


def test_reflection_symmetry_of_periodic_orbit():
    M = 0.5
    T = period_agm(M).T
    orbit = integrate(PhasePoint(M, 0.0), (-T, T), 1e-12, t0=0.0)
    rep = reflection_checks(orbit)
    assert rep.symmetric and rep.started_at_extremum
    assert rep.even_defect <= 1e-10 and rep.odd_defect <= 1e-10
    assert rep.t1 == pytest.approx(T / 2, abs=1e-9)


def test_reflection_requires_extremum_start():
    orbit = integrate(PhasePoint(0.0, -1.0), (-5.0, 5.0), 1e-12, t0=0.0)
    with pytest.raises(PreconditionError):
        reflection_checks(orbit)
    rep = reflection_checks(orbit, strict=False)
    assert not rep.symmetric and not rep.started_at_extremum
    assert rep.even_defect > 1.0
