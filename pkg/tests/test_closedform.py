import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from ymac.closedform import (SolitonParams, cylinder_energy, energy, energy_density, pde_residual,
                             sample_soliton, soliton_cylinder, soliton_cylinder_dt,
                             soliton_value)
from ymac.errors import DomainError
from ymac.geometry import RadialProfile

scales = st.floats(min_value=1e-3, max_value=1e3)
signs = st.sampled_from([-1, 1])
ENERGY = 16 * math.pi / 3


def test_params_validation():
    for a, s in ((0.0, 1), (-1.0, 1), (np.inf, 1), (1.0, 0), (1.0, 2)):
        with pytest.raises(DomainError):
            SolitonParams(a, s)


@given(scales, signs)
def test_soliton_values_at_landmarks(a, s):
    p = SolitonParams(a, s)
    assert soliton_value(p, a) == pytest.approx(0.0, abs=1e-15)
    assert soliton_value(p, 1e-300) == s
    assert soliton_value(p, 1e200) == -s


@given(scales, signs, st.floats(min_value=-30, max_value=30))
def test_plane_and_cylinder_forms_agree(a, s, t):
    p = SolitonParams(a, s)
    assert soliton_value(p, math.exp(t)) == pytest.approx(float(soliton_cylinder(p, t)), abs=1e-14)


@given(scales, signs, st.floats(min_value=-15, max_value=15))
def test_derivative_matches_central_difference(a, s, t):
    p = SolitonParams(a, s)
    h = 1e-5
    fd = (soliton_cylinder(p, t + h) - soliton_cylinder(p, t - h)) / (2 * h)
    assert float(soliton_cylinder_dt(p, t)) == pytest.approx(float(fd), abs=1e-9)


@given(scales, signs, st.floats(min_value=-15, max_value=15))
def test_soliton_lies_on_zero_level_of_first_integral(a, s, t):
    p = SolitonParams(a, s)
    v, vt = float(soliton_cylinder(p, t)), float(soliton_cylinder_dt(p, t))
    assert vt * vt - (v * v - 1) ** 2 == pytest.approx(0.0, abs=1e-14)


def test_residual_is_second_order():
    p = SolitonParams(1.0, 1)
    res = []
    for h in (0.1, 0.05, 0.025):
        res.append(np.abs(pde_residual(sample_soliton(p, -10, 10, int(round(20 / h)) + 1))).max())
    orders = np.log2(np.array(res[:-1]) / np.array(res[1:]))
    np.testing.assert_allclose(orders, 2.0, atol=0.05)


def test_residual_of_non_solution_is_large():
    t = np.linspace(-5, 5, 201)
    prof = RadialProfile.from_cylinder(t, 0.5 * np.tanh(t))
    assert np.abs(pde_residual(prof)).max() > 0.1


def test_residual_rejects_nonuniform_grid():
    prof = RadialProfile.from_cylinder(np.array([0.0, 0.1, 0.3, 0.6]), np.zeros(4))
    with pytest.raises(DomainError):
        pde_residual(prof)


def test_energy_density_oracle_by_adaptive_quadrature():
    # independent oracle: scipy quad on the exact density
    p = SolitonParams(1.0, 1)
    f = lambda t: float(energy_density(soliton_cylinder(p, t), soliton_cylinder_dt(p, t)))
    val, _ = quad(f, -np.inf, np.inf, epsabs=1e-13)
    assert 2 * math.pi * val == pytest.approx(ENERGY, abs=1e-10)


def test_sampled_energy_close_to_closed_value():
    e = energy(sample_soliton(SolitonParams(1.0, 1), -20, 20, 160001), window=(-20, 20))
    assert e.finite
    assert abs(e.value - ENERGY) <= 1e-6


def test_energy_is_scale_invariant():
    vals = [energy(sample_soliton(SolitonParams(a, 1), -20, 20, 40001)).value
            for a in (0.5, 1.0, 2.0)]
    assert max(vals) - min(vals) <= 1e-8


def test_energy_of_callable_with_exact_derivative():
    p = SolitonParams(1.0, -1)
    e = energy(lambda t: soliton_cylinder(p, t), window=(-20, 20),
               derivative=lambda t: soliton_cylinder_dt(p, t), n=40001)
    assert e.value == pytest.approx(ENERGY, abs=1e-6)
    with pytest.raises(DomainError):
        energy(lambda t: t)


def test_constant_zero_has_infinite_energy_but_finite_window():
    t = np.linspace(-10, 10, 201)
    whole = cylinder_energy(t, np.zeros_like(t))
    assert not whole.finite and whole.value == math.inf
    assert whole.windowed_value == pytest.approx(2 * math.pi * 20)
    win = cylinder_energy(t, np.zeros_like(t), window=(-1, 1))
    assert win.finite and win.value == pytest.approx(4 * math.pi)


def test_equilibria_have_zero_energy():
    t = np.linspace(-5, 5, 101)
    assert cylinder_energy(t, np.ones_like(t)).value == pytest.approx(0.0, abs=1e-25)


def test_window_outside_grid_is_rejected():
    t = np.linspace(0, 1, 11)
    with pytest.raises(DomainError):
        cylinder_energy(t, t, window=(-1, 1))
