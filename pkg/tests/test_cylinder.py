import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ymac.closedform import SolitonParams, soliton_cylinder
from ymac.cylinder import (BoundaryCondition, CylinderField, constant_field, horizontal_identity,
                           is_nondecreasing, moving_plane_check, parse_init, phi_profile,
                           profile_field, random_field, relax, residual, soliton_field,
                           theta_anisotropy)
from ymac.errors import ConfigurationError, DomainError
from ymac.orbit import PhasePoint, integrate
from ymac.period import period_agm


def test_boundary_parse():
    assert BoundaryCondition.parse("neumann").kind == "neumann_zero"
    assert BoundaryCondition.parse("dirichlet:-1").value == -1.0
    assert BoundaryCondition.parse("0.5").value == 0.5
    with pytest.raises(DomainError):
        BoundaryCondition("robin", 1.0)
    with pytest.raises(DomainError):
        BoundaryCondition.dirichlet(np.nan)


def test_field_validation():
    bc = BoundaryCondition.dirichlet(0.0)
    with pytest.raises(DomainError):
        CylinderField(0.0, 1.0, np.zeros((2, 8)), bc, bc)
    with pytest.raises(DomainError):
        CylinderField(1.0, 0.0, np.zeros((4, 8)), bc, bc)


def test_grid_geometry():
    f = constant_field(0.0, -1.0, 1.0, 5, 8)
    assert f.h_t == 0.5 and f.h_theta == pytest.approx(2 * math.pi / 8)
    assert f.theta[-1] < 2 * math.pi


@pytest.mark.parametrize("value", [-1.0, 0.0, 1.0])
def test_constants_are_stationary(value):
    f = constant_field(value, -2.0, 2.0, 9, 8)
    assert np.max(np.abs(residual(f))) == 0.0
    g, rep = relax(f, 1e-12, 10)
    assert rep.converged and rep.steps == 0


def test_residual_of_sampled_soliton_is_second_order():
    res = []
    for n in (81, 161, 321):
        f = soliton_field(1.0, 1, -8.0, 8.0, n, 8)
        res.append(np.max(np.abs(residual(f))))
    assert np.log2(res[0] / res[1]) == pytest.approx(2.0, abs=0.1)
    assert np.log2(res[1] / res[2]) == pytest.approx(2.0, abs=0.1)


def test_dt_factor_limit():
    with pytest.raises(ConfigurationError):
        relax(constant_field(0.0, -1, 1, 5, 8), 1e-8, 10, dt_factor=0.3)


@settings(max_examples=15)
@given(st.integers(0, 10_000), st.floats(0.1, 0.9))
def test_maximum_principle(seed, amp):
    f = random_field(amp, seed, -2.0, 2.0, 9, 8,
                     BoundaryCondition.dirichlet(-1.0), BoundaryCondition.dirichlet(1.0))
    g, rep = relax(f, 1e-6, 3000)
    assert rep.max_abs <= 1.0 + 1e-12


def test_dirichlet_rows_are_held():
    f = random_field(0.5, 3, -1.0, 1.0, 9, 8,
                     BoundaryCondition.dirichlet(0.25), BoundaryCondition.dirichlet(-0.5))
    assert np.all(f.values[0] == 0.25) and np.all(f.values[-1] == -0.5)
    g, _ = relax(f, 1e-8, 20000)
    assert np.all(g.values[0] == 0.25) and np.all(g.values[-1] == -0.5)


def test_neumann_end_relaxes_to_plateau():
    f = parse_init("soliton:1", -6.0, 6.0, 97, 8, bc_right=BoundaryCondition.neumann_zero())
    g, rep = relax(f, 1e-9, 200_000)
    assert rep.converged
    # the exact soliton is not stationary under a zero-flux end, but stays in [-1, 1]
    assert np.max(np.abs(g.values)) <= 1.0


def test_rigidity_small_grid():
    f = soliton_field(1.0, 1, -6.0, 6.0, 97, 16, perturbation=0.1)
    assert theta_anisotropy(f) > 0.1
    g, rep = relax(f, 1e-8, 200_000)
    assert rep.converged and rep.anisotropy <= 1e-6


def test_relaxed_soliton_stays_near_exact_profile():
    # the discrete stationary state differs from the continuum soliton by O(h²)
    f = soliton_field(1.0, 1, -8.0, 8.0, 129, 8)
    g, rep = relax(f, 1e-8, 200_000)
    exact = soliton_cylinder(SolitonParams(1.0, 1), g.t)
    dev = np.max(np.abs(g.values.mean(axis=1) - exact))
    assert dev <= 10 * g.h_t ** 2


def test_horizontal_identity_values():
    t, H = horizontal_identity(constant_field(0.0, -2.0, 2.0, 33, 8))
    np.testing.assert_allclose(H, 0.0, atol=1e-14)
    t, H = horizontal_identity(constant_field(1.0, -2.0, 2.0, 33, 8))
    np.testing.assert_allclose(H, -math.pi, atol=1e-13)
    f = soliton_field(1.0, 1, -8.0, 8.0, 513, 8)
    t, H = horizontal_identity(f)
    assert np.max(np.abs(H + math.pi)) <= 50 * f.h_t ** 2


def test_horizontal_identity_on_periodic_profile():
    # for θ-independent solutions H = -π(c + 1)
    M = 0.5
    T = period_agm(M).T
    orbit = integrate(PhasePoint(M, 0.0), (0.0, 2 * T), 1e-13)
    f = profile_field(0.0, 2 * T, 1025, 8, lambda t: orbit(t)[..., 0])
    t, H = horizontal_identity(f)
    c = -(1 - M * M) ** 2
    assert np.max(np.abs(H + math.pi * (c + 1))) <= 50 * f.h_t ** 2


def test_moving_plane_on_periodic_and_soliton():
    M = 0.5
    T = period_agm(M).T
    orbit = integrate(PhasePoint(M, 0.0), (0.0, T), 1e-13)
    f = profile_field(0.0, T, 129, 8, lambda t: orbit(t)[..., 0])
    rep = moving_plane_check(f)
    assert rep.symmetric_favored
    assert rep.best_lambda == pytest.approx(T / 2, abs=f.h_t)
    s = moving_plane_check(soliton_field(1.0, -1, -8.0, 8.0, 128, 8))
    assert s.monotone_favored and not s.symmetric_favored
    assert is_nondecreasing(soliton_field(1.0, -1, -8.0, 8.0, 128, 8).values[:, 0])


def test_phi_of_unit_field():
    np.testing.assert_allclose(phi_profile(constant_field(1.0, -1.0, 1.0, 5, 16)), 2 * math.pi)


def test_phi_nondecreasing_from_zero_left_end():
    f = random_field(0.3, 2, 0.0, 6.0, 49, 8,
                     BoundaryCondition.dirichlet(0.0), BoundaryCondition.dirichlet(1.0))
    g, rep = relax(f, 1e-10, 400_000)
    assert rep.converged
    assert is_nondecreasing(phi_profile(g), atol=1e-12)


def test_constant_field_is_degenerate_for_moving_plane():
    rep = moving_plane_check(constant_field(1.0, -2.0, 2.0, 33, 8))
    assert rep.degenerate


def test_zero_trap_on_short_window():
    g, rep = relax(random_field(0.3, 7, -1.0, 1.0, 17, 16), 1e-10, 200_000)
    assert rep.converged and np.max(np.abs(g.values)) <= 1e-8


def test_zero_is_unstable_on_long_window():
    # on windows longer than π/√2 the zero state is linearly unstable
    g, rep = relax(random_field(0.3, 0, -8.0, 8.0, 65, 8), 1e-8, 400_000)
    assert np.max(np.abs(g.values)) > 0.5


def test_parse_init_variants():
    for spec in ("zero", "soliton:2", "perturbed-soliton:1:0.2", "random:0.1:4"):
        f = parse_init(spec, -2.0, 2.0, 9, 8)
        assert f.values.shape == (9, 8)
    for bad in ("bogus", "soliton", "random:x"):
        with pytest.raises(DomainError):
            parse_init(bad, -2.0, 2.0, 9, 8)


def test_random_field_is_seeded():
    a = random_field(0.3, 11).values
    b = random_field(0.3, 11).values
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, random_field(0.3, 12).values)


def test_csv_roundtrip(tmp_path):
    f = random_field(0.3, 5, -1.0, 1.0, 9, 8)
    path = tmp_path / "f.csv"
    f.to_csv(path)
    g = CylinderField.from_csv(path)
    np.testing.assert_array_equal(g.values, f.values)
    assert (g.t_min, g.t_max) == (f.t_min, f.t_max)
