"""Tests for the radial grid, quadrature, ring kernel, and potential."""

import math
import os

import numpy as np
import pytest

from qcurv import (
    GridMismatch,
    RadialField,
    ball_volume,
    constants,
    field_to_csv,
    kernel_matrix,
    make_grid,
    potential_apply,
    radial_polyharmonic,
    ring_kernel_mean,
    sphere_area,
    spherical_solution,
)


@pytest.fixture(scope="module")
def wide_grid():
    return make_grid(m=2, r_max=60.0, n_intervals=1024)


@pytest.fixture(scope="module")
def wide_kernel(wide_grid):
    return kernel_matrix(wide_grid)


# ----------------------------------------------------------------------
# measure constants
# ----------------------------------------------------------------------
def test_sphere_area_closed_values():
    assert sphere_area(2) == pytest.approx(2.0 * math.pi, rel=1e-15)
    assert sphere_area(3) == pytest.approx(4.0 * math.pi, rel=1e-15)
    assert sphere_area(4) == pytest.approx(2.0 * math.pi**2, rel=1e-15)
    assert sphere_area(6) == pytest.approx(math.pi**3, rel=1e-15)


def test_ball_volume_closed_values():
    assert ball_volume(2, 3.0) == pytest.approx(9.0 * math.pi, rel=1e-15)
    assert ball_volume(3, 1.0) == pytest.approx(4.0 * math.pi / 3.0, rel=1e-15)
    assert ball_volume(4, 2.0) == pytest.approx(
        math.pi**2 * 16.0 / 2.0, rel=1e-15
    )


# ----------------------------------------------------------------------
# grids and quadrature
# ----------------------------------------------------------------------
@pytest.mark.parametrize("map_kind", ["uniform", "sinh-clustered"])
def test_make_grid_invariants(map_kind):
    grid = make_grid(m=2, r_max=25.0, n_intervals=128, map_kind=map_kind)
    assert grid.nodes[0] == 0.0
    assert grid.nodes[-1] == 25.0
    assert grid.n_intervals == 128
    assert len(grid.nodes) == 129
    assert np.all(np.diff(grid.nodes) > 0)
    assert np.all(grid.quad_weights > 0)
    assert grid.quad_weights.sum() == pytest.approx(
        ball_volume(4, 25.0), rel=1e-10
    )


def test_sinh_grid_clusters_toward_origin():
    uni = make_grid(m=2, r_max=25.0, n_intervals=128, map_kind="uniform")
    cl = make_grid(m=2, r_max=25.0, n_intervals=128)
    assert cl.nodes[1] < uni.nodes[1] / 3.0
    stronger = make_grid(m=2, r_max=25.0, n_intervals=128, sinh_strength=6.0)
    assert stronger.nodes[1] < cl.nodes[1]


def test_make_grid_validates_inputs():
    with pytest.raises(GridMismatch):
        make_grid(m=0, r_max=10.0, n_intervals=128)
    with pytest.raises(GridMismatch):
        make_grid(m=2, r_max=1.0, n_intervals=128)
    with pytest.raises(GridMismatch):
        make_grid(m=2, r_max=10.0, n_intervals=32)
    with pytest.raises(GridMismatch):
        make_grid(m=2, r_max=10.0, n_intervals=128, map_kind="chebyshev")
    with pytest.raises(GridMismatch):
        make_grid(m=2, r_max=10.0, n_intervals=128, sinh_strength=0.0)


def test_quadrature_against_closed_form_integrals():
    grid = make_grid(m=2, r_max=10.0, n_intervals=1024)
    # integral of |x|^2 over the ball of radius 10 in R^4.
    got = float(grid.quad_weights @ grid.nodes**2)
    exact = sphere_area(4) * 10.0**6 / 6.0
    assert got == pytest.approx(exact, rel=1e-5)
    # Gaussian integral over R^4 (tail beyond r = 10 is ~1e-40).
    got = float(grid.quad_weights @ np.exp(-grid.nodes**2))
    assert got == pytest.approx(math.pi**2, rel=1e-4)


def test_partial_ball_weights_are_exact_and_complementary():
    grid = make_grid(m=2, r_max=10.0, n_intervals=256)
    idx = grid.nearest_index(3.0)
    within = grid.weights_within(idx)
    beyond = grid.weights_beyond(idx)
    assert np.all(within[idx + 1 :] == 0.0)
    assert within.sum() == pytest.approx(
        ball_volume(4, float(grid.nodes[idx])), rel=1e-12
    )
    np.testing.assert_array_equal(within + beyond, grid.quad_weights)


def test_nearest_index_snaps_and_validates():
    grid = make_grid(m=2, r_max=10.0, n_intervals=256)
    idx = grid.nearest_index(3.0)
    assert abs(grid.nodes[idx] - 3.0) == np.min(np.abs(grid.nodes - 3.0))
    assert grid.nearest_index(0.0) == 0
    assert grid.nearest_index(10.0) == len(grid.nodes) - 1
    with pytest.raises(GridMismatch):
        grid.nearest_index(10.5)
    with pytest.raises(GridMismatch):
        grid.nearest_index(-0.1)


def test_ensure_same_accepts_equal_layout_and_rejects_others():
    a = make_grid(m=2, r_max=10.0, n_intervals=128)
    b = make_grid(m=2, r_max=10.0, n_intervals=128)
    a.ensure_same(b)  # identical construction, distinct objects
    c = make_grid(m=2, r_max=10.0, n_intervals=256)
    with pytest.raises(GridMismatch):
        a.ensure_same(c)


# ----------------------------------------------------------------------
# radial fields
# ----------------------------------------------------------------------
def test_radial_field_is_immutable_and_validated():
    grid = make_grid(m=2, r_max=10.0, n_intervals=128)
    f = RadialField(grid=grid, values=np.sin(grid.nodes))
    with pytest.raises(ValueError):
        f.values[0] = 1.0
    with pytest.raises(GridMismatch):
        RadialField(grid=grid, values=np.zeros(5))
    bad = np.zeros_like(grid.nodes)
    bad[3] = np.nan
    with pytest.raises(GridMismatch):
        RadialField(grid=grid, values=bad)
    with pytest.raises(GridMismatch):
        RadialField(
            grid=grid,
            values=np.zeros_like(grid.nodes),
            valid=np.ones(5, dtype=bool),
        )


def test_radial_field_default_mask_is_all_valid():
    grid = make_grid(m=2, r_max=10.0, n_intervals=128)
    f = RadialField(grid=grid, values=np.zeros_like(grid.nodes))
    assert f.valid is None
    assert f.valid_mask().all()


def test_field_csv_roundtrip(tmp_path):
    grid = make_grid(m=2, r_max=10.0, n_intervals=128)
    f = RadialField(grid=grid, values=np.exp(-grid.nodes) * math.pi)
    path = str(tmp_path / "field.csv")
    field_to_csv(f, path)
    table = np.loadtxt(path, delimiter=",", skiprows=1)
    # %.17g preserves doubles exactly through the text round-trip.
    np.testing.assert_array_equal(table[:, 0], grid.nodes)
    np.testing.assert_array_equal(table[:, 1], f.values)
    with open(path) as fh:
        assert fh.readline().strip() == "r,value"


# ----------------------------------------------------------------------
# ring kernel: numerical route against closed forms
# ----------------------------------------------------------------------
def test_ring_kernel_dimension_two_is_log_of_outer_radius():
    # In the plane, the angular mean of log|x - y| equals log max(s, r)
    # exactly (mean value property); the quadrature route must reproduce
    # it everywhere, including on the diagonal.
    for s, r in [(0.5, 2.0), (2.0, 0.5), (1.3, 1.3), (0.0, 2.0), (3.0, 3.0)]:
        got = ring_kernel_mean(2, s, r)
        assert got == pytest.approx(math.log(max(s, r)), abs=1e-12)


def test_ring_kernel_dimension_four_closed_form():
    # In R^4 the angular mean is log max + (min/max)^2 / 4.
    for s, r in [(0.5, 2.0), (2.0, 0.5), (1.0, 1.0), (0.0, 1.5), (4.0, 3.9)]:
        hi, lo = max(s, r), min(s, r)
        expected = math.log(hi) + 0.25 * (lo / hi) ** 2
        assert ring_kernel_mean(4, s, r) == pytest.approx(expected, abs=1e-10)


def test_ring_kernel_is_symmetric_in_its_radii():
    rng = np.random.default_rng(17)
    for _ in range(20):
        s, r = rng.uniform(0.01, 5.0, size=2)
        assert ring_kernel_mean(6, s, r) == pytest.approx(
            ring_kernel_mean(6, r, s), rel=1e-13
        )


def test_ring_kernel_validates_inputs():
    with pytest.raises(GridMismatch):
        ring_kernel_mean(3, 1.0, 2.0)
    with pytest.raises(GridMismatch):
        ring_kernel_mean(0, 1.0, 2.0)
    with pytest.raises(GridMismatch):
        ring_kernel_mean(4, -1.0, 2.0)
    with pytest.raises(GridMismatch):
        ring_kernel_mean(4, 0.0, 0.0)
    with pytest.raises(GridMismatch):
        ring_kernel_mean(4, 1.0, 2.0, quad_order=16)


# ----------------------------------------------------------------------
# kernel matrix assembly and cache
# ----------------------------------------------------------------------
def test_kernel_matrix_is_exactly_symmetric_with_zero_origin_pair():
    grid = make_grid(m=2, r_max=5.0, n_intervals=128)
    kern = kernel_matrix(grid)
    np.testing.assert_array_equal(kern.entries, kern.entries.T)
    assert kern.entries[0, 0] == 0.0
    assert kern.quad_order == 12


def test_kernel_matrix_entries_match_quadrature_route():
    grid = make_grid(m=3, r_max=5.0, n_intervals=128)
    kern = kernel_matrix(grid)
    idx = [1, 7, 40, 90, 128]
    for i in idx:
        for j in idx:
            direct = ring_kernel_mean(
                6, float(grid.nodes[i]), float(grid.nodes[j])
            )
            assert kern.entries[i, j] == pytest.approx(direct, abs=1e-8)


def test_kernel_matrix_cache_roundtrip_is_bit_identical(tmp_path):
    grid = make_grid(m=2, r_max=5.0, n_intervals=128)
    cache = str(tmp_path / "cache")
    fresh = kernel_matrix(grid, cache_dir=cache)
    files = os.listdir(cache)
    assert len(files) == 1 and files[0].startswith("kernel-")
    cached = kernel_matrix(grid, cache_dir=cache)
    np.testing.assert_array_equal(fresh.entries, cached.entries)
    np.testing.assert_array_equal(fresh.apply_table, cached.apply_table)
    # A different quadrature order is a different cache entry.
    kernel_matrix(grid, quad_order=8, cache_dir=cache)
    assert len(os.listdir(cache)) == 2


def test_kernel_matrix_validates_quad_order():
    grid = make_grid(m=2, r_max=5.0, n_intervals=128)
    with pytest.raises(GridMismatch):
        kernel_matrix(grid, quad_order=2)


# ----------------------------------------------------------------------
# potential operator
# ----------------------------------------------------------------------
def test_potential_reproduces_explicit_solution(kernel_cache):
    # The curvature density of the explicit spherical solution, pushed
    # through the potential operator, must reproduce the solution itself
    # up to an additive constant (checked as a standard deviation).
    grid = make_grid(m=2, r_max=40.0, n_intervals=1024)
    kern = kernel_matrix(grid, cache_dir=kernel_cache)
    u = spherical_solution(2, 1.0, grid.nodes)
    density = RadialField(grid=grid, values=6.0 * np.exp(4.0 * u))
    pot = potential_apply(kern, density, constants(2))
    window = grid.nodes <= 20.0
    assert float(np.std((pot.values - u)[window])) < 1e-3


def test_potential_tail_slope_matches_density_mass(wide_grid, wide_kernel):
    # A density of discrete mass mu produces a -(mu / gamma_m) log r far
    # field; measure the log-slope between two tail radii.
    cs = constants(2)
    dens = RadialField(grid=wide_grid, values=np.exp(-wide_grid.nodes**2))
    mu = float(wide_grid.quad_weights @ dens.values)
    pot = potential_apply(wide_kernel, dens, cs)
    i1 = wide_grid.nearest_index(30.0)
    i2 = wide_grid.nearest_index(55.0)
    slope = (pot.values[i2] - pot.values[i1]) / (
        math.log(wide_grid.nodes[i2]) - math.log(wide_grid.nodes[i1])
    )
    assert slope == pytest.approx(-mu / cs.gamma_m, rel=5e-3)


def test_polyharmonic_of_potential_recovers_density(wide_grid, wide_kernel):
    # (-Delta)^m inverts the potential construction: applying the stencil
    # operator to the potential of a smooth compact density returns that
    # density on the interior.
    dens = RadialField(grid=wide_grid, values=np.exp(-wide_grid.nodes**2))
    pot = potential_apply(wide_kernel, dens, constants(2))
    back = radial_polyharmonic(pot, k=2)
    window = back.valid & (wide_grid.nodes > 0.3) & (wide_grid.nodes < 2.0)
    assert window.sum() > 30
    dev = np.abs(back.values[window] - dens.values[window])
    assert dev.max() / dens.values.max() < 5e-3


def test_potential_apply_validates_dimensions(wide_grid, wide_kernel):
    dens = RadialField(grid=wide_grid, values=np.exp(-wide_grid.nodes**2))
    with pytest.raises(GridMismatch):
        potential_apply(wide_kernel, dens, constants(3))
    other = make_grid(m=2, r_max=60.0, n_intervals=512)
    with pytest.raises(GridMismatch):
        potential_apply(
            wide_kernel,
            RadialField(grid=other, values=np.zeros_like(other.nodes)),
            constants(2),
        )
