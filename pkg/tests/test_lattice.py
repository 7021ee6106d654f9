"""Grid construction, transform convention, and quadrature."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from qfreefall import (
    Grid1D,
    GridError,
    LeakageError,
    check_leakage,
    dft_forward,
    dft_inverse,
    edge_probability,
    make_grid,
    quad,
)


def random_unit_state(grid, seed):
    rng = np.random.default_rng(seed)
    values = rng.normal(size=grid.n) + 1j * rng.normal(size=grid.n)
    return values / np.sqrt((np.abs(values) ** 2).sum() * grid.dx)


def direct_forward(values, grid):
    """O(n^2) reference transform, summed term by term."""
    out = np.empty(grid.n, dtype=complex)
    for k, p in enumerate(grid.p):
        out[k] = (grid.dx / np.sqrt(2 * np.pi)) * np.sum(
            values * np.exp(-1j * p * grid.x)
        )
    return out


def test_make_grid_spacings():
    grid = make_grid(-10.0, 10.0, 1024)
    assert grid.dx == 20.0 / 1024
    assert_allclose(grid.dp, 2 * np.pi / 20.0, rtol=1e-15)
    # the conjugate-lattice closure holds to rounding
    assert abs(grid.dx * grid.dp * grid.n - 2 * np.pi) < 1e-12


def test_make_grid_small():
    grid = make_grid(0.0, 1.0, 16)
    assert grid.dx == 1.0 / 16
    assert grid.n == 16


def test_make_grid_rejects_bad_sizes():
    with pytest.raises(GridError):
        make_grid(0.0, 1.0, 17)
    with pytest.raises(GridError):
        make_grid(0.0, 1.0, 8)
    with pytest.raises(GridError):
        make_grid(1.0, 1.0, 16)
    with pytest.raises(GridError):
        make_grid(2.0, 1.0, 16)


def test_lattice_layout():
    grid = make_grid(-10.0, 10.0, 64)
    assert grid.x[0] == grid.x_min
    assert_allclose(np.diff(grid.x), grid.dx, rtol=0, atol=1e-15)
    # momentum lattice is centered: zero sits at index n/2
    assert grid.p[grid.n // 2] == 0.0
    assert_allclose(grid.p_edge, 0.5 * grid.n * grid.dp, rtol=1e-15)


def test_forward_matches_direct_sum():
    grid = make_grid(-3.0, 5.0, 64)
    values = random_unit_state(grid, seed=7)
    assert_allclose(dft_forward(values, grid), direct_forward(values, grid), atol=1e-12)


def test_inverse_matches_direct_sum():
    grid = make_grid(-3.0, 5.0, 64)
    values = random_unit_state(grid, seed=8)
    tilde = direct_forward(values, grid)
    assert_allclose(dft_inverse(tilde, grid), values, atol=1e-12)


def test_round_trip_identity():
    grid = make_grid(-10.0, 10.0, 256)
    for seed in range(3):
        values = random_unit_state(grid, seed)
        back = dft_inverse(dft_forward(values, grid), grid)
        assert np.max(np.abs(back - values)) < 1e-12


def test_parseval():
    grid = make_grid(-10.0, 10.0, 256)
    values = random_unit_state(grid, seed=3)
    tilde = dft_forward(values, grid)
    norm_x = (np.abs(values) ** 2).sum() * grid.dx
    norm_p = (np.abs(tilde) ** 2).sum() * grid.dp
    assert abs(norm_x - norm_p) < 1e-12


def test_gaussian_transforms_to_gaussian():
    """A centered unit-norm Gaussian maps onto its analytic transform.

    With psi(x) = (2 pi s^2)^(-1/4) exp(-x^2 / (4 s^2)) the momentum
    amplitudes are (2 s^2 / pi)^(1/4) exp(-s^2 p^2), real and positive.
    """
    grid = make_grid(-20.0, 20.0, 512)
    s = 1.0
    psi = (2 * np.pi * s**2) ** -0.25 * np.exp(-(grid.x**2) / (4 * s**2))
    expected = (2 * s**2 / np.pi) ** 0.25 * np.exp(-(s**2) * grid.p**2)
    assert_allclose(dft_forward(psi.astype(complex), grid), expected, atol=1e-12)


def test_constant_is_momentum_delta():
    grid = make_grid(-10.0, 10.0, 128)
    values = np.ones(grid.n, dtype=complex)
    tilde = dft_forward(values, grid)
    center = grid.n // 2
    off = np.delete(np.abs(tilde), center)
    assert np.max(off) < 1e-12
    assert abs(tilde[center]) > 1.0


def test_dft_length_mismatch():
    grid = make_grid(-10.0, 10.0, 64)
    with pytest.raises(GridError):
        dft_forward(np.ones(32, dtype=complex), grid)
    with pytest.raises(GridError):
        dft_inverse(np.ones(128, dtype=complex), grid)


def test_quad_all_ones():
    grid = make_grid(0.0, 1.0, 16)
    assert quad(np.ones(16), grid.dx) == 1.0


def test_quad_gaussian_norm():
    grid = make_grid(-20.0, 20.0, 512)
    s = 1.3
    density = (2 * np.pi * s**2) ** -0.5 * np.exp(-(grid.x**2) / (2 * s**2))
    assert abs(quad(density, grid.dx) - 1.0) < 1e-10


def test_quad_zero_vector():
    assert quad(np.zeros(32), 0.1) == 0.0


def test_quad_validation():
    with pytest.raises(ValueError):
        quad(np.ones(8), 0.0)
    with pytest.raises(ValueError):
        quad(np.ones(8), -0.5)
    with pytest.raises(ValueError):
        quad(np.ones(1), 0.1)
    with pytest.raises(ValueError):
        quad(np.ones((4, 4)), 0.1)


def test_edge_probability_localized_state():
    grid = make_grid(-10.0, 10.0, 256)
    psi = (2 * np.pi) ** -0.25 * np.exp(-(grid.x**2) / 4.0)
    psi = psi / np.sqrt((np.abs(psi) ** 2).sum() * grid.dx)
    assert edge_probability(psi.astype(complex), grid) < 1e-15
    check_leakage(psi.astype(complex), grid)


def test_leakage_guard_trips_on_edge_weight():
    grid = make_grid(-10.0, 10.0, 256)
    # packet parked inside the outer 5 percent band
    psi = np.exp(-((grid.x - 9.7) ** 2) / 0.02).astype(complex)
    psi = psi / np.sqrt((np.abs(psi) ** 2).sum() * grid.dx)
    with pytest.raises(LeakageError):
        check_leakage(psi, grid, "test state")


def test_grid_is_frozen_and_comparable():
    a = make_grid(-10.0, 10.0, 64)
    b = make_grid(-10.0, 10.0, 64)
    assert a == b
    with pytest.raises(AttributeError):
        a.n = 128
    assert isinstance(a, Grid1D)
