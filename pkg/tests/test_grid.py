import numpy as np
import pytest

from toalab.grid import (
    Grid1D,
    GridError,
    GaussianSpec,
    WaveFunction,
    SpinorWave,
    make_gaussian,
    position_to_momentum,
    momentum_to_position,
    to_momentum,
    expectation,
)


@pytest.fixture
def grid():
    return Grid1D(-20.0, 20.0, 1024)


def test_grid_validation():
    with pytest.raises(GridError):
        Grid1D(-1.0, 1.0, 100)  # not a power of two
    with pytest.raises(GridError):
        Grid1D(-1.0, 1.0, 8)  # too small
    with pytest.raises(GridError):
        Grid1D(1.0, -1.0, 64)  # empty interval


def test_grid_spacings(grid):
    assert grid.dx == pytest.approx(40.0 / 1024)
    assert grid.dk == pytest.approx(2.0 * np.pi / 40.0)
    assert grid.x[0] == pytest.approx(-20.0)
    assert len(grid.x) == len(grid.k) == 1024


def test_transform_round_trip(grid):
    rng = np.random.default_rng(7)
    vals = rng.normal(size=grid.n) + 1j * rng.normal(size=grid.n)
    back = momentum_to_position(grid, position_to_momentum(grid, vals))
    assert np.max(np.abs(back - vals)) < 1e-12


def test_parseval_exact(grid):
    psi = make_gaussian(grid, GaussianSpec(x0=-3.0, sigma=1.2, k0=4.0))
    tilde = to_momentum(psi)
    assert psi.norm_sq() == pytest.approx(1.0, abs=1e-13)
    assert tilde.norm_sq() == pytest.approx(psi.norm_sq(), abs=1e-13)


def test_plane_wave_lands_on_single_mode(grid):
    # e^{ik0 x} at a grid-commensurate k0 is one momentum-space pixel
    k0 = grid.k[37]
    vals = np.exp(1j * k0 * grid.x) / np.sqrt(grid.n * grid.dx)
    tilde = position_to_momentum(grid, vals)
    mag = np.abs(tilde)
    assert np.argmax(mag) == 37
    mag[37] = 0.0
    assert np.max(mag) < 1e-12


def test_gaussian_moments(grid):
    spec = GaussianSpec(x0=2.5, sigma=1.5, k0=-3.0)
    psi = make_gaussian(grid, spec)
    assert expectation(psi, "x") == pytest.approx(2.5, abs=1e-10)
    assert expectation(psi, "k") == pytest.approx(-3.0, abs=1e-10)
    # <p^2/2m> = (k0^2 + 1/(4 sigma^2)) / (2 m)
    e_expected = (9.0 + 1.0 / (4.0 * 1.5**2)) / 2.0
    assert expectation(psi, "kinetic") == pytest.approx(e_expected, rel=1e-10)


def test_gaussian_guard_band(grid):
    with pytest.raises(GridError):
        make_gaussian(grid, GaussianSpec(x0=-18.0, sigma=1.0, k0=0.0))


def test_spinor_norm_and_array_round_trip(grid):
    psi = make_gaussian(grid, GaussianSpec(x0=0.0, sigma=1.0, k0=2.0))
    sp = SpinorWave.spin_up(psi)
    assert sp.norm_sq() == pytest.approx(1.0, abs=1e-12)
    arr = sp.as_array()
    assert arr.shape == (2, grid.n)
    assert np.all(arr[1] == 0.0)
    sp2 = SpinorWave.from_array(grid, arr, "position")
    assert sp2.norm_sq() == pytest.approx(sp.norm_sq(), abs=1e-14)


def test_expectation_rejects_zero_state(grid):
    psi = WaveFunction(grid, np.zeros(grid.n, dtype=complex), "position")
    with pytest.raises(GridError):
        expectation(psi, "x")
