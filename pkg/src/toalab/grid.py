"""Uniform spatial grids and spectral wavefunction containers.

Everything downstream (propagation, scattering diagnostics, arrival-time
operators) works on a periodic uniform grid with power-of-two length so
that position <-> momentum transforms are plain FFTs.  Units are chosen
with hbar = 1; the particle mass stays an explicit parameter.

The transform convention is the unitary continuum one,

    psi_tilde(k) = (2*pi)**-0.5 * integral dx psi(x) exp(-i k x),

discretised with trapezoid weight dx, so that Parseval holds exactly on
the grid: sum |psi|^2 dx == sum |psi_tilde|^2 dk.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

__all__ = [
    "GridError",
    "Grid1D",
    "WaveFunction",
    "SpinorWave",
    "GaussianSpec",
    "make_gaussian",
    "to_momentum",
    "to_position",
    "transform",
    "expectation",
]

#: width, in standard deviations, of the guard band used when checking
#: that a freshly built packet fits on the grid.
GUARD_SIGMAS = 6.0


class GridError(ValueError):
    """Raised for invalid grid geometry or states that do not fit on it."""


@dataclass(frozen=True)
class Grid1D:
    """Periodic uniform grid on [x_min, x_max) with n points.

    n must be a power of two and at least 16; dx = (x_max - x_min) / n.
    """

    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if not (self.n >= 16 and (self.n & (self.n - 1)) == 0):
            raise GridError(f"n must be a power of two >= 16, got {self.n}")
        if not self.x_max > self.x_min:
            raise GridError("x_max must exceed x_min")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n

    @property
    def dk(self) -> float:
        return 2.0 * np.pi / (self.x_max - self.x_min)

    @property
    def k_max(self) -> float:
        """Nyquist wavenumber pi / dx."""
        return np.pi / self.dx

    @cached_property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n)

    @cached_property
    def k(self) -> np.ndarray:
        """Momentum grid in FFT ordering (0, dk, ..., -dk)."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.dx)

    def index_of(self, x0: float) -> int:
        """Index of the grid point nearest to x0."""
        i = int(round((x0 - self.x_min) / self.dx))
        if not 0 <= i < self.n:
            raise GridError(f"x0={x0} is outside the grid")
        return i


def _fft_phase(grid: Grid1D) -> np.ndarray:
    # exp(-i k x_min) factors that map numpy's index-based FFT onto the
    # continuum convention with the physical origin at x_min.
    return np.exp(-1j * grid.k * grid.x_min)


def position_to_momentum(grid: Grid1D, values: np.ndarray) -> np.ndarray:
    return (grid.dx / np.sqrt(2.0 * np.pi)) * _fft_phase(grid) * np.fft.fft(values, axis=-1)


def momentum_to_position(grid: Grid1D, values: np.ndarray) -> np.ndarray:
    return (np.sqrt(2.0 * np.pi) / grid.dx) * np.fft.ifft(values / _fft_phase(grid), axis=-1)


@dataclass(frozen=True)
class WaveFunction:
    """A single-component state on a Grid1D, in either representation."""

    grid: Grid1D
    values: np.ndarray
    rep: str = "position"  # "position" | "momentum"

    def __post_init__(self):
        if self.rep not in ("position", "momentum"):
            raise GridError(f"unknown representation {self.rep!r}")
        if self.values.shape != (self.grid.n,):
            raise GridError("values shape does not match grid")

    @property
    def weight(self) -> float:
        """Quadrature weight of the current representation."""
        return self.grid.dx if self.rep == "position" else self.grid.dk

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.weight)

    def inner(self, other: "WaveFunction") -> complex:
        if other.rep != self.rep or other.grid != self.grid:
            raise GridError("inner product needs matching grid and representation")
        return complex(np.vdot(self.values, other.values) * self.weight)


def to_momentum(psi: WaveFunction) -> WaveFunction:
    if psi.rep == "momentum":
        return psi
    return WaveFunction(psi.grid, position_to_momentum(psi.grid, psi.values), "momentum")


def to_position(psi: WaveFunction) -> WaveFunction:
    if psi.rep == "position":
        return psi
    return WaveFunction(psi.grid, momentum_to_position(psi.grid, psi.values), "position")


def transform(psi: WaveFunction, rep: str) -> WaveFunction:
    """Return psi in the requested representation ("position"/"momentum")."""
    if rep == "momentum":
        return to_momentum(psi)
    if rep == "position":
        return to_position(psi)
    raise GridError(f"unknown representation {rep!r}")


@dataclass(frozen=True)
class SpinorWave:
    """Two-component (trigger spin) state; components share grid and rep."""

    up: WaveFunction
    down: WaveFunction

    def __post_init__(self):
        if self.up.grid != self.down.grid or self.up.rep != self.down.rep:
            raise GridError("spinor components must share grid and representation")

    @property
    def grid(self) -> Grid1D:
        return self.up.grid

    @property
    def rep(self) -> str:
        return self.up.rep

    def norm_sq(self) -> float:
        return self.up.norm_sq() + self.down.norm_sq()

    def as_array(self) -> np.ndarray:
        """(2, n) array view [up, down]."""
        return np.stack([self.up.values, self.down.values])

    @staticmethod
    def from_array(grid: Grid1D, arr: np.ndarray, rep: str = "position") -> "SpinorWave":
        return SpinorWave(
            WaveFunction(grid, np.ascontiguousarray(arr[0]), rep),
            WaveFunction(grid, np.ascontiguousarray(arr[1]), rep),
        )

    @staticmethod
    def spin_up(psi: WaveFunction) -> "SpinorWave":
        zero = WaveFunction(psi.grid, np.zeros(psi.grid.n, dtype=complex), psi.rep)
        return SpinorWave(psi, zero)


@dataclass(frozen=True)
class GaussianSpec:
    """Moving Gaussian packet: center x0, width sigma (position-space
    standard deviation of |psi|^2), carrier momentum k0."""

    x0: float
    sigma: float
    k0: float

    def __post_init__(self):
        if self.sigma <= 0:
            raise GridError("sigma must be positive")


def make_gaussian(grid: Grid1D, spec: GaussianSpec) -> WaveFunction:
    """Unit-norm Gaussian packet on the grid.

    Raises GridError if the packet does not fit inside the grid with a
    six sigma guard band on each side, so that later spectral evolution
    does not silently wrap around the periodic boundary.
    """
    lo = spec.x0 - GUARD_SIGMAS * spec.sigma
    hi = spec.x0 + GUARD_SIGMAS * spec.sigma
    if lo < grid.x_min or hi > grid.x_max:
        raise GridError(
            "packet does not fit: needs [%g, %g] inside [%g, %g]"
            % (lo, hi, grid.x_min, grid.x_max)
        )
    xr = grid.x - spec.x0
    vals = np.exp(-(xr**2) / (4.0 * spec.sigma**2) + 1j * spec.k0 * grid.x)
    vals = vals.astype(complex)
    nrm = np.sqrt(np.sum(np.abs(vals) ** 2) * grid.dx)
    if nrm == 0.0:
        raise GridError("degenerate packet")
    return WaveFunction(grid, vals / nrm, "position")


def expectation(psi: WaveFunction, observable: str, mass: float = 1.0) -> float:
    """Expectation value of 'x', 'k', or 'kinetic' on a normalised copy.

    States are renormalised internally; a zero-norm state is an error.
    """
    n2 = psi.norm_sq()
    if n2 <= 0.0:
        raise GridError("expectation of a zero-norm state")
    if observable == "x":
        p = to_position(psi)
        val = np.sum(p.grid.x * np.abs(p.values) ** 2) * p.grid.dx
    elif observable == "k":
        m = to_momentum(psi)
        val = np.sum(m.grid.k * np.abs(m.values) ** 2) * m.grid.dk
    elif observable == "kinetic":
        m = to_momentum(psi)
        val = np.sum((m.grid.k**2 / (2.0 * mass)) * np.abs(m.values) ** 2) * m.grid.dk
    else:
        raise GridError(f"unknown observable {observable!r}")
    return float(val / n2)
