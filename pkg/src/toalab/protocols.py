"""Repeated projective position measurements and related diagnostics.

The Geiger-counter protocol asks, every Delta units of time, whether the
particle is past the detector location x_A.  A "yes" removes the branch
from further evolution, a "no" collapses onto the survivor.  Branch
weights are tracked unnormalized, so the recorded series P(t_k) are the
joint probabilities (survive, survive, ..., detect at t_k) directly and
the sum rule sum_k P(t_k) + residual = 1 holds to rounding.

Free evolution between looks is done exactly in momentum space (one
phase multiplication per interval), so there is no time-stepping error
in the protocol itself; the only discretization is the grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import (
    Grid1D,
    WaveFunction,
    position_to_momentum,
    momentum_to_position,
)

__all__ = [
    "ProtocolError",
    "MeasurementSchedule",
    "ArrivalSeries",
    "free_evolve",
    "project_plus",
    "pi_plus_weight",
    "probability_current",
    "repeated_measurement_arrival",
    "zeno_scan",
    "current_series",
    "presence_distribution",
    "commutator_witness",
]


class ProtocolError(RuntimeError):
    """Raised for invalid schedules or violated preconditions."""


@dataclass(frozen=True)
class MeasurementSchedule:
    """Detector location, look interval and horizon.

    delta must be positive and t_max / delta is capped at 1e6 looks.
    When base_dt is given (the step of a companion time-domain run),
    delta must be an integer multiple of it so schedules can be aligned
    with stepped evolutions.
    """

    x_a: float
    delta: float
    t_max: float
    mass: float = 1.0
    base_dt: float | None = None

    def __post_init__(self):
        if self.delta <= 0 or self.t_max <= 0:
            raise ProtocolError("delta and t_max must be positive")
        if self.t_max / self.delta > 1e6 + 0.5:
            raise ProtocolError("schedule exceeds the 1e6 look budget")
        if self.base_dt is not None:
            ratio = self.delta / self.base_dt
            if self.delta < self.base_dt or abs(ratio - round(ratio)) > 1e-9 * ratio:
                raise ProtocolError("delta must be an integer multiple of base_dt")

    @property
    def times(self) -> np.ndarray:
        n = int(np.floor(self.t_max / self.delta + 1e-9))
        return self.delta * np.arange(1, n + 1)


@dataclass
class ArrivalSeries:
    """Detection record: times t_k, probabilities P(t_k), leftover mass."""

    times: np.ndarray
    probabilities: np.ndarray
    residual: float
    metadata: dict = field(default_factory=dict)

    def total_detection(self) -> float:
        return float(np.sum(self.probabilities))

    def sum_rule_defect(self) -> float:
        return abs(self.total_detection() + self.residual - 1.0)

    def mean_time(self) -> float:
        tot = self.total_detection()
        if tot <= 0.0:
            raise ProtocolError("mean time of an empty record")
        return float(np.sum(self.times * self.probabilities) / tot)

    def peak_time(self) -> float:
        return float(self.times[int(np.argmax(self.probabilities))])


def free_evolve(psi: WaveFunction, t: float, mass: float = 1.0) -> WaveFunction:
    """Exact free propagation by time t (spectral phase)."""
    grid = psi.grid
    tilde = psi.values if psi.rep == "momentum" else position_to_momentum(grid, psi.values)
    tilde = tilde * np.exp(-0.5j * t * grid.k**2 / mass)
    if psi.rep == "momentum":
        return WaveFunction(grid, tilde, "momentum")
    return WaveFunction(grid, momentum_to_position(grid, tilde), "position")


def _split_index(grid: Grid1D, x_a: float) -> int:
    return grid.index_of(x_a)


def project_plus(psi: WaveFunction, x_a: float):
    """Sharp split at the grid point nearest x_a: (inside, outside).

    inside carries x >= x_A, outside the rest; the parts sum to psi
    exactly and are orthogonal on the grid.
    """
    if psi.rep != "position":
        raise ProtocolError("project_plus expects a position-space state")
    i0 = _split_index(psi.grid, x_a)
    inside = np.zeros_like(psi.values)
    outside = psi.values.copy()
    inside[i0:] = psi.values[i0:]
    outside[i0:] = 0.0
    return (WaveFunction(psi.grid, inside, "position"),
            WaveFunction(psi.grid, outside, "position"))


def pi_plus_weight(psi: WaveFunction, x_a: float = 0.0) -> float:
    """High-order quadrature of the weight on x >= x_A.

    Trapezoid rule (half weight at the boundary node) plus the leading
    Euler-Maclaurin boundary correction dx^2/12 * rho'(x_A), with the
    density derivative taken spectrally.  The plain sharp sum is only
    first-order accurate at the cut; this version is fourth order, which
    the continuity-equation checks against the current rely on.
    """
    if psi.rep != "position":
        raise ProtocolError("pi_plus_weight expects a position-space state")
    grid = psi.grid
    dens = np.abs(psi.values) ** 2
    i0 = _split_index(grid, x_a)
    trap = (np.sum(dens[i0:]) - 0.5 * dens[i0]) * grid.dx
    dpsi = momentum_to_position(grid, 1j * grid.k * position_to_momentum(grid, psi.values))
    drho = 2.0 * np.real(np.conj(psi.values[i0]) * dpsi[i0])
    return float(trap + grid.dx**2 / 12.0 * drho)


def probability_current(psi: WaveFunction, mass: float = 1.0) -> np.ndarray:
    """j(x) = (1/m) Im(psi* dpsi/dx) with a spectral derivative."""
    if psi.rep != "position":
        raise ProtocolError("probability_current expects a position-space state")
    grid = psi.grid
    tilde = position_to_momentum(grid, psi.values)
    dpsi = momentum_to_position(grid, 1j * grid.k * tilde)
    return np.imag(np.conj(psi.values) * dpsi) / mass


def repeated_measurement_arrival(psi0: WaveFunction,
                                 schedule: MeasurementSchedule) -> ArrivalSeries:
    """Geiger-counter series: look at t_k = k Delta, collapse, repeat.

    psi0 must start left of the detector (inside weight <= 1e-8).  The
    survivor branch is left unnormalized between looks, so P(t_k) is the
    joint probability of first detection at t_k.
    """
    if psi0.rep != "position":
        raise ProtocolError("repeated_measurement_arrival expects position rep")
    inside0, _ = project_plus(psi0, schedule.x_a)
    if inside0.norm_sq() > 1e-8:
        raise ProtocolError("initial state has weight past the detector")
    grid = psi0.grid
    phase = np.exp(-0.5j * schedule.delta * grid.k**2 / schedule.mass)
    i0 = _split_index(grid, schedule.x_a)
    tilde = position_to_momentum(grid, psi0.values)
    times = schedule.times
    probs = np.empty(len(times))
    for k in range(len(times)):
        tilde = tilde * phase
        vals = momentum_to_position(grid, tilde)
        dens = np.abs(vals) ** 2
        probs[k] = float(np.sum(dens[i0:]) * grid.dx)
        vals[i0:] = 0.0
        tilde = position_to_momentum(grid, vals)
    residual = float(np.sum(np.abs(tilde) ** 2) * grid.dk)
    return ArrivalSeries(times=times, probabilities=probs, residual=residual,
                         metadata={"x_a": schedule.x_a, "delta": schedule.delta,
                                   "t_max": schedule.t_max})


def zeno_scan(psi0: WaveFunction, x_a: float, delta_values, t_max: float,
              mass: float = 1.0):
    """Total detection probability for each look interval Delta.

    delta_values must be descending (coarse looks first); returns a list
    of (Delta, total detection) pairs.
    """
    deltas = list(delta_values)
    if any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise ProtocolError("delta_values must be strictly descending")
    out = []
    for d in deltas:
        series = repeated_measurement_arrival(
            psi0, MeasurementSchedule(x_a=x_a, delta=d, t_max=t_max, mass=mass))
        out.append((d, series.total_detection()))
    return out


def current_series(psi0: WaveFunction, x_a: float, times, mass: float = 1.0) -> np.ndarray:
    """Probability current at x_A sampled at the given times (free run)."""
    grid = psi0.grid
    i0 = _split_index(grid, x_a)
    tilde0 = (psi0.values if psi0.rep == "momentum"
              else position_to_momentum(grid, psi0.values))
    out = np.empty(len(times))
    for idx, t in enumerate(times):
        tilde = tilde0 * np.exp(-0.5j * t * grid.k**2 / mass)
        vals = momentum_to_position(grid, tilde)
        dpsi = momentum_to_position(grid, 1j * grid.k * tilde)
        out[idx] = float(np.imag(np.conj(vals[i0]) * dpsi[i0]) / mass)
    return out


def presence_distribution(psi0: WaveFunction, x_a: float, times,
                          mass: float = 1.0) -> np.ndarray:
    """Normalized presence density |psi(x_A, t)|^2 / integral dt'.

    The window must capture essentially all of the presence: the edge
    samples have to stay below 1e-8 of the peak, otherwise the finite
    window is not a valid surrogate for the all-times normalization.
    """
    times = np.asarray(times, dtype=float)
    if len(times) < 8:
        raise ProtocolError("need a reasonable sampling window")
    grid = psi0.grid
    i0 = _split_index(grid, x_a)
    tilde0 = (psi0.values if psi0.rep == "momentum"
              else position_to_momentum(grid, psi0.values))
    dens = np.empty(len(times))
    for idx, t in enumerate(times):
        tilde = tilde0 * np.exp(-0.5j * t * grid.k**2 / mass)
        vals = momentum_to_position(grid, tilde)
        dens[idx] = abs(vals[i0]) ** 2
    peak = float(np.max(dens))
    if peak <= 0.0:
        raise ProtocolError("no presence at x_A in the window")
    if dens[0] > 1e-8 * peak or dens[-1] > 1e-8 * peak:
        raise ProtocolError("window too small: presence not contained")
    total = float(np.trapezoid(dens, times))
    return dens / total


def commutator_witness(psi0: WaveFunction, x_a: float, t1: float, t2: float,
                       mass: float = 1.0) -> float:
    """Norm of [Pi_+(t1), Pi_+(t2)] psi0 (Heisenberg projectors).

    Nonzero values certify that presence looks at different times are
    incompatible observables, which is why the presence density is not
    an arrival-time distribution.
    """
    def pi_t(psi: WaveFunction, t: float) -> WaveFunction:
        fwd = free_evolve(psi, t, mass)
        inside, _ = project_plus(fwd, x_a)
        return free_evolve(inside, -t, mass)

    a = pi_t(pi_t(psi0, t2), t1)
    b = pi_t(pi_t(psi0, t1), t2)
    return float(np.sqrt(np.sum(np.abs(a.values - b.values) ** 2) * psi0.grid.dx))
