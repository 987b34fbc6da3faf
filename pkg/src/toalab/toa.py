"""Time-of-arrival operator: eigenfunctions, transforms, regularization.

The free-particle arrival operator at the origin is

    T_A = -m p^{-1/2} x p^{-1/2},

realized here in the momentum representation, where x acts as i d/dk
(spectrally) and p^{-1/2} is the diagonal 1/s(k) with the branch

    s(k) = (theta(k) + i theta(-k)) sqrt(|k|),    s(k)^2 = k.

T_A is canonically conjugate to the Hamiltonian, [T_A, H] = -i, but it
is not self-adjoint: its eigenfunctions <k|T> = s(k) e^{i T k^2 / 2m}
/ sqrt(2 pi m) are complete yet non-orthogonal, with overlap kernel
delta(T - T') - i / (pi (T - T')).  The regularized Hermitian version
T_A' = O(p) T_A O(p) uses a momentum cutoff O that vanishes at k = 0 at
least as fast as sqrt(|k|), which keeps O/s bounded.  The price is the
modified commutator [T_A', H] = -i O(p)^2, so T_A' only ticks at unit
rate on states supported where O = 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import pi, sqrt

import numpy as np

from .grid import (
    Grid1D,
    GridError,
    WaveFunction,
    position_to_momentum,
    momentum_to_position,
    to_momentum,
)

__all__ = [
    "ToaError",
    "CutoffProfile",
    "ToaState",
    "CoherentToaSpec",
    "branch_sqrt",
    "toa_eigenfunction",
    "toa_transform",
    "overlap_kernel_check",
    "apply_regularized_toa",
    "toa_matrix",
    "commutator_expectation",
    "toa_drift",
    "energy_shift_kick",
    "coherent_toa_state",
    "eigenstate_trigger_experiment",
]


class ToaError(RuntimeError):
    """Raised for invalid arrival-operator inputs."""


def branch_sqrt(k: np.ndarray) -> np.ndarray:
    """s(k) with s(k)^2 = k: sqrt(k) for k > 0, i sqrt(|k|) for k < 0."""
    k = np.asarray(k, dtype=float)
    root = np.sqrt(np.abs(k))
    return np.where(k >= 0.0, root + 0.0j, 1j * root)


@dataclass(frozen=True)
class CutoffProfile:
    """Momentum cutoff O(k): 1 beyond epsilon, decaying to 0 at k = 0.

    kind "smooth" uses O = sqrt(sin(pi u / 2)) with u = |k|/epsilon,
    which matches the sqrt(|k|) floor near zero and joins |k| = epsilon
    with zero slope.  kind "sharp" is the indicator of |k| >= epsilon.
    """

    epsilon: float
    kind: str = "smooth"

    def __post_init__(self):
        if self.epsilon <= 0.0:
            raise ToaError("epsilon must be positive")
        if self.kind not in ("smooth", "sharp"):
            raise ToaError(f"unknown cutoff kind {self.kind!r}")

    def values(self, k: np.ndarray) -> np.ndarray:
        u = np.minimum(np.abs(np.asarray(k, dtype=float)) / self.epsilon, 1.0)
        if self.kind == "sharp":
            return (u >= 1.0).astype(float)
        return np.sqrt(np.sin(0.5 * pi * u))

    def inside_weight(self, psi_tilde: WaveFunction) -> float:
        """Probability weight where the profile is below 1."""
        o = self.values(psi_tilde.grid.k)
        dens = np.abs(psi_tilde.values) ** 2
        return float(np.sum(dens[o < 1.0]) * psi_tilde.grid.dk)


@dataclass
class ToaState:
    """Arrival-time amplitudes g(T) on a time grid."""

    times: np.ndarray
    g: np.ndarray

    def density(self) -> np.ndarray:
        return np.abs(self.g) ** 2

    def total_probability(self) -> float:
        return float(np.trapezoid(self.density(), self.times))

    def peak_time(self) -> float:
        return float(self.times[int(np.argmax(self.density()))])

    def mean_time(self) -> float:
        d = self.density()
        return float(np.trapezoid(self.times * d, self.times) /
                     np.trapezoid(d, self.times))


def toa_eigenfunction(k: np.ndarray, t_arr: float, mass: float = 1.0) -> np.ndarray:
    """<k|T>: the arrival eigenfunction at arrival time t_arr."""
    if mass <= 0.0:
        raise ToaError("mass must be positive")
    k = np.asarray(k, dtype=float)
    return branch_sqrt(k) / sqrt(2.0 * pi * mass) * np.exp(0.5j * t_arr * k**2 / mass)


def toa_transform(psi_tilde: WaveFunction, times, mass: float = 1.0) -> ToaState:
    """Arrival amplitudes g(T) = integral dk conj(<k|T>) psi(k).

    A direct chirped quadrature over the state's momentum grid; the
    caller picks the time window (it should cover the classical arrival
    window with margin, see the completeness tests).
    """
    if psi_tilde.rep != "momentum":
        raise ToaError("toa_transform expects a momentum-space state")
    times = np.asarray(times, dtype=float)
    grid = psi_tilde.grid
    chirp = np.conj(branch_sqrt(grid.k))[None, :] * np.exp(
        -0.5j * np.outer(times, grid.k**2) / mass)
    g = chirp @ psi_tilde.values * (grid.dk / sqrt(2.0 * pi * mass))
    return ToaState(times=times, g=g)


def _gauss(t, center, width):
    return np.exp(-((t - center) ** 2) / (2.0 * width**2))


def overlap_kernel_check(t1: float, t2: float, width: float, mass: float = 1.0,
                         k_max: float = 60.0, n_k: int = 240001,
                         n_t: int = 2001):
    """Smeared eigenstate overlap, numeric versus closed form.

    Pairs Gaussian test functions f (at t1) and g (at t2) of common
    width through the eigenstate family:

        I = integral dT dT' conj(f(T)) g(T') <T|T'>

    computed numerically by reducing to the shared momentum integral
    I = integral dk conj(A_f) A_g with A_h(k) = integral dT h(T) <k|T>,
    on a dedicated dense symmetric k grid (no FFT involved), and in
    closed form from <T|T'> = delta(T-T') - i/(pi (T-T')), where the
    principal value is evaluated through the odd-part reduction
    PV integral h(u)/u du = integral (h(u) - h(-u))/(2u) du with the
    Gaussian cross-correlation h.  Returns (numeric, closed_form).
    """
    span = 8.0 * width
    tg = np.linspace(min(t1, t2) - span, max(t1, t2) + span, n_t)
    dt = tg[1] - tg[0]
    f = _gauss(tg, t1, width)
    g = _gauss(tg, t2, width)
    # k grid symmetric about 0, avoiding the k = 0 node exactly
    k = np.linspace(-k_max, k_max, n_k)
    dk = k[1] - k[0]
    e = 0.5 * k**2 / mass
    # A_h(k) = sum_T h(T) s(k)/sqrt(2 pi m) e^{i T E} dt; h real Gaussian
    # has the closed Fourier form, used here to keep the T quadrature
    # from limiting the accuracy
    def a_coeff(center):
        ft = sqrt(2.0 * pi) * width * np.exp(-0.5 * (width * e) ** 2 + 1j * center * e)
        return branch_sqrt(k) / sqrt(2.0 * pi * mass) * ft
    af = a_coeff(t1)
    ag = a_coeff(t2)
    numeric = np.sum(np.conj(af) * ag) * dk
    # closed form: delta part is the Gaussian pair integral
    delta_part = sqrt(pi) * width * np.exp(-((t1 - t2) ** 2) / (4.0 * width**2))
    # PV part via the cross-correlation h(u) = (f* star g)(u)
    u = np.linspace(1e-9, 16.0 * width + abs(t1 - t2), 40001)
    # h peaks at u = t1 - t2: shifting g backward by the separation
    # maximizes its overlap with f
    h_plus = sqrt(pi) * width * np.exp(-((u - (t1 - t2)) ** 2) / (4.0 * width**2))
    h_minus = sqrt(pi) * width * np.exp(-((u + (t1 - t2)) ** 2) / (4.0 * width**2))
    pv = np.trapezoid((h_plus - h_minus) / u, u)
    closed = delta_part - 1j / pi * pv
    return complex(numeric), complex(closed)


def _apply_chain(grid: Grid1D, vals: np.ndarray, d: np.ndarray,
                 mass: float) -> np.ndarray:
    """-m D x D applied to momentum-space values, x spectral."""
    inner = momentum_to_position(grid, d * vals)
    inner = grid.x * inner
    return -mass * d * position_to_momentum(grid, inner)


def apply_regularized_toa(psi_tilde: WaveFunction, cutoff: CutoffProfile,
                          mass: float = 1.0) -> WaveFunction:
    """T_A' psi in the momentum representation.

    T_A' is the Hermitian part of -m D x D with D = O(k)/s(k): the
    half-sum of the D chain and its conjugate chain.  (The anti-Hermitian
    part of the raw product is a pure grid artifact of the k < 0 branch
    phase; symmetrizing restores Hermiticity without touching the k > 0
    action.)
    """
    if psi_tilde.rep != "momentum":
        raise ToaError("apply_regularized_toa expects a momentum-space state")
    grid = psi_tilde.grid
    d = cutoff.values(grid.k) / np.where(grid.k == 0.0, 1.0, branch_sqrt(grid.k))
    d[grid.k == 0.0] = 0.0
    term1 = _apply_chain(grid, psi_tilde.values, d, mass)
    term2 = _apply_chain(grid, psi_tilde.values, np.conj(d), mass)
    return WaveFunction(grid, 0.5 * (term1 + term2), "momentum")


def toa_matrix(grid: Grid1D, cutoff: CutoffProfile, mass: float = 1.0) -> np.ndarray:
    """Dense momentum-representation matrix of T_A' (exactly Hermitian)."""
    eye = np.eye(grid.n, dtype=complex)
    # columns of the momentum->position map
    m2p = momentum_to_position(grid, eye).T
    p2m = position_to_momentum(grid, eye).T
    x_mom = p2m @ (grid.x[:, None] * m2p)
    d = cutoff.values(grid.k) / np.where(grid.k == 0.0, 1.0, branch_sqrt(grid.k))
    d[grid.k == 0.0] = 0.0
    raw = -mass * (d[:, None] * x_mom * d[None, :])
    rawc = -mass * (np.conj(d)[:, None] * x_mom * np.conj(d)[None, :])
    return 0.5 * (raw + rawc)


def commutator_expectation(psi_tilde: WaveFunction, cutoff: CutoffProfile,
                           mass: float = 1.0) -> complex:
    """<psi| [T_A', H] |psi> evaluated spectrally.

    The operator identity gives -i <O(k)^2>; on states supported where
    O = 1 this reduces to -i <O> = -i.
    """
    if psi_tilde.rep != "momentum":
        raise ToaError("commutator_expectation expects a momentum-space state")
    grid = psi_tilde.grid
    e = 0.5 * grid.k**2 / mass
    t_psi = apply_regularized_toa(psi_tilde, cutoff, mass).values
    h_psi = e * psi_tilde.values
    t_h_psi = apply_regularized_toa(
        WaveFunction(grid, h_psi, "momentum"), cutoff, mass).values
    h_t_psi = e * t_psi
    return complex(np.sum(np.conj(psi_tilde.values) * (t_h_psi - h_t_psi)) * grid.dk)


def toa_drift(psi_tilde: WaveFunction, cutoff: CutoffProfile, times,
              mass: float = 1.0):
    """Heisenberg arrival estimate t + <T_A'>_t along free evolution.

    Returns (closed_form, evolved): the closed form is
    <T_A'>_0 + t * (1 - <O^2>), the evolved values recompute <T_A'> on
    the exactly evolved state at each time.  For an exactly conjugate
    operator the estimate would be constant; the drift slope
    1 - <O^2> is the constancy violation bought by the regularization.
    """
    if psi_tilde.rep != "momentum":
        raise ToaError("toa_drift expects a momentum-space state")
    times = np.asarray(times, dtype=float)
    grid = psi_tilde.grid
    norm = psi_tilde.norm_sq()
    if norm <= 0.0:
        raise ToaError("empty state")
    e = 0.5 * grid.k**2 / mass
    o2 = cutoff.values(grid.k) ** 2
    dens = np.abs(psi_tilde.values) ** 2 * grid.dk / norm
    mean_o2 = float(np.sum(o2 * dens))

    def t_expect(vals):
        tv = apply_regularized_toa(
            WaveFunction(grid, vals, "momentum"), cutoff, mass).values
        return float(np.real(np.sum(np.conj(vals) * tv) * grid.dk / norm))

    t0 = t_expect(psi_tilde.values)
    closed = t0 + times * (1.0 - mean_o2)
    evolved = np.array([
        t + t_expect(psi_tilde.values * np.exp(-1j * e * t)) for t in times])
    return closed, evolved


def energy_shift_kick(psi_tilde: WaveFunction, q: float, cutoff: CutoffProfile,
                      mass: float = 1.0) -> WaveFunction:
    """Impulsive arrival-time measurement kick exp(-i q T_A').

    Requires the state to live where O = 1 (inside-cutoff weight below
    1e-6): there T_A' generates energy translations, so the outgoing
    energy distribution is the incoming one shifted up by q.  The
    exponential is evaluated through the eigendecomposition of the dense
    Hermitian matrix, hence exactly unitary on the grid.
    """
    if psi_tilde.rep != "momentum":
        raise ToaError("energy_shift_kick expects a momentum-space state")
    if cutoff.inside_weight(psi_tilde) / max(psi_tilde.norm_sq(), 1e-300) > 1e-6:
        raise ToaError("state has weight inside the cutoff region")
    mat = toa_matrix(psi_tilde.grid, cutoff, mass)
    lam, vecs = np.linalg.eigh(mat)
    coeff = vecs.conj().T @ psi_tilde.values
    out = vecs @ (np.exp(-1j * q * lam) * coeff)
    return WaveFunction(psi_tilde.grid, out, "momentum")


@dataclass(frozen=True)
class CoherentToaSpec:
    """Gaussian superposition of right-moving arrival eigenstates."""

    t0: float
    delta: float

    def __post_init__(self):
        if self.delta <= 0.0:
            raise ToaError("delta must be positive")


def coherent_toa_state(grid: Grid1D, spec: CoherentToaSpec,
                       mass: float = 1.0) -> WaveFunction:
    """Normalized state integral dT exp(-(T-T0)^2/(2 Delta^2)) |T>, k > 0.

    In closed form psi(k) = theta(k) sqrt(k) exp(-Delta^2 E^2 / 2
    + i T0 E) with E = k^2/2m, so the energy density is the positive
    half of a Gaussian of width 1/Delta and the mean energy is
    1/(Delta sqrt(pi)).
    """
    k = grid.k
    e = 0.5 * k**2 / mass
    vals = np.where(k > 0.0,
                    np.sqrt(np.abs(k)) * np.exp(-0.5 * (spec.delta * e) ** 2),
                    0.0).astype(complex)
    vals = vals * np.exp(1j * spec.t0 * e)
    nrm = np.sum(np.abs(vals) ** 2) * grid.dk
    if nrm <= 0.0:
        raise ToaError("grid cannot hold the coherent state")
    vals /= np.sqrt(nrm)
    # resolution check: the energy Gaussian must be contained
    if np.abs(vals[np.argmax(np.abs(k))]) > 1e-6:
        raise ToaError("grid cannot resolve energies of order 1/delta")
    return WaveFunction(grid, vals, "momentum")


def eigenstate_trigger_experiment(spec: CoherentToaSpec, delta_t: float,
                                  grid: Grid1D, mass: float = 1.0,
                                  alpha: float | None = None) -> float:
    """Detection probability of a coherent arrival state by a spin clock.

    Each momentum component scatters independently off the trigger, so
    the long-time detection probability is the flux average of the
    stationary detection over the state's energy distribution.  alpha
    None means the opaque trigger limit.
    """
    from .scattering import gaussian_clock_detection

    psi = coherent_toa_state(grid, spec, mass)
    k = grid.k
    sel = k > 0.0
    dens = np.abs(psi.values[sel]) ** 2 * grid.dk
    dens /= np.sum(dens)
    e = 0.5 * k[sel] ** 2 / mass
    vals = np.array([
        gaussian_clock_detection(mass, ek, delta_t, alpha=alpha) if ek > 0 else 0.0
        for ek in e])
    return float(np.sum(dens * vals))
