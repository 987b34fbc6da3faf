"""Closed-form scattering amplitudes for the trigger/clock detector models.

Three stationary problems are solved here:

* an N-fold repeated spin trigger (flip probability 1 - 2**-N),
* a point detector that couples a spin trigger to a linear clock, i.e.

      H = P^2/(2m) + (alpha/2) (1 + sigma_x) delta(x)
          + (1/2) (1 + sigma_z) p,

  restricted to one clock-momentum sector p (the clock term is then just
  a constant energy offset p on the spin-up channel), and
* a "booster" detector that hides the clock energy cost behind a step,

      H = P^2/(2m) + alpha sigma_x delta(x) + (W/2) theta(x) (1 + sigma_z)
          + (1/2) [V1 theta(-x) - V2 theta(x)] (1 - sigma_z).

All amplitudes follow from continuity plus the derivative-jump condition
psi'(0+) - psi'(0-) = 2 m C psi(0) for a coupling matrix C delta(x).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

__all__ = [
    "ScatterError",
    "TriggerClockParams",
    "ChannelWavevectors",
    "ScatterAmplitudes",
    "BoosterParams",
    "BoosterAmplitudes",
    "trigger_flip_probability",
    "clock_scatter",
    "clock_scatter_limit",
    "detection_probability",
    "gaussian_clock_detection",
    "booster_scatter",
]


class ScatterError(ValueError):
    """Invalid kinematics (closed channels, bad parameters)."""


def trigger_flip_probability(n_spins: int) -> float:
    """Probability that a chain of n independent point triggers, each
    prepared along +z and rotated into the x basis by the crossing,
    ends with at least one flipped spin: 1 - 2**-n."""
    if n_spins < 1:
        raise ScatterError("need at least one trigger spin")
    return 1.0 - 0.5**n_spins


@dataclass(frozen=True)
class TriggerClockParams:
    """Parameters of one clock-momentum sector of the trigger+clock model.

    e_k is the incident kinetic energy in the spin-up channel; p is the
    clock momentum carried by that sector (the spin-down channel then
    propagates with kinetic energy e_k + p).
    """

    mass: float
    alpha: float
    e_k: float
    p: float = 0.0

    def __post_init__(self):
        if self.mass <= 0:
            raise ScatterError("mass must be positive")
        if self.alpha < 0:
            raise ScatterError("alpha must be non-negative")
        if self.e_k <= 0:
            raise ScatterError("incident kinetic energy must be positive")
        if self.e_k + self.p <= 0:
            raise ScatterError("spin-down channel is closed (e_k + p <= 0)")


@dataclass(frozen=True)
class ChannelWavevectors:
    k_up: float
    k_down: float

    @staticmethod
    def from_params(params: TriggerClockParams) -> "ChannelWavevectors":
        return ChannelWavevectors(
            k_up=sqrt(2.0 * params.mass * params.e_k),
            k_down=sqrt(2.0 * params.mass * (params.e_k + params.p)),
        )


@dataclass(frozen=True)
class ScatterAmplitudes:
    """Outgoing amplitudes for unit spin-up flux incident from the left.

    phi_r_* live on x > 0 (phi_r_up is the full transmitted amplitude),
    phi_l_* on x < 0 (reflected; the incident wave e^{i k_up x} has unit
    amplitude).  Flux conservation reads

        k_up (|phi_l_up|^2 + |phi_r_up|^2)
        + k_down (|phi_l_down|^2 + |phi_r_down|^2) = k_up.
    """

    wavevectors: ChannelWavevectors
    phi_r_up: complex
    phi_r_down: complex
    phi_l_up: complex
    phi_l_down: complex

    def flux_residual(self) -> float:
        k1, k2 = self.wavevectors.k_up, self.wavevectors.k_down
        out = k1 * (abs(self.phi_l_up) ** 2 + abs(self.phi_r_up) ** 2)
        out += k2 * (abs(self.phi_l_down) ** 2 + abs(self.phi_r_down) ** 2)
        return float(abs(out - k1) / k1)


def clock_scatter(params: TriggerClockParams) -> ScatterAmplitudes:
    """Exact delta-coupling amplitudes for one clock-momentum sector.

    Derived from continuity and the jump condition with coupling matrix
    (alpha/2)(1 + sigma_x).  With u = 2 i k_up / (m alpha) and
    r = k_up / k_down:

        phi_r_up   = (u - r) / (u - (1 + r))
        phi_r_down = r (phi_r_up - 1) = phi_l_down
        phi_l_up   = phi_r_up - 1

    (The reflected up amplitude multiplies e^{-i k_up x}; the incident
    wave has unit amplitude.)
    """
    kv = ChannelWavevectors.from_params(params)
    r = kv.k_up / kv.k_down
    if params.alpha == 0.0:
        return ScatterAmplitudes(kv, 1.0 + 0j, 0j, 0j, 0j)
    u = 2j * kv.k_up / (params.mass * params.alpha)
    phi_r_up = (u - r) / (u - (1.0 + r))
    phi_r_down = r * (phi_r_up - 1.0)
    return ScatterAmplitudes(kv, phi_r_up, phi_r_down, phi_r_up - 1.0, phi_r_down)


def clock_scatter_limit(mass: float, e_k: float, p: float = 0.0) -> ScatterAmplitudes:
    """alpha -> infinity limit of clock_scatter.

    |phi_r_up| = |phi_r_down| = k_up / (k_up + k_down)
               = sqrt(e_k) / (sqrt(e_k) + sqrt(e_k + p)),
    with phi_r_down = -phi_r_up (the relative sign follows from the
    matching conditions; taking u -> 0 above gives phi_r_up > 0).
    """
    kv = ChannelWavevectors.from_params(TriggerClockParams(mass, 1.0, e_k, p))
    a = kv.k_up / (kv.k_up + kv.k_down)
    return ScatterAmplitudes(kv, a + 0j, -a + 0j, a - 1.0 + 0j, -a + 0j)


def detection_probability(amps: ScatterAmplitudes) -> float:
    """Total probability that the trigger ends spin-down (flux weighted):

        P = (k_down / k_up) (|phi_r_down|^2 + |phi_l_down|^2).

    In the hard-trigger limit this is 2 k_up k_down / (k_up + k_down)^2,
    which decays like 2 sqrt(e_k / p) for p >> e_k.
    """
    k1, k2 = amps.wavevectors.k_up, amps.wavevectors.k_down
    return float((k2 / k1) * (abs(amps.phi_r_down) ** 2 + abs(amps.phi_l_down) ** 2))


def gaussian_clock_detection(
    mass: float,
    e_k: float,
    delta_t: float,
    alpha: float | None = None,
    n_nodes: int = 400,
) -> float:
    """Detection probability averaged over a Gaussian clock spectrum.

    The clock pointer is a Gaussian of width delta_t, so its momentum
    density is a Gaussian of standard deviation 1/delta_t.  Sectors with
    p <= -e_k have a closed spin-down channel and contribute zero.
    alpha=None means the hard-trigger limit.
    """
    if delta_t <= 0:
        raise ScatterError("delta_t must be positive")
    sigma_p = 1.0 / delta_t
    # 12-sigma symmetric window, trapezoid quadrature; the integrand is
    # smooth except for the closed-channel cutoff at p = -e_k.
    p = np.linspace(-12.0 * sigma_p, 12.0 * sigma_p, n_nodes)
    w = np.exp(-(p**2) / (2.0 * sigma_p**2)) / (sqrt(2.0 * np.pi) * sigma_p)
    vals = np.zeros_like(p)
    for i, pi in enumerate(p):
        if e_k + pi <= 0.0:
            continue
        if alpha is None:
            amps = clock_scatter_limit(mass, e_k, pi)
        else:
            amps = clock_scatter(TriggerClockParams(mass, alpha, e_k, pi))
        vals[i] = detection_probability(amps)
    return float(np.trapezoid(vals * w, p))


@dataclass(frozen=True)
class BoosterParams:
    """Booster detector parameters.

    Incident spin-up from the left with energy e, 0 < e < w_step and
    e < v1, so the only open outgoing channel is spin-down on the right
    with wavenumber sqrt(2 m (e + v2))."""

    mass: float
    alpha: float
    e: float
    w_step: float
    v1: float
    v2: float

    def __post_init__(self):
        if self.mass <= 0:
            raise ScatterError("mass must be positive")
        if not 0.0 < self.e < self.w_step:
            raise ScatterError("need 0 < e < w_step (up channel closed on the right)")
        if self.e >= self.v1:
            raise ScatterError("need e < v1 (down channel closed on the left)")
        if self.e + self.v2 <= 0:
            raise ScatterError("down channel closed on the right")


@dataclass(frozen=True)
class BoosterAmplitudes:
    """Matching solution of the booster model.

    r: reflected spin-up amplitude (e^{-i k_in x}, x < 0)
    t: transmitted spin-down amplitude (e^{i k_out x}, x > 0)
    b: evanescent spin-down amplitude on the left (e^{kappa_left x})
    c: evanescent spin-up amplitude on the right (e^{-kappa_right x})
    """

    k_in: float
    k_out: float
    kappa_left: float
    kappa_right: float
    r: complex
    t: complex
    b: complex
    c: complex

    def flux_residual(self) -> float:
        out = abs(self.r) ** 2 + (self.k_out / self.k_in) * abs(self.t) ** 2
        return float(abs(out - 1.0))

    def detection_probability(self) -> float:
        return float((self.k_out / self.k_in) * abs(self.t) ** 2)


def booster_scatter(params: BoosterParams) -> BoosterAmplitudes:
    """Solve the 4 matching conditions of the booster model.

    Continuity gives c = 1 + r and b = t; the sigma_x delta coupling adds
    the derivative jumps

        -kappa_right c - i k_in (1 - r) = 2 m alpha t   (up row)
        i k_out t - kappa_left b        = 2 m alpha c   (down row)

    which reduce to a 2x2 linear system for (r, t).
    """
    m = params.mass
    k_in = sqrt(2.0 * m * params.e)
    k_out = sqrt(2.0 * m * (params.e + params.v2))
    kap_l = sqrt(2.0 * m * (params.v1 - params.e))
    kap_r = sqrt(2.0 * m * (params.w_step - params.e))
    g = 2.0 * m * params.alpha
    # r (i k_in - kap_r) - g t = i k_in + kap_r
    # -g r + t (i k_out - kap_l) = g
    a11 = 1j * k_in - kap_r
    a12 = -g
    a21 = -g
    a22 = 1j * k_out - kap_l
    det = a11 * a22 - a12 * a21
    b1 = 1j * k_in + kap_r
    b2 = g
    r = (b1 * a22 - a12 * b2) / det
    t = (a11 * b2 - b1 * a21) / det
    return BoosterAmplitudes(k_in, k_out, kap_l, kap_r, r, t, t, 1.0 + r)
