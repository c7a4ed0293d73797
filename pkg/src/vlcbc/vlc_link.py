"""First-hop optical channel: DC gain, photocurrents, and interference-limited SINR.

All LEDs radiate the same DC optical power eta_eo * i_bias; the dedicated
LED additionally carries the OOK data signal whose zero-mean swing is
+-s_max/2 about the bias.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import DevicePose, LedAp, Scenario, link_geometry

SINR_CONVENTIONS = ("first-power", "squared")
INTERFERENCE_MODES = ("concurrent", "tdm-clean")


@dataclass(frozen=True)
class VlcParams:
    """Optical front-end constants, linear units."""

    area_pd: float          # photodetector area, m^2
    eta_eo: float           # electro-optic conversion, W/A
    eta_oe: float           # photodetector responsivity, A/W
    i_bias: float           # LED bias current, A
    i_min: float            # lower rail of the linear LED region, A
    i_max: float            # upper rail, A
    bandwidth_b: float      # Hz
    noise_psd_n0: float     # W/Hz, linear
    mod_depth_mode: str = "symmetric-ook"
    sinr_convention: str = "first-power"
    interference_mode: str = "concurrent"

    def __post_init__(self):
        for name in ("area_pd", "eta_eo", "eta_oe", "i_bias", "bandwidth_b", "noise_psd_n0"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.i_min < 0:
            raise ValueError("i_min must be nonnegative")
        if not self.i_min <= self.i_bias <= self.i_max:
            raise ValueError("i_bias must lie in [i_min, i_max]")
        if self.mod_depth_mode != "symmetric-ook":
            raise ValueError("mod_depth_mode must be 'symmetric-ook'")
        if self.sinr_convention not in SINR_CONVENTIONS:
            raise ValueError("sinr_convention must be 'first-power' or 'squared'")
        if self.interference_mode not in INTERFERENCE_MODES:
            raise ValueError("interference_mode must be 'concurrent' or 'tdm-clean'")

    @property
    def s_max(self) -> float:
        """Peak OOK swing allowed by the linear region around the bias."""
        return min(self.i_bias - self.i_min, self.i_max - self.i_bias)

    @property
    def noise_power(self) -> float:
        return self.noise_psd_n0 * self.bandwidth_b


@dataclass(frozen=True)
class VlcLinkState:
    """Per-drop optical quantities."""

    gains_h: np.ndarray     # per-LED DC channel gains
    sinr: float             # linear
    i_ac_amp: float         # A, dedicated-LED AC amplitude at the PD output
    i_dc: float             # A, total DC photocurrent from all LEDs


# ===== operations =====

def gain_from_geometry(d, cos_phi, cos_psi, nu, area_pd, cos_fov):
    """Lambertian LoS DC gain; zero outside the receiver field of view."""
    with np.errstate(invalid="ignore"):
        g = (nu + 1.0) * area_pd / (2.0 * np.pi * d * d) * cos_phi**nu * cos_psi
    return np.where(cos_psi >= cos_fov, g, 0.0)


def channel_dc_gain(led: LedAp, bd: DevicePose, params: VlcParams, psi_fov: float) -> float:
    """DC gain of one LED/BD optical link."""
    p, q = led.position, bd.position
    dx, dy, dz = p.x - q.x, p.y - q.y, p.z - q.z
    d, cos_phi, cos_psi = link_geometry(dx, dy, dz, *bd.normal)
    if d == 0.0:
        raise ValueError("degenerate link: zero distance")
    if cos_phi <= 0.0:
        raise ValueError("irradiance angle must be below pi/2 (LED above BD)")
    g = gain_from_geometry(d, cos_phi, cos_psi, led.lambertian_index_nu,
                           params.area_pd, math.cos(psi_fov))
    return float(g)


def all_gains(scenario: Scenario, bd: DevicePose, params: VlcParams) -> np.ndarray:
    return np.array(
        [channel_dc_gain(led, bd, params, scenario.fov_semi_angle_psi)
         for led in scenario.leds]
    )


def dc_photocurrent_from_gains(gains, params: VlcParams):
    """I_DC = eta_oe * sum_i eta_eo * H_i * i_bias over all LEDs."""
    total = np.sum(gains, axis=0)
    return params.eta_oe * params.eta_eo * params.i_bias * total


def dc_photocurrent(scenario: Scenario, bd: DevicePose, params: VlcParams) -> float:
    return float(dc_photocurrent_from_gains(all_gains(scenario, bd, params), params))


def ac_signal_amplitude(dedicated_gain, params: VlcParams):
    """AC photocurrent amplitude for zero-mean OOK of swing s_max."""
    return params.eta_oe * params.eta_eo * dedicated_gain * (params.s_max / 2.0)


def sinr_from_gains(gains, dedicated_index: int, params: VlcParams):
    """SINR of the dedicated LED's signal over co-channel light plus noise.

    `gains` has the per-LED axis first and broadcasts over trailing axes.
    The default convention ratios the received amplitudes directly;
    `squared` uses electrical (current-squared) powers instead.
    """
    gains = np.asarray(gains, dtype=float)
    p_led = params.eta_eo * params.i_bias
    amp = params.eta_oe * p_led * gains        # per-LED received amplitude
    sig = amp[dedicated_index]
    n0b = params.noise_power
    if params.sinr_convention == "first-power":
        interf = np.sum(amp, axis=0) - sig
        num = sig
    else:
        interf = np.sum(amp * amp, axis=0) - sig * sig
        num = sig * sig
    if params.interference_mode == "tdm-clean":
        interf = np.zeros_like(interf)
    return num / (interf + n0b)


def vlc_sinr(scenario: Scenario, bd: DevicePose, params: VlcParams) -> float:
    return float(sinr_from_gains(all_gains(scenario, bd, params),
                                 scenario.dedicated_led_index, params))
