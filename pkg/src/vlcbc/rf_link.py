"""Second hop: indoor hotspot path loss with LoS mixing, backscatter link budget.

Path losses follow the InH-Office model (LoS/NLoS branches with lognormal
shadowing, validity 1..150 m); the LoS probability has an `open` and a
`mixed` indoor profile. All gains and powers are linear here; dB conversion
happens at the config boundary.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

ENVIRONMENTS = ("open", "mixed")
PATHLOSS_MODES = ("expected", "bernoulli")

_VALID_D_MIN = 1.0
_VALID_D_MAX = 150.0


@dataclass(frozen=True)
class RfParams:
    carrier_power_pc: float   # W
    carrier_freq_fc: float    # GHz
    gain_t: float             # linear
    gain_r: float             # linear
    gain_bd: float            # linear
    pol_mismatch_f: float     # chi_f
    pol_mismatch_b: float     # chi_b
    mod_factor: float         # M
    object_penalty: float     # Theta, linear (0 dB -> 1)
    sigma_los_db: float
    sigma_nlos_db: float
    environment: str
    pathloss_mode: str
    noise_psd_n0: float       # W/Hz
    bandwidth_b: float        # Hz
    shadowing: bool = True

    def __post_init__(self):
        if self.carrier_power_pc <= 0 or self.carrier_freq_fc <= 0:
            raise ValueError("carrier_power_pc and carrier_freq_fc must be positive")
        for name in ("gain_t", "gain_r", "gain_bd"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        for name in ("pol_mismatch_f", "pol_mismatch_b", "mod_factor"):
            if not 0.0 < getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must be in (0, 1]")
        if self.object_penalty < 1.0:
            raise ValueError("object_penalty must be >= 1 linear (0 dB -> 1)")
        if self.sigma_los_db <= 0 or self.sigma_nlos_db <= 0:
            raise ValueError("sigma_los_db and sigma_nlos_db must be positive")
        if self.environment not in ENVIRONMENTS:
            raise ValueError("environment must be 'open' or 'mixed'")
        if self.pathloss_mode not in PATHLOSS_MODES:
            raise ValueError("pathloss_mode must be 'expected' or 'bernoulli'")
        if self.noise_psd_n0 <= 0 or self.bandwidth_b <= 0:
            raise ValueError("noise_psd_n0 and bandwidth_b must be positive")

    @property
    def noise_power(self) -> float:
        return self.noise_psd_n0 * self.bandwidth_b


@dataclass(frozen=True)
class BcLinkState:
    """Per-drop radio quantities. los_* hold the LoS probability in `expected`
    mode and the drawn boolean state in `bernoulli` mode."""

    pl_forward_db: float
    pl_back_db: float
    los_forward: float
    los_back: float
    snr: float


# ===== path loss =====

def _clamped(d3d):
    d = np.asarray(d3d, dtype=float)
    if np.any(d < _VALID_D_MIN) or np.any(d > _VALID_D_MAX):
        warnings.warn(
            "d3d outside the 1..150 m path-loss validity range; clamping to >= 1 m",
            stacklevel=3,
        )
    return np.maximum(d, _VALID_D_MIN)


def pathloss_los_db(d3d, fc, shadow_db):
    """LoS path loss in dB: 32.4 + 17.3 log10(d) + 20 log10(fc) + shadow."""
    d = _clamped(d3d)
    return 32.4 + 17.3 * np.log10(d) + 20.0 * np.log10(fc) + shadow_db


def pathloss_nlos_db(d3d, fc, shadow_los_db, shadow_nlos_db):
    """NLoS path loss in dB, floored by the LoS expression."""
    d = _clamped(d3d)
    nlos = 17.3 + 38.3 * np.log10(d) + 24.9 * np.log10(fc) + shadow_nlos_db
    return np.maximum(pathloss_los_db(d3d, fc, shadow_los_db), nlos)


def los_probability(d2d, env: str):
    """Distance-dependent LoS probability for the open or mixed indoor profile."""
    d = np.asarray(d2d, dtype=float)
    if np.any(d < 0):
        raise ValueError("d2d must be nonnegative")
    if env == "open":
        pr = np.where(
            d <= 5.0,
            1.0,
            np.where(d <= 49.0, np.exp(-(d - 5.0) / 70.8),
                     0.54 * np.exp(-(d - 49.0) / 211.7)),
        )
    elif env == "mixed":
        pr = np.where(
            d <= 1.2,
            1.0,
            np.where(d <= 6.5, np.exp(-(d - 1.2) / 4.7),
                     0.32 * np.exp(-(d - 6.5) / 32.6)),
        )
    else:
        raise ValueError("env must be 'open' or 'mixed'")
    return pr if pr.ndim else float(pr)


def mixed_pathloss_db(d3d, d2d, fc, params: RfParams, z_los, z_nlos, u_los=None):
    """Path loss with LoS/NLoS handling from explicit draws; broadcasts.

    z_los/z_nlos are standard-normal shadowing draws (ignored when
    params.shadowing is off); u_los is the uniform used for the Bernoulli
    LoS state and may be None in `expected` mode. Returns (pl_db, los)
    where los is the LoS probability or the drawn state per mode.
    """
    sl = params.sigma_los_db * np.asarray(z_los, dtype=float) if params.shadowing else 0.0
    sn = params.sigma_nlos_db * np.asarray(z_nlos, dtype=float) if params.shadowing else 0.0
    pl_los = pathloss_los_db(d3d, fc, sl)
    pl_nlos = pathloss_nlos_db(d3d, fc, sl, sn)
    pr = los_probability(d2d, params.environment)
    if params.pathloss_mode == "expected":
        return pr * pl_los + (1.0 - pr) * pl_nlos, pr
    if u_los is None:
        raise ValueError("bernoulli mode needs a uniform draw for the LoS state")
    los = np.asarray(u_los, dtype=float) < pr
    return np.where(los, pl_los, pl_nlos), los


def expected_pathloss_db(d3d, d2d, fc, params: RfParams, rng):
    """Per-call path loss with fresh shadowing (and LoS state) draws from `rng`.

    Draw order: LoS-state uniform (bernoulli mode only), then the LoS and
    NLoS shadowing normals.
    """
    u = rng.random() if params.pathloss_mode == "bernoulli" else None
    z1, z2 = rng.standard_normal(), rng.standard_normal()
    pl, _ = mixed_pathloss_db(d3d, d2d, fc, params, z1, z2, u)
    return float(pl)


# ===== backscatter budget =====

def backscatter_efficiency(params: RfParams) -> float:
    """xi = chi_f * chi_b * M / Theta^2."""
    return (params.pol_mismatch_f * params.pol_mismatch_b * params.mod_factor
            / params.object_penalty**2)


def bc_snr(i_ac_amp, pl_f_db, pl_b_db, params: RfParams):
    """UE-received backscatter SNR from the dedicated AC amplitude and path losses."""
    i_ac_amp = np.asarray(i_ac_amp, dtype=float)
    if np.any(i_ac_amp < 0):
        raise ValueError("i_ac_amp must be nonnegative")
    loss_f = 10.0 ** (np.asarray(pl_f_db, dtype=float) / 10.0)
    loss_b = 10.0 ** (np.asarray(pl_b_db, dtype=float) / 10.0)
    xi = backscatter_efficiency(params)
    num = (xi * params.gain_t * params.gain_r * params.gain_bd**2
           * i_ac_amp**2 * params.carrier_power_pc)
    return num / (loss_f * loss_b * params.noise_power)
