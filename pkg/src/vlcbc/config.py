"""Configuration loading and validation.

Configs are JSON with nested sections (scenario, vlc, energy, rf, fbl,
system, montecarlo, heatmap). Human-facing units live here: dB / dBm / dBi,
degrees, meters. Everything is converted to linear / radians when the
parameter objects are built. Missing keys fall back to the default profile
below; unknown keys are rejected with their full path.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass
from typing import Any

from .energy_harvest import EnergyParams
from .fbl import FblParams
from .geometry import LedAp, Point3, Scenario
from .rng import ALGORITHM_ID
from .rf_link import ENVIRONMENTS, PATHLOSS_MODES, RfParams
from .vlc_link import INTERFERENCE_MODES, SINR_CONVENTIONS, VlcParams

TILT_AZIMUTH_MODES = ("random", "toward-led", "fixed")
HEATMAP_METRICS = ("vlc_sinr_db", "harvested_power", "bc_snr_db", "outage")
NORMALIZATIONS = ("none", "max")

DEFAULTS: dict[str, dict[str, Any]] = {
    "scenario": {
        "room_width_m": 10.0,
        "room_length_m": 10.0,
        "led_height_m": 2.5,
        "bd_height_m": 1.5,
        "rfs_height_m": 3.0,
        "ue_height_m": 1.5,
        "led_xy_m": [
            [2.0, 2.0], [5.0, 2.0], [8.0, 2.0],
            [2.0, 5.0], [5.0, 5.0], [8.0, 5.0],
            [2.0, 8.0], [5.0, 8.0], [8.0, 8.0],
        ],
        "dedicated_led_index": 4,
        "rfs_xy_m": [5.0, 5.0],
        "led_semi_angle_deg": 60.0,
        "fov_semi_angle_deg": 60.0,
    },
    "vlc": {
        "pd_area_m2": 0.05,
        "eta_eo": 20.0,
        "eta_oe": 0.5,
        "bias_current_a": 0.75,
        "min_current_a": 0.0,
        "max_current_a": 1.5,
        "sinr_convention": "first-power",
        "interference_mode": "concurrent",
    },
    "energy": {
        "fill_factor": 0.75,
        "thermal_voltage_v": 0.025,
        "dark_current_a": 1.0e-9,
    },
    "rf": {
        "carrier_power_dbm": 23.0,
        "carrier_freq_ghz": 2.45,
        "gain_tx_dbi": 8.0,
        "gain_rx_dbi": 3.0,
        "gain_bd_dbi": 1.5,
        "pol_mismatch_forward": 0.5,
        "pol_mismatch_back": 0.5,
        "mod_factor": 0.5,
        "object_penalty_db": 0.0,
        "sigma_los_db": 3.0,
        "sigma_nlos_db": 8.03,
        "environment": "open",
        "pathloss_mode": "expected",
        "shadowing": True,
    },
    "fbl": {
        "blocklength_u": 64,
        "target_error_eps": 1.0e-3,
        "code_rate": 0.75,
        "rate_threshold_bps": 1.0e4,
        "code_rate_scaling": True,
    },
    "system": {
        "bandwidth_hz": 5.0e4,
        "noise_psd_dbm_hz": -174.0,
        "drop_duration_s": 1.0,
        "rng_algorithm": ALGORITHM_ID,
    },
    "montecarlo": {
        "n_drops": 100000,
        "seed": 1,
        "bd_tilt_deg": 0.0,
        "tilt_azimuth": "random",
        "tilt_azimuth_deg": 0.0,
    },
    "heatmap": {
        "resolution_cells_per_m": 5.0,
        "metric": "vlc_sinr_db",
        "normalization": "max",
        "bd_heights_m": [1.3, 1.5, 1.7],
    },
}


class ConfigError(ValueError):
    """Raised on parse or validation failure; message carries the field path."""


@dataclass(frozen=True)
class SimulationConfig:
    scenario: Scenario
    vlc: VlcParams
    energy: EnergyParams
    rf: RfParams
    fbl: FblParams
    n_drops: int
    seed: int
    bd_tilt: float            # rad
    tilt_azimuth_mode: str
    tilt_azimuth: float       # rad, used by the "fixed" mode
    drop_duration: float      # s, converts harvested power to per-drop energy
    heatmap_resolution: float
    heatmap_metric: str
    heatmap_normalization: str
    heatmap_bd_heights: tuple
    snapshot: dict            # merged raw config, boundary units


def _merge(base: dict, override: dict, path: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, val in override.items():
        here = f"{path}{key}"
        if key not in base:
            raise ConfigError(f"unknown config key: {here}")
        if isinstance(base[key], dict):
            if not isinstance(val, dict):
                raise ConfigError(f"{here} must be an object")
            out[key] = _merge(base[key], val, here + ".")
        else:
            out[key] = copy.deepcopy(val)
    return out


def _num(cfg, sec, key, lo=None, hi=None, lo_open=False, hi_open=False):
    val = cfg[sec][key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"{sec}.{key} must be a number")
    v = float(val)
    if not math.isfinite(v):
        raise ConfigError(f"{sec}.{key} must be finite")
    if lo is not None and (v < lo or (lo_open and v == lo)):
        raise ConfigError(f"{sec}.{key} must be {'>' if lo_open else '>='} {lo}")
    if hi is not None and (v > hi or (hi_open and v == hi)):
        raise ConfigError(f"{sec}.{key} must be {'<' if hi_open else '<='} {hi}")
    return v


def _int(cfg, sec, key, lo=None, hi=None):
    val = cfg[sec][key]
    if isinstance(val, bool) or not isinstance(val, int):
        raise ConfigError(f"{sec}.{key} must be an integer")
    if lo is not None and val < lo:
        raise ConfigError(f"{sec}.{key} must be >= {lo}")
    if hi is not None and val > hi:
        raise ConfigError(f"{sec}.{key} must be <= {hi}")
    return val


def _choice(cfg, sec, key, choices):
    val = cfg[sec][key]
    if val not in choices:
        raise ConfigError(f"{sec}.{key} must be one of {', '.join(choices)}")
    return val


def _bool(cfg, sec, key):
    val = cfg[sec][key]
    if not isinstance(val, bool):
        raise ConfigError(f"{sec}.{key} must be true or false")
    return val


def _dbm_to_w(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def _db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def parse_config(raw: dict) -> SimulationConfig:
    """Merge `raw` onto the default profile, validate, and build parameter objects."""
    if not isinstance(raw, dict):
        raise ConfigError("config root must be an object")
    cfg = _merge(DEFAULTS, raw)

    if cfg["system"]["rng_algorithm"] != ALGORITHM_ID:
        raise ConfigError(f"system.rng_algorithm must be {ALGORITHM_ID!r}")

    room_w = _num(cfg, "scenario", "room_width_m", lo=0.0, lo_open=True)
    room_l = _num(cfg, "scenario", "room_length_m", lo=0.0, lo_open=True)
    led_h = _num(cfg, "scenario", "led_height_m", lo=0.0, lo_open=True)
    bd_h = _num(cfg, "scenario", "bd_height_m", lo=0.0)
    rfs_h = _num(cfg, "scenario", "rfs_height_m", lo=0.0)
    ue_h = _num(cfg, "scenario", "ue_height_m", lo=0.0)
    semi = _num(cfg, "scenario", "led_semi_angle_deg", lo=0.0, hi=90.0,
                lo_open=True, hi_open=True)
    fov = _num(cfg, "scenario", "fov_semi_angle_deg", lo=0.0, hi=90.0,
               lo_open=True, hi_open=True)

    led_xy = cfg["scenario"]["led_xy_m"]
    if (not isinstance(led_xy, list) or not led_xy
            or not all(isinstance(p, list) and len(p) == 2 for p in led_xy)):
        raise ConfigError("scenario.led_xy_m must be a nonempty list of [x, y] pairs")
    ded = _int(cfg, "scenario", "dedicated_led_index", lo=0, hi=len(led_xy) - 1)
    rfs_xy = cfg["scenario"]["rfs_xy_m"]
    if not isinstance(rfs_xy, list) or len(rfs_xy) != 2:
        raise ConfigError("scenario.rfs_xy_m must be an [x, y] pair")

    bandwidth = _num(cfg, "system", "bandwidth_hz", lo=0.0, lo_open=True)
    n0_dbm = _num(cfg, "system", "noise_psd_dbm_hz")
    n0 = _dbm_to_w(n0_dbm)

    try:
        leds = tuple(
            LedAp(position=Point3(float(x), float(y), led_h),
                  semi_angle_phi_max=math.radians(semi))
            for x, y in led_xy
        )
        scenario = Scenario(
            room_w=room_w,
            room_l=room_l,
            leds=leds,
            rfs_position=Point3(float(rfs_xy[0]), float(rfs_xy[1]), rfs_h),
            dedicated_led_index=ded,
            bd_height=bd_h,
            ue_height=ue_h,
            fov_semi_angle_psi=math.radians(fov),
        )
    except ValueError as exc:
        raise ConfigError(f"scenario: {exc}") from exc

    try:
        vlc = VlcParams(
            area_pd=_num(cfg, "vlc", "pd_area_m2", lo=0.0, lo_open=True),
            eta_eo=_num(cfg, "vlc", "eta_eo", lo=0.0, lo_open=True),
            eta_oe=_num(cfg, "vlc", "eta_oe", lo=0.0, lo_open=True),
            i_bias=_num(cfg, "vlc", "bias_current_a", lo=0.0, lo_open=True),
            i_min=_num(cfg, "vlc", "min_current_a", lo=0.0),
            i_max=_num(cfg, "vlc", "max_current_a", lo=0.0, lo_open=True),
            bandwidth_b=bandwidth,
            noise_psd_n0=n0,
            sinr_convention=_choice(cfg, "vlc", "sinr_convention", SINR_CONVENTIONS),
            interference_mode=_choice(cfg, "vlc", "interference_mode",
                                      INTERFERENCE_MODES),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"vlc: {exc}") from exc

    try:
        energy = EnergyParams(
            fill_factor=_num(cfg, "energy", "fill_factor", lo=0.0, hi=1.0, lo_open=True),
            thermal_voltage=_num(cfg, "energy", "thermal_voltage_v", lo=0.0, lo_open=True),
            dark_current=_num(cfg, "energy", "dark_current_a", lo=0.0, lo_open=True),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"energy: {exc}") from exc

    try:
        rf = RfParams(
            carrier_power_pc=_dbm_to_w(_num(cfg, "rf", "carrier_power_dbm")),
            carrier_freq_fc=_num(cfg, "rf", "carrier_freq_ghz", lo=0.0, lo_open=True),
            gain_t=_db_to_linear(_num(cfg, "rf", "gain_tx_dbi")),
            gain_r=_db_to_linear(_num(cfg, "rf", "gain_rx_dbi")),
            gain_bd=_db_to_linear(_num(cfg, "rf", "gain_bd_dbi")),
            pol_mismatch_f=_num(cfg, "rf", "pol_mismatch_forward", lo=0.0, hi=1.0, lo_open=True),
            pol_mismatch_b=_num(cfg, "rf", "pol_mismatch_back", lo=0.0, hi=1.0, lo_open=True),
            mod_factor=_num(cfg, "rf", "mod_factor", lo=0.0, hi=1.0, lo_open=True),
            object_penalty=_db_to_linear(_num(cfg, "rf", "object_penalty_db", lo=0.0)),
            sigma_los_db=_num(cfg, "rf", "sigma_los_db", lo=0.0, lo_open=True),
            sigma_nlos_db=_num(cfg, "rf", "sigma_nlos_db", lo=0.0, lo_open=True),
            environment=_choice(cfg, "rf", "environment", ENVIRONMENTS),
            pathloss_mode=_choice(cfg, "rf", "pathloss_mode", PATHLOSS_MODES),
            noise_psd_n0=n0,
            bandwidth_b=bandwidth,
            shadowing=_bool(cfg, "rf", "shadowing"),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"rf: {exc}") from exc

    try:
        fbl = FblParams(
            blocklength_u=_int(cfg, "fbl", "blocklength_u", lo=1),
            target_error_eps=_num(cfg, "fbl", "target_error_eps",
                                  lo=0.0, hi=1.0, lo_open=True, hi_open=True),
            code_rate_rc=_num(cfg, "fbl", "code_rate", lo=0.0, hi=1.0, lo_open=True),
            rate_threshold_rth=_num(cfg, "fbl", "rate_threshold_bps", lo=0.0, lo_open=True),
            bandwidth_b=bandwidth,
            code_rate_scaling=_bool(cfg, "fbl", "code_rate_scaling"),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"fbl: {exc}") from exc

    heights = cfg["heatmap"]["bd_heights_m"]
    if (not isinstance(heights, list) or not heights
            or any(isinstance(h, bool) or not isinstance(h, (int, float)) for h in heights)):
        raise ConfigError("heatmap.bd_heights_m must be a nonempty list of numbers")
    if any(not 0.0 <= float(h) < led_h for h in heights):
        raise ConfigError("heatmap.bd_heights_m values must lie in [0, led_height_m)")

    return SimulationConfig(
        scenario=scenario,
        vlc=vlc,
        energy=energy,
        rf=rf,
        fbl=fbl,
        n_drops=_int(cfg, "montecarlo", "n_drops", lo=1),
        seed=_int(cfg, "montecarlo", "seed", lo=0),
        bd_tilt=math.radians(_num(cfg, "montecarlo", "bd_tilt_deg", lo=-90.0, hi=90.0,
                                  lo_open=True, hi_open=True)),
        tilt_azimuth_mode=_choice(cfg, "montecarlo", "tilt_azimuth", TILT_AZIMUTH_MODES),
        tilt_azimuth=math.radians(_num(cfg, "montecarlo", "tilt_azimuth_deg")),
        drop_duration=_num(cfg, "system", "drop_duration_s", lo=0.0, lo_open=True),
        heatmap_resolution=_num(cfg, "heatmap", "resolution_cells_per_m", lo=0.0, lo_open=True),
        heatmap_metric=_choice(cfg, "heatmap", "metric", HEATMAP_METRICS),
        heatmap_normalization=_choice(cfg, "heatmap", "normalization", NORMALIZATIONS),
        heatmap_bd_heights=tuple(float(h) for h in heights),
        snapshot=cfg,
    )


def load_config(path=None, overrides: dict | None = None) -> SimulationConfig:
    """Read a JSON config (or a run manifest; its `config` block is used) and parse it.

    `overrides` is a nested dict merged on top of the file, letting CLI flags
    patch individual keys.
    """
    raw: dict = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config root must be an object")
        if "config" in raw and "scenario" not in raw:
            # a run manifest; reuse its embedded snapshot
            raw = raw["config"]
            if not isinstance(raw, dict):
                raise ConfigError("manifest config block must be an object")
    if overrides:
        merged: dict = copy.deepcopy(raw)
        for sec, body in overrides.items():
            if isinstance(body, dict):
                merged.setdefault(sec, {})
                if not isinstance(merged[sec], dict):
                    raise ConfigError(f"{sec} must be an object")
                merged[sec].update(body)
            else:
                merged[sec] = body
        raw = merged
    return parse_config(raw)
