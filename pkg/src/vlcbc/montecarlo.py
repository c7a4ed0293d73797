"""Drop sampling, campaign execution, parameter sweeps, and heatmap grids.

Drops are independent work items indexed by a counter; all randomness comes
from (seed, drop_index, slot) so any chunking or thread count reproduces the
same numbers. Aggregation reduces fixed-size chunks in index order, which
keeps float sums bit-identical as well.
"""

from __future__ import annotations

import dataclasses
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import rng
from .config import SimulationConfig
from .energy_harvest import harvested_power, open_circuit_voltage
from .fbl import (FblAssessment, combine_outage, dispersion_awgn,
                  dispersion_vlc, effective_rate, effective_sinr, fbl_rate,
                  outage)
from .geometry import Point3, coverage_radius, disc_xy, link_geometry
from .rf_link import bc_snr, mixed_pathloss_db
from .vlc_link import (ac_signal_amplitude, dc_photocurrent_from_gains,
                       gain_from_geometry, sinr_from_gains)

WILSON_Z95 = 1.959963984540054

SWEEP_AXES = ("bd_height", "bd_orientation", "fov", "code_rate",
              "rate_threshold", "none")

# chunk size is part of the determinism contract: float reductions happen
# per chunk and then in chunk order, independent of the worker count
_CHUNK = 16384


@dataclass(frozen=True)
class CampaignConfig:
    """Sweep request: axis values in boundary units (degrees, meters, bit/s)."""

    n_drops: int
    seed: int
    sweep_axis: str = "none"
    sweep_values: tuple = ()
    overrides: tuple = ()   # ((field_path, value), ...) in internal units

    def __post_init__(self):
        if self.n_drops < 1:
            raise ValueError("n_drops must be >= 1")
        if self.sweep_axis not in SWEEP_AXES:
            raise ValueError(f"sweep_axis must be one of {', '.join(SWEEP_AXES)}")
        if self.sweep_axis != "none" and not self.sweep_values:
            raise ValueError("sweep_values must be nonempty for a swept axis")


@dataclass(frozen=True)
class CampaignStats:
    p_out_vlc: float
    p_out_bc: float
    p_out_overall: float
    p_out_analytic: float        # independence composition of the marginals
    avg_rate: float              # (1 - p_out_overall) * R_th
    mean_harvested_power: float
    wilson_ci_95: tuple          # (lo, hi) on p_out_overall
    n_drops: int


@dataclass(frozen=True)
class HeatmapGrid:
    metric: str
    resolution: float            # cells per meter
    values: np.ndarray           # [ix, iy], x/y cell centers at (i + 0.5)/res
    normalization: str
    bd_height: float

    @property
    def x_centers(self) -> np.ndarray:
        return (np.arange(self.values.shape[0]) + 0.5) / self.resolution

    @property
    def y_centers(self) -> np.ndarray:
        return (np.arange(self.values.shape[1]) + 0.5) / self.resolution


@dataclass(frozen=True)
class DropResult:
    bd_position: Point3
    ue_position: Point3
    bd_normal: tuple
    gains: np.ndarray
    sinr_vlc: float
    i_dc: float
    i_ac: float
    v_oc: float
    p_harvest: float
    dist_forward: float
    dist_back: float
    pl_forward_db: float
    pl_back_db: float
    los_forward: float
    los_back: float
    snr_bc: float
    rate_vlc: float
    rate_bc: float
    assessment: FblAssessment


def wilson_interval(k: int, n: int, z: float = WILSON_Z95) -> tuple:
    """Wilson score interval for a binomial proportion."""
    if n < 1 or not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n, n >= 1")
    p = k / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2.0 * n)) / denom
    half = z * math.sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom
    lo = 0.0 if k == 0 else max(0.0, center - half)
    hi = 1.0 if k == n else min(1.0, center + half)
    return (lo, hi)


def nominal_coverage_radius(cfg: SimulationConfig) -> float:
    """Dedicated-disc radius for an untilted BD; the drop sampling region."""
    led = cfg.scenario.dedicated_led
    return coverage_radius(led.position.z, cfg.scenario.bd_height, 0.0,
                           cfg.scenario.fov_semi_angle_psi)


def _thread_count() -> int:
    raw = os.environ.get("VLCBC_THREADS", "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise ValueError("VLCBC_THREADS must be an integer") from exc
    return max(1, n)


# ===== drop pipeline =====

def _evaluate(cfg: SimulationConfig, bx, by, bz, ux, uy, uz, nx, ny, nz,
              z_fwd_los, z_fwd_nlos, z_back_los, z_back_nlos,
              u_los_fwd, u_los_back) -> dict:
    """Vectorized pipeline from explicit positions/draws to outage flags."""
    sc = cfg.scenario
    vlc = cfg.vlc
    cos_fov = math.cos(sc.fov_semi_angle_psi)

    gains = np.empty((len(sc.leds),) + np.broadcast(bx, by).shape)
    for k, led in enumerate(sc.leds):
        p = led.position
        d, cos_phi, cos_psi = link_geometry(p.x - bx, p.y - by, p.z - bz,
                                            nx, ny, nz)
        gains[k] = gain_from_geometry(d, cos_phi, cos_psi,
                                      led.lambertian_index_nu,
                                      vlc.area_pd, cos_fov)

    sinr = sinr_from_gains(gains, sc.dedicated_led_index, vlc)
    i_dc = dc_photocurrent_from_gains(gains, vlc)
    i_ac = ac_signal_amplitude(gains[sc.dedicated_led_index], vlc)
    v_oc = open_circuit_voltage(i_dc, cfg.energy)
    p_h = harvested_power(i_dc, cfg.energy)

    rfs = sc.rfs_position
    d_f2 = np.hypot(rfs.x - bx, rfs.y - by)
    d_f3 = np.sqrt(d_f2 * d_f2 + (rfs.z - bz) ** 2)
    d_b2 = np.hypot(bx - ux, by - uy)
    d_b3 = np.sqrt(d_b2 * d_b2 + (bz - uz) ** 2)
    pl_f, los_f = mixed_pathloss_db(d_f3, d_f2, cfg.rf.carrier_freq_fc, cfg.rf,
                                    z_fwd_los, z_fwd_nlos, u_los_fwd)
    pl_b, los_b = mixed_pathloss_db(d_b3, d_b2, cfg.rf.carrier_freq_fc, cfg.rf,
                                    z_back_los, z_back_nlos, u_los_back)
    snr = bc_snr(i_ac, pl_f, pl_b, cfg.rf)

    g_prime = effective_sinr(sinr)
    r_vlc = effective_rate(fbl_rate(g_prime, dispersion_vlc(g_prime), cfg.fbl),
                           cfg.fbl)
    r_bc = effective_rate(fbl_rate(snr, dispersion_awgn(snr), cfg.fbl), cfg.fbl)
    rth = cfg.fbl.rate_threshold_rth
    o_v = outage(r_vlc, rth)
    o_b = outage(r_bc, rth)

    return {
        "gains": gains, "sinr": sinr, "i_dc": i_dc, "i_ac": i_ac,
        "v_oc": v_oc, "p_h": p_h,
        "d_f3": d_f3, "d_b3": d_b3,
        "pl_f": pl_f, "pl_b": pl_b, "los_f": los_f, "los_b": los_b,
        "snr": snr, "r_vlc": r_vlc, "r_bc": r_bc,
        "o_v": np.asarray(o_v), "o_b": np.asarray(o_b),
    }


def _sample_chunk(cfg: SimulationConfig, seed: int, idx: np.ndarray) -> dict:
    """Draw every slot for each drop index and run the pipeline.

    The slot order is fixed; modes that ignore a draw still consume it, so
    adding a sweep or toggling shadowing never perturbs other quantities.
    """
    sc = cfg.scenario
    u_rad = rng.uniform(seed, idx, rng.SLOT_BD_RADIUS)
    u_ang = rng.uniform(seed, idx, rng.SLOT_BD_ANGLE)
    u_x = rng.uniform(seed, idx, rng.SLOT_UE_X)
    u_y = rng.uniform(seed, idx, rng.SLOT_UE_Y)
    u_lf = rng.uniform(seed, idx, rng.SLOT_LOS_FORWARD)
    u_lb = rng.uniform(seed, idx, rng.SLOT_LOS_BACK)
    z_fl = rng.standard_normal(seed, idx, rng.SLOT_SHADOW_FWD_LOS)
    z_fn = rng.standard_normal(seed, idx, rng.SLOT_SHADOW_FWD_NLOS)
    z_bl = rng.standard_normal(seed, idx, rng.SLOT_SHADOW_BACK_LOS)
    z_bn = rng.standard_normal(seed, idx, rng.SLOT_SHADOW_BACK_NLOS)
    u_az = rng.uniform(seed, idx, rng.SLOT_TILT_AZIMUTH)

    ded = sc.dedicated_led.position
    # the BD always lands in the untilted disc; tilting re-orients the
    # device, not the deployment region
    bx, by = disc_xy(u_rad, u_ang, ded.x, ded.y, nominal_coverage_radius(cfg))
    ux = sc.room_w * u_x
    uy = sc.room_l * u_y

    tilt = cfg.bd_tilt
    if tilt == 0.0:
        nx = ny = np.zeros_like(bx)
        nz = np.ones_like(bx)
    else:
        if cfg.tilt_azimuth_mode == "random":
            az = 2.0 * np.pi * u_az
        elif cfg.tilt_azimuth_mode == "toward-led":
            az = np.arctan2(ded.y - by, ded.x - bx)
        else:
            az = np.full_like(bx, cfg.tilt_azimuth)
        nx = math.sin(tilt) * np.cos(az)
        ny = math.sin(tilt) * np.sin(az)
        nz = np.full_like(bx, math.cos(tilt))

    out = _evaluate(cfg, bx, by, sc.bd_height, ux, uy, sc.ue_height,
                    nx, ny, nz, z_fl, z_fn, z_bl, z_bn, u_lf, u_lb)
    out.update(bx=bx, by=by, ux=ux, uy=uy, nx=nx, ny=ny, nz=nz)
    return out


def run_drop(cfg: SimulationConfig, drop_index: int = 0,
             seed: int | None = None) -> DropResult:
    """Single-drop diagnostic: full pipeline state for one (seed, index)."""
    s = cfg.seed if seed is None else seed
    idx = np.asarray([drop_index], dtype=np.uint64)
    o = _sample_chunk(cfg, s, idx)
    return _to_drop_result(cfg, o, 0)


def evaluate_point(cfg: SimulationConfig, bd_position: Point3,
                   ue_position: Point3, bd_normal: tuple = (0.0, 0.0, 1.0),
                   shadow_draws: tuple = (0.0, 0.0, 0.0, 0.0),
                   los_uniforms: tuple = (None, None)) -> DropResult:
    """Deterministic pipeline at explicit positions (no sampling).

    shadow_draws are the four standard-normal shadowing inputs
    (forward LoS/NLoS, back LoS/NLoS); los_uniforms feed the Bernoulli
    LoS states when that mode is active.
    """
    one = np.asarray([1.0])
    nx, ny, nz = (float(c) * one for c in bd_normal)
    z = [np.asarray([float(v)]) for v in shadow_draws]
    u = [None if v is None else np.asarray([float(v)]) for v in los_uniforms]
    o = _evaluate(cfg,
                  bd_position.x * one, bd_position.y * one, bd_position.z,
                  ue_position.x * one, ue_position.y * one, ue_position.z,
                  nx, ny, nz, z[0], z[1], z[2], z[3], u[0], u[1])
    o.update(bx=bd_position.x * one, by=bd_position.y * one,
             ux=ue_position.x * one, uy=ue_position.y * one,
             nx=nx, ny=ny, nz=nz)
    return _to_drop_result(cfg, o, 0, bd_z=bd_position.z, ue_z=ue_position.z)


def _to_drop_result(cfg: SimulationConfig, o: dict, i: int,
                    bd_z: float | None = None,
                    ue_z: float | None = None) -> DropResult:
    sc = cfg.scenario
    o_v = bool(o["o_v"][i])
    o_b = bool(o["o_b"][i])
    return DropResult(
        bd_position=Point3(float(o["bx"][i]), float(o["by"][i]),
                           sc.bd_height if bd_z is None else bd_z),
        ue_position=Point3(float(o["ux"][i]), float(o["uy"][i]),
                           sc.ue_height if ue_z is None else ue_z),
        bd_normal=(float(o["nx"][i]), float(o["ny"][i]), float(o["nz"][i])),
        gains=o["gains"][:, i].copy(),
        sinr_vlc=float(o["sinr"][i]),
        i_dc=float(o["i_dc"][i]),
        i_ac=float(o["i_ac"][i]),
        v_oc=float(o["v_oc"][i]),
        p_harvest=float(o["p_h"][i]),
        dist_forward=float(o["d_f3"][i]),
        dist_back=float(o["d_b3"][i]),
        pl_forward_db=float(o["pl_f"][i]),
        pl_back_db=float(o["pl_b"][i]),
        los_forward=float(o["los_f"][i]) if np.ndim(o["los_f"]) else float(o["los_f"]),
        los_back=float(o["los_b"][i]) if np.ndim(o["los_b"]) else float(o["los_b"]),
        snr_bc=float(o["snr"][i]),
        rate_vlc=float(o["r_vlc"][i]),
        rate_bc=float(o["r_bc"][i]),
        assessment=FblAssessment(
            rate_vlc=float(o["r_vlc"][i]), rate_bc=float(o["r_bc"][i]),
            outage_vlc=o_v, outage_bc=o_b, outage_overall=o_v or o_b,
        ),
    )


# ===== campaigns =====

def run_campaign(cfg: SimulationConfig, n_drops: int | None = None,
                 seed: int | None = None, drop_fn=None) -> CampaignStats:
    """Empirical outage and rate statistics over n_drops.

    drop_fn, when given, replaces the physics: it maps (seed, index array)
    to (outage_vlc, outage_bc, harvested_power) arrays and everything else
    (OR, counts, intervals) still flows through the same reduction.
    """
    n = cfg.n_drops if n_drops is None else int(n_drops)
    s = cfg.seed if seed is None else seed
    if n < 1:
        raise ValueError("n_drops must be >= 1")

    bounds = [(lo, min(lo + _CHUNK, n)) for lo in range(0, n, _CHUNK)]

    def work(b):
        idx = np.arange(b[0], b[1], dtype=np.uint64)
        if drop_fn is None:
            o = _sample_chunk(cfg, s, idx)
            o_v, o_b, p_h = o["o_v"], o["o_b"], o["p_h"]
        else:
            o_v, o_b, p_h = drop_fn(s, idx)
        o_all = np.logical_or(o_v, o_b)
        return (int(np.count_nonzero(o_v)), int(np.count_nonzero(o_b)),
                int(np.count_nonzero(o_all)), float(np.sum(p_h)))

    workers = _thread_count()
    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(work, bounds))
    else:
        parts = [work(b) for b in bounds]

    k_v = k_b = k_all = 0
    sum_ph = 0.0
    for pv, pb, pa, sp in parts:     # chunk order fixes the float reduction
        k_v += pv
        k_b += pb
        k_all += pa
        sum_ph += sp

    p_v, p_b, p_all = k_v / n, k_b / n, k_all / n
    return CampaignStats(
        p_out_vlc=p_v,
        p_out_bc=p_b,
        p_out_overall=p_all,
        p_out_analytic=combine_outage(p_v, p_b),
        avg_rate=(1.0 - p_all) * cfg.fbl.rate_threshold_rth,
        mean_harvested_power=sum_ph / n,
        wilson_ci_95=wilson_interval(k_all, n),
        n_drops=n,
    )


def apply_axis(cfg: SimulationConfig, axis: str, value) -> SimulationConfig:
    """New config with one swept parameter replaced (boundary units in)."""
    if axis == "none":
        return cfg
    if axis == "bd_height":
        sc = dataclasses.replace(cfg.scenario, bd_height=float(value))
        return dataclasses.replace(cfg, scenario=sc)
    if axis == "bd_orientation":
        return dataclasses.replace(cfg, bd_tilt=math.radians(float(value)))
    if axis == "fov":
        sc = dataclasses.replace(cfg.scenario,
                                 fov_semi_angle_psi=math.radians(float(value)))
        return dataclasses.replace(cfg, scenario=sc)
    if axis == "code_rate":
        fb = dataclasses.replace(cfg.fbl, code_rate_rc=float(value))
        return dataclasses.replace(cfg, fbl=fb)
    if axis == "rate_threshold":
        fb = dataclasses.replace(cfg.fbl, rate_threshold_rth=float(value))
        return dataclasses.replace(cfg, fbl=fb)
    raise ValueError(f"sweep axis must be one of {', '.join(SWEEP_AXES)}")


def apply_override(cfg: SimulationConfig, path: str, value) -> SimulationConfig:
    """Replace one dataclass field by dotted path, e.g. 'rf.environment'."""
    section, _, field = path.partition(".")
    if not field:
        return dataclasses.replace(cfg, **{section: value})
    inner = dataclasses.replace(getattr(cfg, section), **{field: value})
    return dataclasses.replace(cfg, **{section: inner})


def run_sweep(cfg: SimulationConfig, campaign: CampaignConfig,
              drop_fn=None) -> list:
    """One campaign per axis value, same seed each time so the random
    placements are common across values and curves differ only through the
    swept parameter."""
    for path, value in campaign.overrides:
        cfg = apply_override(cfg, path, value)
    values = campaign.sweep_values if campaign.sweep_axis != "none" else (None,)
    out = []
    for v in values:
        c = cfg if v is None else apply_axis(cfg, campaign.sweep_axis, v)
        out.append((v, run_campaign(c, campaign.n_drops, campaign.seed,
                                    drop_fn=drop_fn)))
    return out


# ===== heatmaps =====

# floor for unnormalized dB maps at cells no LED covers (finite for CSV)
DB_FLOOR = -300.0


def compute_heatmap(cfg: SimulationConfig, metric: str | None = None,
                    resolution: float | None = None,
                    normalization: str | None = None,
                    bd_height: float | None = None) -> HeatmapGrid:
    """Deterministic metric grid over the room at cell centers.

    The BD sits upright at each cell; the serving LED is the covering one
    with the largest DC gain. SNR/outage metrics place the UE at the room
    center with shadowing off and expected path loss, so maps stay
    placement-free. `max` normalization divides linear-domain values by the
    grid maximum (dB metrics are normalized in the linear domain and the
    uncovered floor is 0).
    """
    metric = cfg.heatmap_metric if metric is None else metric
    res = cfg.heatmap_resolution if resolution is None else float(resolution)
    norm = cfg.heatmap_normalization if normalization is None else normalization
    h = cfg.scenario.bd_height if bd_height is None else float(bd_height)
    if res <= 0:
        raise ValueError("resolution must be positive")
    if metric not in ("vlc_sinr_db", "harvested_power", "bc_snr_db", "outage"):
        raise ValueError(f"unknown heatmap metric: {metric}")
    if norm not in ("none", "max"):
        raise ValueError("normalization must be 'none' or 'max'")

    sc = cfg.scenario
    n_x = math.ceil(sc.room_w * res)
    n_y = math.ceil(sc.room_l * res)
    xs = (np.arange(n_x) + 0.5) / res
    ys = (np.arange(n_y) + 0.5) / res
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    bx = gx.ravel()
    by = gy.ravel()

    vlc = cfg.vlc
    cos_fov = math.cos(sc.fov_semi_angle_psi)
    gains = np.empty((len(sc.leds), bx.size))
    for k, led in enumerate(sc.leds):
        p = led.position
        d, cos_phi, cos_psi = link_geometry(p.x - bx, p.y - by, p.z - h,
                                            0.0, 0.0, 1.0)
        gains[k] = gain_from_geometry(d, cos_phi, cos_psi,
                                      led.lambertian_index_nu,
                                      vlc.area_pd, cos_fov)

    serving = np.argmax(gains, axis=0)
    covered = np.take_along_axis(gains, serving[None, :], axis=0)[0] > 0.0

    if metric == "harvested_power":
        lin = np.asarray(harvested_power(
            dc_photocurrent_from_gains(gains, vlc), cfg.energy))
    else:
        # serving-LED SINR: evaluate each LED as the dedicated one, gather
        per_led = np.stack([sinr_from_gains(gains, k, vlc)
                            for k in range(len(sc.leds))])
        sinr = np.take_along_axis(per_led, serving[None, :], axis=0)[0]
        sinr = np.where(covered, sinr, 0.0)
        if metric == "vlc_sinr_db":
            lin = sinr
        else:
            # radio metrics: upright BD per cell, UE pinned at room center,
            # deterministic path loss
            rfd = dataclasses.replace(cfg.rf, shadowing=False,
                                      pathloss_mode="expected")
            i_ac = ac_signal_amplitude(
                np.take_along_axis(gains, serving[None, :], axis=0)[0], vlc)
            rfs = sc.rfs_position
            d_f2 = np.hypot(rfs.x - bx, rfs.y - by)
            d_f3 = np.sqrt(d_f2 * d_f2 + (rfs.z - h) ** 2)
            cx, cy = sc.room_w / 2.0, sc.room_l / 2.0
            d_b2 = np.hypot(bx - cx, by - cy)
            d_b3 = np.sqrt(d_b2 * d_b2 + (h - sc.ue_height) ** 2)
            zero = np.zeros_like(bx)
            pl_f, _ = mixed_pathloss_db(d_f3, d_f2, rfd.carrier_freq_fc, rfd,
                                        zero, zero)
            pl_b, _ = mixed_pathloss_db(d_b3, d_b2, rfd.carrier_freq_fc, rfd,
                                        zero, zero)
            snr = np.where(covered, bc_snr(i_ac, pl_f, pl_b, rfd), 0.0)
            if metric == "bc_snr_db":
                lin = snr
            else:
                g_prime = effective_sinr(sinr)
                r_v = effective_rate(
                    fbl_rate(g_prime, dispersion_vlc(g_prime), cfg.fbl), cfg.fbl)
                r_b = effective_rate(
                    fbl_rate(snr, dispersion_awgn(snr), cfg.fbl), cfg.fbl)
                rth = cfg.fbl.rate_threshold_rth
                lin = np.logical_or(outage(r_v, rth),
                                    outage(r_b, rth)).astype(float)

    if norm == "max":
        peak = float(np.max(lin))
        vals = lin / peak if peak > 0.0 else np.zeros_like(lin)
    elif metric in ("vlc_sinr_db", "bc_snr_db"):
        with np.errstate(divide="ignore"):
            vals = np.where(lin > 0.0, 10.0 * np.log10(np.maximum(lin, 1e-300)),
                            DB_FLOOR)
        vals = np.maximum(vals, DB_FLOOR)
    else:
        vals = lin

    return HeatmapGrid(metric=metric, resolution=res,
                       values=vals.reshape(n_x, n_y), normalization=norm,
                       bd_height=h)
