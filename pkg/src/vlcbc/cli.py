"""Command-line front end: subcommands emit CSV files plus a run manifest.

Numbers are serialized with 9 significant digits. Derived columns are
computed from the rounded values they depend on, so reloading a CSV and
recomputing them reproduces the file byte for byte. A manifest.json written
next to the outputs holds the full config snapshot; feeding the manifest
back through --config reproduces the run.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from datetime import datetime, timezone

from . import __version__
from .config import ConfigError, SimulationConfig, load_config
from .geometry import Point3, coverage_radius
from .montecarlo import (CampaignConfig, compute_heatmap, evaluate_point,
                         nominal_coverage_radius, run_drop, run_sweep)

SWEEP_HEADER = ("axis", "value", "p_out_vlc", "p_out_bc", "p_out_overall",
                "avg_rate_bps", "ci95_lo", "ci95_hi", "n_drops")
HEATMAP_HEADER = ("x_m", "y_m", "value")
DUMP_HEADER = ("name", "unit", "value")


def _fmt(v: float) -> str:
    return f"{float(v):.9g}"


def _write_csv(path: str, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _write_manifest(out_dir: str, command: str, cfg: SimulationConfig,
                    outputs: list) -> str:
    path = os.path.join(out_dir, "manifest.json")
    doc = {
        "tool": "vlcbc",
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "command": command,
        "seed": cfg.seed,
        "config": cfg.snapshot,
        "outputs": outputs,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _overrides_from(args) -> dict:
    ov: dict = {}
    if getattr(args, "seed", None) is not None:
        ov.setdefault("montecarlo", {})["seed"] = args.seed
    if getattr(args, "drops", None) is not None:
        ov.setdefault("montecarlo", {})["n_drops"] = args.drops
    if getattr(args, "env", None):
        ov.setdefault("rf", {})["environment"] = args.env
    if getattr(args, "pathloss", None):
        ov.setdefault("rf", {})["pathloss_mode"] = args.pathloss
    return ov


def _load(args, extra: dict | None = None) -> SimulationConfig:
    ov = _overrides_from(args)
    for sec, body in (extra or {}).items():
        if isinstance(body, dict):
            ov.setdefault(sec, {}).update(body)
        else:
            ov[sec] = body
    return load_config(args.config, ov)


def _ensure_out(args) -> str:
    os.makedirs(args.out, exist_ok=True)
    return args.out


# ===== subcommands =====

def cmd_heatmap(args) -> int:
    extra = {"heatmap": {"metric": args.metric}} if args.metric else None
    cfg = _load(args, extra)
    out_dir = _ensure_out(args)
    outputs = []
    for h in cfg.heatmap_bd_heights:
        grid = compute_heatmap(cfg, bd_height=h)
        name = f"heatmap_{grid.metric}_h{h:g}.csv"
        rows = []
        xs, ys = grid.x_centers, grid.y_centers
        for ix in range(grid.values.shape[0]):
            for iy in range(grid.values.shape[1]):
                rows.append((_fmt(xs[ix]), _fmt(ys[iy]),
                             _fmt(grid.values[ix, iy])))
        _write_csv(os.path.join(out_dir, name), HEATMAP_HEADER, rows)
        led = cfg.scenario.dedicated_led
        radius = coverage_radius(led.position.z, h, 0.0,
                                 cfg.scenario.fov_semi_angle_psi)
        meta = {
            "metric": grid.metric,
            "normalization": grid.normalization,
            "resolution_cells_per_m": grid.resolution,
            "bd_height_m": h,
            "coverage_radius_m": radius,
            "room_w_m": cfg.scenario.room_w,
            "room_l_m": cfg.scenario.room_l,
            "led_xy_m": [[l.position.x, l.position.y] for l in cfg.scenario.leds],
            "dedicated_led_index": cfg.scenario.dedicated_led_index,
        }
        with open(os.path.join(out_dir, name + ".meta.json"), "w",
                  encoding="utf-8") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")
        outputs.append({"path": name, "kind": "heatmap",
                        "metric": grid.metric, "bd_height_m": h,
                        "coverage_radius_m": radius})
        print(f"wrote {name} ({grid.values.shape[0]}x{grid.values.shape[1]} cells)")
    _write_manifest(out_dir, "heatmap", cfg, outputs)
    return 0


def cmd_sweep(args) -> int:
    cfg = _load(args)
    try:
        values = tuple(float(tok) for tok in args.values.split(",") if tok.strip())
    except ValueError:
        print("error: --values must be a comma-separated number list",
              file=sys.stderr)
        return 1
    campaign = CampaignConfig(n_drops=cfg.n_drops, seed=cfg.seed,
                              sweep_axis=args.axis, sweep_values=values)
    results = run_sweep(cfg, campaign)
    out_dir = _ensure_out(args)
    name = f"sweep_{args.axis}_{cfg.rf.environment}.csv"
    rth = cfg.fbl.rate_threshold_rth
    rows = []
    for v, st in results:
        # avg rate is recomputed from the rounded outage so the stored
        # columns stay mutually consistent at 9 significant digits
        p9 = float(_fmt(st.p_out_overall))
        r_th = v if args.axis == "rate_threshold" else rth
        rows.append((args.axis, "" if v is None else _fmt(v),
                     _fmt(st.p_out_vlc), _fmt(st.p_out_bc),
                     _fmt(st.p_out_overall), _fmt((1.0 - p9) * r_th),
                     _fmt(st.wilson_ci_95[0]), _fmt(st.wilson_ci_95[1]),
                     str(st.n_drops)))
    _write_csv(os.path.join(out_dir, name), SWEEP_HEADER, rows)
    outputs = [{"path": name, "kind": "sweep", "axis": args.axis,
                "values": list(values), "environment": cfg.rf.environment,
                "pathloss_mode": cfg.rf.pathloss_mode,
                "code_rate": cfg.fbl.code_rate_rc, "n_drops": cfg.n_drops}]
    _write_manifest(out_dir, "sweep", cfg, outputs)
    print(f"wrote {name} ({len(rows)} rows)")
    return 0


def _dump_rows(cfg: SimulationConfig, res) -> list:
    rows = [
        ("bd_x", "m", _fmt(res.bd_position.x)),
        ("bd_y", "m", _fmt(res.bd_position.y)),
        ("bd_z", "m", _fmt(res.bd_position.z)),
        ("ue_x", "m", _fmt(res.ue_position.x)),
        ("ue_y", "m", _fmt(res.ue_position.y)),
        ("ue_z", "m", _fmt(res.ue_position.z)),
        ("bd_normal_x", "1", _fmt(res.bd_normal[0])),
        ("bd_normal_y", "1", _fmt(res.bd_normal[1])),
        ("bd_normal_z", "1", _fmt(res.bd_normal[2])),
    ]
    for k, g in enumerate(res.gains):
        rows.append((f"gain_led_{k}", "1", _fmt(g)))
    sinr_db = 10.0 * math.log10(res.sinr_vlc) if res.sinr_vlc > 0 else float("-inf")
    rows += [
        ("vlc_sinr", "1", _fmt(res.sinr_vlc)),
        ("vlc_sinr_db", "dB", _fmt(sinr_db)),
        ("i_dc", "A", _fmt(res.i_dc)),
        ("i_ac_amp", "A", _fmt(res.i_ac)),
        ("v_oc", "V", _fmt(res.v_oc)),
        ("harvested_power", "W", _fmt(res.p_harvest)),
        ("harvested_energy", "J", _fmt(res.p_harvest * cfg.drop_duration)),
        ("dist_forward", "m", _fmt(res.dist_forward)),
        ("dist_back", "m", _fmt(res.dist_back)),
        ("pl_forward", "dB", _fmt(res.pl_forward_db)),
        ("pl_back", "dB", _fmt(res.pl_back_db)),
        ("los_forward", "1", _fmt(res.los_forward)),
        ("los_back", "1", _fmt(res.los_back)),
        ("bc_snr", "1", _fmt(res.snr_bc)),
        ("rate_vlc", "bit/s", _fmt(res.rate_vlc)),
        ("rate_bc", "bit/s", _fmt(res.rate_bc)),
        ("outage_vlc", "bool", str(int(res.assessment.outage_vlc))),
        ("outage_bc", "bool", str(int(res.assessment.outage_bc))),
        ("outage_overall", "bool", str(int(res.assessment.outage_overall))),
        ("coverage_radius", "m", _fmt(nominal_coverage_radius(cfg))),
    ]
    return rows


def cmd_drop(args) -> int:
    cfg = _load(args)
    res = run_drop(cfg, drop_index=args.index)
    rows = _dump_rows(cfg, res)
    out_dir = _ensure_out(args)
    _write_csv(os.path.join(out_dir, "drop.csv"), DUMP_HEADER, rows)
    for r in rows:
        print(",".join(r))
    _write_manifest(out_dir, "drop", cfg,
                    [{"path": "drop.csv", "kind": "drop",
                      "drop_index": args.index}])
    return 0


def _parse_xy(text: str, what: str):
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise ConfigError(f"{what} must be 'x,y'")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise ConfigError(f"{what} must be numeric 'x,y'") from exc


def cmd_linkbudget(args) -> int:
    # diagnostic dump: deterministic by construction, so shadowing is
    # disabled and the expected path-loss mixing is forced
    cfg = _load(args, {"rf": {"shadowing": False, "pathloss_mode": "expected"}})
    sc = cfg.scenario
    led = sc.dedicated_led.position
    bx, by = _parse_xy(args.bd, "--bd") if args.bd else (led.x, led.y)
    ux, uy = (_parse_xy(args.ue, "--ue") if args.ue
              else (sc.room_w / 2.0, sc.room_l / 2.0))
    res = evaluate_point(cfg, Point3(bx, by, sc.bd_height),
                         Point3(ux, uy, sc.ue_height))
    rows = _dump_rows(cfg, res)
    out_dir = _ensure_out(args)
    _write_csv(os.path.join(out_dir, "linkbudget.csv"), DUMP_HEADER, rows)
    for r in rows:
        print(",".join(r))
    _write_manifest(out_dir, "linkbudget", cfg,
                    [{"path": "linkbudget.csv", "kind": "linkbudget",
                      "bd_xy_m": [bx, by], "ue_xy_m": [ux, uy]}])
    return 0


# ===== parser =====

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config (or a manifest.json)")
    p.add_argument("--seed", type=int, help="campaign seed")
    p.add_argument("--drops", type=int, help="drops per campaign point")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--env", choices=("open", "mixed"),
                   help="indoor LoS-probability profile")
    p.add_argument("--pathloss", choices=("expected", "bernoulli"),
                   help="LoS/NLoS mixing mode")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="vlcbc",
        description="Dual-hop light-to-backscatter link simulator",
    )
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("heatmap", help="metric grids over the room")
    _common(p)
    p.add_argument("--metric",
                   choices=("vlc_sinr_db", "harvested_power", "bc_snr_db",
                            "outage"))
    p.set_defaults(func=cmd_heatmap)

    p = sub.add_parser("sweep", help="outage/rate campaign over an axis")
    _common(p)
    p.add_argument("--axis", required=True,
                   choices=("bd_height", "bd_orientation", "fov", "code_rate",
                            "rate_threshold", "none"))
    p.add_argument("--values", required=True,
                   help="comma-separated axis values (boundary units)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("drop", help="single-drop pipeline dump")
    _common(p)
    p.add_argument("--index", type=int, default=0, help="drop index")
    p.set_defaults(func=cmd_drop)

    p = sub.add_parser("linkbudget",
                       help="deterministic link budget at fixed positions")
    _common(p)
    p.add_argument("--bd", help="BD position 'x,y' (default: under the dedicated LED)")
    p.add_argument("--ue", help="UE position 'x,y' (default: room center)")
    p.set_defaults(func=cmd_linkbudget)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
