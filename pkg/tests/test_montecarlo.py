"""Campaign engine: determinism, stubbed outage composition, sweeps, heatmaps."""

import dataclasses
import math

import numpy as np
import pytest

from vlcbc import rng
from vlcbc.config import parse_config
from vlcbc.fbl import (combine_outage, dispersion_awgn, dispersion_vlc,
                       effective_rate, effective_sinr, fbl_rate)
from vlcbc.geometry import Point3
from vlcbc.montecarlo import (CampaignConfig, DB_FLOOR, apply_axis,
                              apply_override, compute_heatmap, evaluate_point,
                              nominal_coverage_radius, run_campaign, run_drop,
                              run_sweep, wilson_interval)
from vlcbc.rf_link import bc_snr, pathloss_los_db, pathloss_nlos_db

# single coaxial LED chain, frozen before the build
COAX_GAIN = 0.0159154943091895
COAX_IDC = 0.119366207318922
COAX_IAC = 0.0596831036594608
COAX_VOC = 0.464942667661572
COAX_PH = 0.0416238321446277
COAX_SINR = 5.99668713090317e14


def table1(**sections):
    return parse_config(dict(sections))


def single_led_cfg(**extra):
    raw = {
        "scenario": {"led_xy_m": [[5.0, 5.0]], "dedicated_led_index": 0},
        "rf": {"shadowing": False},
    }
    for sec, kv in extra.items():
        raw.setdefault(sec, {}).update(kv)
    return parse_config(raw)


def stats_tuple(s):
    return (s.p_out_vlc, s.p_out_bc, s.p_out_overall, s.p_out_analytic,
            s.avg_rate, s.mean_harvested_power, s.wilson_ci_95, s.n_drops)


class TestWilson:
    def test_clamps_exact(self):
        assert wilson_interval(0, 1000)[0] == 0.0
        assert wilson_interval(1000, 1000)[1] == 1.0

    def test_contains_point_estimate(self):
        for k, n in ((3, 10), (28, 100), (977, 12345)):
            lo, hi = wilson_interval(k, n)
            assert lo <= k / n <= hi
            assert 0.0 <= lo < hi <= 1.0

    def test_width_shrinks_like_sqrt_n(self):
        w1 = np.diff(wilson_interval(280, 1000))[0]
        w2 = np.diff(wilson_interval(2800, 10000))[0]
        assert w1 / w2 == pytest.approx(math.sqrt(10), rel=0.2)

    def test_domain(self):
        with pytest.raises(ValueError):
            wilson_interval(5, 0)
        with pytest.raises(ValueError):
            wilson_interval(11, 10)


class TestDropSampling:
    def test_nominal_radius_table1(self):
        assert nominal_coverage_radius(table1()) == pytest.approx(
            math.sqrt(3.0), rel=1e-12)

    def test_run_drop_deterministic(self):
        cfg = table1()
        a = run_drop(cfg, drop_index=7)
        b = run_drop(cfg, drop_index=7)
        assert a.bd_position == b.bd_position
        assert a.ue_position == b.ue_position
        assert np.array_equal(a.gains, b.gains)
        assert a.sinr_vlc == b.sinr_vlc and a.snr_bc == b.snr_bc
        assert a.assessment == b.assessment
        c = run_drop(cfg, drop_index=8)
        assert c.bd_position != a.bd_position

    def test_positions_in_bounds(self):
        cfg = table1()
        r = nominal_coverage_radius(cfg)
        for i in range(50):
            d = run_drop(cfg, drop_index=i)
            assert math.hypot(d.bd_position.x - 5.0,
                              d.bd_position.y - 5.0) <= r + 1e-12
            assert 0.0 <= d.ue_position.x <= 10.0
            assert 0.0 <= d.ue_position.y <= 10.0
            assert d.bd_normal == (0.0, 0.0, 1.0)

    def test_tilt_toward_led_aims_at_dedicated(self):
        cfg = table1(montecarlo={"bd_tilt_deg": 30.0,
                                 "tilt_azimuth": "toward-led"})
        d = run_drop(cfg, drop_index=3)
        nx, ny, nz = d.bd_normal
        assert nz == pytest.approx(math.cos(math.radians(30.0)), rel=1e-12)
        tox = 5.0 - d.bd_position.x
        toy = 5.0 - d.bd_position.y
        assert nx * toy - ny * tox == pytest.approx(0.0, abs=1e-12)
        assert nx * tox + ny * toy >= 0.0

    def test_tilt_fixed_azimuth(self):
        cfg = table1(montecarlo={"bd_tilt_deg": 20.0, "tilt_azimuth": "fixed",
                                 "tilt_azimuth_deg": 90.0})
        d = run_drop(cfg)
        assert d.bd_normal[0] == pytest.approx(0.0, abs=1e-12)
        assert d.bd_normal[1] == pytest.approx(math.sin(math.radians(20.0)),
                                               rel=1e-12)

    def test_tilt_random_unit_norm(self):
        cfg = table1(montecarlo={"bd_tilt_deg": 45.0})
        for i in range(10):
            n = run_drop(cfg, drop_index=i).bd_normal
            assert math.hypot(math.hypot(n[0], n[1]), n[2]) == pytest.approx(1.0)
            assert n[2] == pytest.approx(math.cos(math.radians(45.0)))


class TestEvaluatePoint:
    def test_coaxial_chain(self):
        cfg = single_led_cfg()
        res = evaluate_point(cfg, Point3(5.0, 5.0, 1.5), Point3(8.0, 5.0, 1.5))
        assert res.gains[0] == pytest.approx(COAX_GAIN, rel=1e-12)
        assert res.i_dc == pytest.approx(COAX_IDC, rel=1e-12)
        assert res.i_ac == pytest.approx(COAX_IAC, rel=1e-12)
        assert res.v_oc == pytest.approx(COAX_VOC, rel=1e-12)
        assert res.p_harvest == pytest.approx(COAX_PH, rel=1e-12)
        assert res.sinr_vlc == pytest.approx(COAX_SINR, rel=1e-9)

    def test_coaxial_radio_hop(self):
        cfg = single_led_cfg()
        res = evaluate_point(cfg, Point3(5.0, 5.0, 1.5), Point3(8.0, 5.0, 1.5))
        assert res.dist_forward == pytest.approx(1.5, rel=1e-12)
        assert res.dist_back == pytest.approx(3.0, rel=1e-12)
        # both hops are inside the certain-LoS range of the open profile
        pl_f = pathloss_los_db(1.5, 2.45, 0.0)
        pl_b = pathloss_los_db(3.0, 2.45, 0.0)
        assert res.pl_forward_db == pytest.approx(pl_f, rel=1e-12)
        assert res.pl_back_db == pytest.approx(pl_b, rel=1e-12)
        assert res.los_forward == 1.0 and res.los_back == 1.0
        assert res.snr_bc == pytest.approx(
            bc_snr(COAX_IAC, pl_f, pl_b, cfg.rf), rel=1e-9)

    def test_coaxial_rates_recompose(self):
        cfg = single_led_cfg()
        res = evaluate_point(cfg, Point3(5.0, 5.0, 1.5), Point3(8.0, 5.0, 1.5))
        gp = effective_sinr(res.sinr_vlc)
        want_v = effective_rate(fbl_rate(gp, dispersion_vlc(gp), cfg.fbl), cfg.fbl)
        want_b = effective_rate(
            fbl_rate(res.snr_bc, dispersion_awgn(res.snr_bc), cfg.fbl), cfg.fbl)
        assert res.rate_vlc == pytest.approx(want_v, rel=1e-12)
        assert res.rate_bc == pytest.approx(want_b, rel=1e-12)
        a = res.assessment
        assert a.outage_overall == (a.outage_vlc or a.outage_bc)
        assert not a.outage_vlc and not a.outage_bc

    def test_bernoulli_los_states(self):
        cfg = single_led_cfg(rf={"pathloss_mode": "bernoulli"})
        res = evaluate_point(cfg, Point3(5.0, 5.0, 1.5), Point3(8.0, 5.0, 1.5),
                             los_uniforms=(0.5, 0.9999))
        assert res.los_forward == 1.0   # Pr = 1 inside 5 m, any draw is LoS
        assert res.los_back == 1.0
        cfg2 = single_led_cfg(rf={"pathloss_mode": "bernoulli",
                                  "environment": "mixed"})
        res2 = evaluate_point(cfg2, Point3(5.0, 5.0, 1.5), Point3(8.0, 5.0, 1.5),
                              los_uniforms=(0.5, 0.9999))
        assert res2.los_back == 0.0
        assert res2.pl_back_db == pytest.approx(
            pathloss_nlos_db(3.0, 2.45, 0.0, 0.0), rel=1e-12)


def bernoulli_stub(p_vlc, p_bc):
    def drop_fn(seed, idx):
        a = rng.uniform(seed, idx, 20) < p_vlc
        b = rng.uniform(seed, idx, 21) < p_bc
        return a, b, np.ones_like(a, dtype=float)
    return drop_fn


class TestCampaign:
    def test_stub_composition_near_independent_product(self):
        cfg = table1()
        n = 100000
        stats = run_campaign(cfg, n_drops=n, seed=5,
                             drop_fn=bernoulli_stub(0.1, 0.2))
        se = math.sqrt(0.28 * 0.72 / n)
        assert abs(stats.p_out_overall - 0.28) < 3 * se
        assert stats.p_out_analytic == combine_outage(stats.p_out_vlc,
                                                      stats.p_out_bc)

    def test_stub_or_identity_bit_exact(self):
        n = 100000
        stats = run_campaign(table1(), n_drops=n, seed=5,
                             drop_fn=bernoulli_stub(0.1, 0.2))
        idx = np.arange(n, dtype=np.uint64)
        a = rng.uniform(5, idx, 20) < 0.1
        b = rng.uniform(5, idx, 21) < 0.2
        assert stats.p_out_vlc == np.count_nonzero(a) / n
        assert stats.p_out_bc == np.count_nonzero(b) / n
        assert stats.p_out_overall == np.count_nonzero(a | b) / n
        assert stats.mean_harvested_power == 1.0
        assert stats.avg_rate == (1.0 - stats.p_out_overall) * 1e4

    def test_chunking_covers_every_index_once(self):
        seen = []

        def spy(seed, idx):
            seen.append(np.asarray(idx))
            z = np.zeros(len(idx), dtype=bool)
            return z, z, np.zeros(len(idx))

        n = 16384 + 257
        run_campaign(table1(), n_drops=n, seed=1, drop_fn=spy)
        assert [len(c) for c in seen] == [16384, 257]
        assert np.array_equal(np.concatenate(seen), np.arange(n, dtype=np.uint64))

    def test_thread_count_invariance(self, monkeypatch):
        cfg = table1()
        monkeypatch.delenv("VLCBC_THREADS", raising=False)
        base = run_campaign(cfg, n_drops=40000, seed=2)
        for t in ("1", "4", "7"):
            monkeypatch.setenv("VLCBC_THREADS", t)
            assert stats_tuple(run_campaign(cfg, n_drops=40000, seed=2)) \
                == stats_tuple(base)

    def test_thread_env_validation(self, monkeypatch):
        monkeypatch.setenv("VLCBC_THREADS", "many")
        with pytest.raises(ValueError):
            run_campaign(table1(), n_drops=10, seed=1)

    def test_physics_campaign_repeatable_and_bounded(self):
        cfg = table1()
        a = run_campaign(cfg, n_drops=2000, seed=9)
        b = run_campaign(cfg, n_drops=2000, seed=9)
        assert stats_tuple(a) == stats_tuple(b)
        assert 0.0 <= a.p_out_overall <= 1.0
        assert 0.0 <= a.avg_rate <= cfg.fbl.rate_threshold_rth
        lo, hi = a.wilson_ci_95
        assert lo <= a.p_out_overall <= hi
        assert a.mean_harvested_power > 0.0

    def test_seed_changes_results(self):
        cfg = table1()
        a = run_campaign(cfg, n_drops=2000, seed=1)
        b = run_campaign(cfg, n_drops=2000, seed=2)
        assert stats_tuple(a) != stats_tuple(b)


class TestSweep:
    def test_single_value_matches_campaign(self):
        cfg = table1()
        camp = CampaignConfig(n_drops=1500, seed=4, sweep_axis="bd_height",
                              sweep_values=(1.4,))
        [(v, st)] = run_sweep(cfg, camp)
        assert v == 1.4
        direct = run_campaign(apply_axis(cfg, "bd_height", 1.4), 1500, 4)
        assert stats_tuple(st) == stats_tuple(direct)

    def test_axis_none_runs_once(self):
        cfg = table1()
        out = run_sweep(cfg, CampaignConfig(n_drops=500, seed=3))
        assert len(out) == 1 and out[0][0] is None

    def test_overrides_apply_before_sweep(self):
        cfg = table1()
        camp = CampaignConfig(n_drops=800, seed=6, sweep_axis="bd_height",
                              sweep_values=(1.5,),
                              overrides=(("rf.environment", "mixed"),))
        [(_, st)] = run_sweep(cfg, camp)
        want = run_campaign(apply_override(cfg, "rf.environment", "mixed"),
                            800, 6)
        assert stats_tuple(st) == stats_tuple(want)

    def test_apply_axis_units(self):
        cfg = table1()
        assert apply_axis(cfg, "bd_height", 1.2).scenario.bd_height == 1.2
        assert apply_axis(cfg, "bd_orientation", 30.0).bd_tilt == pytest.approx(
            math.radians(30.0))
        assert apply_axis(cfg, "fov", 40.0).scenario.fov_semi_angle_psi \
            == pytest.approx(math.radians(40.0))
        assert apply_axis(cfg, "code_rate", 0.9).fbl.code_rate_rc == 0.9
        assert apply_axis(cfg, "rate_threshold", 2e4).fbl.rate_threshold_rth == 2e4
        assert apply_axis(cfg, "none", None) is cfg
        with pytest.raises(ValueError):
            apply_axis(cfg, "tilt", 1.0)

    def test_campaign_config_validation(self):
        with pytest.raises(ValueError):
            CampaignConfig(n_drops=0, seed=1)
        with pytest.raises(ValueError):
            CampaignConfig(n_drops=10, seed=1, sweep_axis="bogus")
        with pytest.raises(ValueError):
            CampaignConfig(n_drops=10, seed=1, sweep_axis="fov")


class TestHeatmap:
    def test_shape_and_centers(self):
        grid = compute_heatmap(table1())
        assert grid.values.shape == (50, 50)
        assert grid.x_centers[0] == pytest.approx(0.1)
        assert grid.y_centers[-1] == pytest.approx(9.9)
        odd = compute_heatmap(table1(), resolution=2.7)
        assert odd.values.shape == (27, 27)

    def test_normalized_peak_is_one(self):
        for metric in ("vlc_sinr_db", "harvested_power", "bc_snr_db"):
            grid = compute_heatmap(table1(), metric=metric, normalization="max")
            assert float(grid.values.max()) == 1.0
            assert float(grid.values.min()) >= 0.0

    def test_mirror_symmetries(self):
        for metric in ("vlc_sinr_db", "harvested_power"):
            v = compute_heatmap(table1(), metric=metric).values
            assert np.max(np.abs(v - v[::-1, :])) <= 1e-9
            assert np.max(np.abs(v - v[:, ::-1])) <= 1e-9
            assert np.max(np.abs(v - v.T)) <= 1e-9

    def test_uncovered_corner_floors(self):
        grid = compute_heatmap(table1(), metric="vlc_sinr_db",
                               normalization="none")
        # corner cell center (0.1, 0.1) is ~2.69 m lateral from the nearest
        # LED, outside the 1.73 m coverage disc
        assert grid.values[0, 0] == DB_FLOOR
        assert grid.values[25, 25] > 100.0

    def test_harvested_peak_grows_with_height(self):
        peaks = [compute_heatmap(table1(), metric="harvested_power",
                                 normalization="none", bd_height=h).values.max()
                 for h in (1.3, 1.5, 1.7)]
        assert peaks[0] < peaks[1] < peaks[2]

    def test_outage_metric_binary(self):
        grid = compute_heatmap(table1(), metric="outage", normalization="none",
                               resolution=2.0)
        assert set(np.unique(grid.values)) <= {0.0, 1.0}
        assert grid.values[0, 0] == 1.0   # uncovered cell cannot make rate

    def test_validation(self):
        with pytest.raises(ValueError):
            compute_heatmap(table1(), metric="luminance")
        with pytest.raises(ValueError):
            compute_heatmap(table1(), normalization="log")
        with pytest.raises(ValueError):
            compute_heatmap(table1(), resolution=0.0)

    def test_height_override_only_affects_values(self):
        g = compute_heatmap(table1(), bd_height=1.3)
        assert g.bd_height == 1.3
        assert g.values.shape == (50, 50)


class TestOverride:
    def test_nested_and_top_level(self):
        cfg = table1()
        c2 = apply_override(cfg, "fbl.code_rate_rc", 1.0)
        assert c2.fbl.code_rate_rc == 1.0 and cfg.fbl.code_rate_rc == 0.75
        c3 = apply_override(cfg, "seed", 77)
        assert c3.seed == 77

    def test_replace_keeps_frozen_semantics(self):
        cfg = table1()
        c2 = dataclasses.replace(cfg, bd_tilt=0.1)
        assert cfg.bd_tilt == 0.0 and c2.bd_tilt == 0.1
