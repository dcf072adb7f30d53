import json

import numpy as np
import pytest

from fieldbench.config import BenchConfig, scenario_from_dict
from fieldbench.geometry import Measurement, build_geometry, relevance_mask
from fieldbench.gridio import read_grid
from fieldbench.harness import (
    bench_csv,
    bench_estimator_cost,
    gen_env,
    loglog_slope,
    run_scenario,
)
from fieldbench.scoring import compute_loss


def scenario(tmp_path=None, **over):
    data = {
        "scenario": {
            "geometry": "miniberry-10",
            "seed": 3,
            "days": 2,
            "steps_per_day": 30,
            "warmup_days": 1,
            "estimation_stride": 10,
        },
        "planner": {"name": "lawnmower"},
        "estimator": {"name": "adaptive-disk"},
    }
    for key, val in over.items():
        table, _, name = key.partition("__")
        if name:
            data.setdefault(table, {})[name] = val
        else:
            data["scenario"][key] = val
    if tmp_path is not None:
        data["scenario"]["output_dir"] = str(tmp_path / "out")
    return scenario_from_dict(data)


class TestRunScenario:
    def test_record_shape(self):
        rec = run_scenario(scenario(), write_outputs=False)
        assert rec.report is not None
        assert len(rec.positions) == 60
        assert rec.loss_series  # diagnostics were produced
        assert not rec.estimation_aborted
        # the official report scores the end of each of the two days
        assert rec.report.timepoints == [30, 60]

    def test_deterministic_given_seed(self):
        a = run_scenario(scenario(), write_outputs=False)
        b = run_scenario(scenario(), write_outputs=False)
        assert a.loss_csv() == b.loss_csv()
        assert a.positions_csv() == b.positions_csv()
        assert a.report.to_text() == b.report.to_text()

    def test_seed_changes_results(self):
        a = run_scenario(scenario(), write_outputs=False)
        b = run_scenario(scenario(seed=4), write_outputs=False)
        assert a.report.total_loss != b.report.total_loss

    def test_output_files(self, tmp_path):
        cfg = scenario(tmp_path)
        rec = run_scenario(cfg)
        out = tmp_path / "out"
        for name in (
            "loss.csv",
            "positions.csv",
            "observations.csv",
            "score_report.txt",
            "run_record.json",
        ):
            assert (out / name).exists(), name
        payload = json.loads((out / "run_record.json").read_text())
        assert payload["final_loss"] == rec.report.total_loss
        assert payload["config_hash"] == cfg.config_hash()
        # one snapshot per measurement per scored timepoint on both tracks
        env_files = sorted((out / "snapshots" / "env").iterdir())
        info_files = sorted((out / "snapshots" / "info").iterdir())
        assert len(env_files) == len(info_files) == 2 * 3

    def test_exported_snapshots_reproduce_official_loss(self, tmp_path):
        cfg = scenario(tmp_path)
        rec = run_scenario(cfg)
        out = tmp_path / "out" / "snapshots"
        geometry = build_geometry(cfg.geometry)
        masks = {m: relevance_mask(geometry, m) for m in Measurement}
        snaps = {"env": {}, "info": {}}
        for track in snaps:
            for f in (out / track).iterdir():
                t = int(f.name[1:7])
                m = Measurement[f.name[8:-5].upper()]
                snaps[track].setdefault(t, {})[m] = read_grid(f)
        report = compute_loss(snaps["env"], snaps["info"], masks, cfg.score_config)
        # fields are float32 end to end, so offline rescoring is bit exact
        assert report.total_loss == rec.report.total_loss

    def test_estimation_timeout_aborts_track(self):
        cfg = scenario(feasibility_cutoff=0.0)
        rec = run_scenario(cfg, write_outputs=False)
        assert rec.estimation_aborted
        assert any("feasibility cutoff" in w for w in rec.warnings)
        assert rec.report is None

    def test_gp_smoke_run(self):
        cfg = scenario(
            days=1,
            steps_per_day=40,
            estimation_stride=40,
            estimator__name="gp",
            estimator__params={"restarts": 1},
        )
        rec = run_scenario(cfg, write_outputs=False)
        assert rec.report is not None
        assert rec.report.total_loss >= 0.0


class TestGenEnv:
    def test_writes_daily_snapshots(self, tmp_path):
        cfg = scenario(tmp_path, days=3, steps_per_day=0)
        gen_env(cfg)
        files = sorted((tmp_path / "out" / "snapshots" / "env").iterdir())
        assert len(files) == 9
        assert files[0].name == "t000000_ccr.wbfg"
        grid = read_grid(files[0])
        assert grid.shape == (10, 10)


class TestBench:
    def test_rows_and_csv(self):
        cfg = BenchConfig(
            geometries=["miniberry-10"],
            estimators=["adaptive-disk"],
            counts=[5, 10],
            seed=1,
            repeats=1,
        )
        rows = bench_estimator_cost(cfg)
        assert [r.n_obs for r in rows] == [5, 10]
        assert all(r.seconds > 0 for r in rows)
        assert not any(r.cutoff_hit for r in rows)
        csv = bench_csv(rows)
        assert csv.splitlines()[0] == "geometry,estimator,n_obs,seconds,cutoff_hit"
        assert len(csv.splitlines()) == 3

    def test_cutoff_stops_escalation(self):
        cfg = BenchConfig(
            geometries=["miniberry-10"],
            estimators=["adaptive-disk"],
            counts=[5, 10, 20],
            feasibility_cutoff=0.0,  # everything exceeds a zero cutoff
            repeats=1,
        )
        rows = bench_estimator_cost(cfg)
        assert len(rows) == 1
        assert rows[0].cutoff_hit


def test_loglog_slope_recovers_exponent():
    ns = np.array([10, 20, 40, 80])
    for p in (1.0, 2.0, 3.0):
        ts = 1e-3 * ns.astype(float) ** p
        assert loglog_slope(ns, ts) == pytest.approx(p, abs=1e-12)
