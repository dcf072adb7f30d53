import numpy as np

from fieldbench.cli import cli_main
from fieldbench.gridio import write_grid_binary

RUN_TOML = """\
[scenario]
geometry = "miniberry-10"
seed = 5
days = 1
steps_per_day = 20
estimation_stride = 5
output_dir = "{out}"

[planner]
name = "spiral"

[estimator]
name = "adaptive-disk"
"""

BENCH_TOML = """\
[bench]
geometries = ["miniberry-10"]
estimators = ["adaptive-disk"]
counts = [5, 10]
repeats = 1
output_dir = "{out}"
"""


def write_config(tmp_path, template, name="cfg.toml"):
    out = tmp_path / "out"
    path = tmp_path / name
    path.write_text(template.format(out=out))
    return path, out


class TestRun:
    def test_run_success(self, tmp_path, capsys):
        cfg, out = write_config(tmp_path, RUN_TOML)
        assert cli_main(["run", str(cfg)]) == 0
        captured = capsys.readouterr()
        assert "final loss:" in captured.out
        assert (out / "loss.csv").exists()

    def test_seed_override_changes_output(self, tmp_path, capsys):
        cfg, out = write_config(tmp_path, RUN_TOML)
        assert cli_main(["run", str(cfg)]) == 0
        base = capsys.readouterr().out
        assert cli_main(["--seed", "99", "run", str(cfg)]) == 0
        overridden = capsys.readouterr().out
        assert base != overridden

    def test_missing_config_is_config_error(self, tmp_path, capsys):
        assert cli_main(["run", str(tmp_path / "nope.toml")]) == 1
        assert "error:" in capsys.readouterr().err

    def test_invalid_config_is_config_error(self, tmp_path, capsys):
        path = tmp_path / "bad.toml"
        path.write_text('[scenario]\ngeometry = "atlantis"\nseed = 1\n')
        assert cli_main(["run", str(path)]) == 1


class TestBenchCost:
    def test_bench_writes_csv(self, tmp_path, capsys):
        cfg, out = write_config(tmp_path, BENCH_TOML)
        assert cli_main(["bench-cost", str(cfg)]) == 0
        captured = capsys.readouterr()
        assert captured.out.startswith("geometry,estimator,n_obs")
        assert (out / "bench_cost.csv").exists()


class TestGenEnv:
    def test_gen_env(self, tmp_path):
        cfg, out = write_config(tmp_path, RUN_TOML)
        assert cli_main(["gen-env", str(cfg)]) == 0
        files = list((out / "snapshots" / "env").iterdir())
        assert len(files) == 3


class TestScore:
    def _snapshot_dirs(self, tmp_path, perturb=0.0):
        rng = np.random.default_rng(0)
        env_dir = tmp_path / "env"
        info_dir = tmp_path / "info"
        env_dir.mkdir()
        info_dir.mkdir()
        for t in (10, 20):
            for name in ("tylcv", "ccr", "humidity"):
                grid = rng.random((10, 10)).astype(np.float32)
                write_grid_binary(env_dir / f"t{t:06d}_{name}.wbfg", grid)
                write_grid_binary(
                    info_dir / f"t{t:06d}_{name}.wbfg", grid + np.float32(perturb)
                )
        return env_dir, info_dir

    def test_identical_snapshots_score_zero(self, tmp_path, capsys):
        cfg, _ = write_config(tmp_path, RUN_TOML)
        env_dir, info_dir = self._snapshot_dirs(tmp_path)
        assert cli_main(["score", str(env_dir), str(info_dir), str(cfg)]) == 0
        out = capsys.readouterr().out
        assert out.startswith("total_loss: 0.0")

    def test_perturbed_snapshots_score_positive(self, tmp_path, capsys):
        cfg, _ = write_config(tmp_path, RUN_TOML)
        env_dir, info_dir = self._snapshot_dirs(tmp_path, perturb=0.25)
        assert cli_main(["score", str(env_dir), str(info_dir), str(cfg)]) == 0
        total = float(capsys.readouterr().out.splitlines()[0].split(": ")[1])
        assert total > 0.0

    def test_missing_dir_is_config_error(self, tmp_path, capsys):
        cfg, _ = write_config(tmp_path, RUN_TOML)
        env_dir, _ = self._snapshot_dirs(tmp_path)
        code = cli_main(["score", str(env_dir), str(tmp_path / "none"), str(cfg)])
        assert code == 1

    def test_incomplete_timepoint_is_config_error(self, tmp_path):
        cfg, _ = write_config(tmp_path, RUN_TOML)
        env_dir, info_dir = self._snapshot_dirs(tmp_path)
        (info_dir / "t000010_ccr.wbfg").unlink()
        assert cli_main(["score", str(env_dir), str(info_dir), str(cfg)]) == 1

    def test_corrupt_snapshot_is_format_error(self, tmp_path):
        cfg, _ = write_config(tmp_path, RUN_TOML)
        env_dir, info_dir = self._snapshot_dirs(tmp_path)
        (env_dir / "t000010_ccr.wbfg").write_bytes(b"WBFGgarbage")
        assert cli_main(["score", str(env_dir), str(info_dir), str(cfg)]) == 1


def test_run_then_offline_score_matches(tmp_path, capsys):
    cfg, out = write_config(tmp_path, RUN_TOML)
    assert cli_main(["run", str(cfg)]) == 0
    run_out = capsys.readouterr().out
    final = run_out.splitlines()[0].split(": ")[1]
    env_dir = out / "snapshots" / "env"
    info_dir = out / "snapshots" / "info"
    assert cli_main(["score", str(env_dir), str(info_dir), str(cfg)]) == 0
    score_out = capsys.readouterr().out
    assert score_out.splitlines()[0] == f"total_loss: {final}"
