"""Command-line entry point.

Subcommands:

* ``run <config>`` — execute a full scenario and write result artifacts;
* ``bench-cost <config>`` — estimator wall-clock cost benchmark;
* ``gen-env <config>`` — environment trajectory export only;
* ``score <env-dir> <info-dir> <config>`` — offline scoring of externally
  produced snapshot sets.

``--seed`` overrides the config seed. Exit codes: 0 success, 1 configuration
error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path

from .config import bench_from_file, scenario_from_file
from .geometry import ConfigurationError, Measurement, build_geometry, relevance_mask
from .gridio import FormatError, atomic_write_text, read_grid
from .harness import bench_csv, bench_estimator_cost, gen_env, run_scenario
from .scoring import compute_loss

_SNAP_RE = re.compile(r"^t(\d+)_(tylcv|ccr|humidity)\.(wbfg|csv)$")


def _load_snapshot_dir(path: Path) -> dict[int, dict[Measurement, "object"]]:
    snaps: dict[int, dict[Measurement, object]] = {}
    if not path.is_dir():
        raise ConfigurationError(f"snapshot directory not found: {path}")
    for f in sorted(path.iterdir()):
        m = _SNAP_RE.match(f.name)
        if not m:
            continue
        t = int(m.group(1))
        measurement = Measurement[m.group(2).upper()]
        snaps.setdefault(t, {})[measurement] = read_grid(f)
    if not snaps:
        raise ConfigurationError(f"no snapshot files (t*_<measurement>.*) in {path}")
    for t, fields in snaps.items():
        missing = [m.name for m in Measurement if m not in fields]
        if missing:
            raise ConfigurationError(f"timepoint {t} is missing {missing} in {path}")
    return snaps


def cli_main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="fieldbench",
        description="Informative-path-planning benchmark runner",
    )
    parser.add_argument("--seed", type=int, default=None, help="override config seed")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run a full scenario")
    p_run.add_argument("config")
    p_bench = sub.add_parser("bench-cost", help="estimator cost benchmark")
    p_bench.add_argument("config")
    p_gen = sub.add_parser("gen-env", help="environment trajectory export")
    p_gen.add_argument("config")
    p_score = sub.add_parser("score", help="offline scoring of snapshot sets")
    p_score.add_argument("env_dir")
    p_score.add_argument("info_dir")
    p_score.add_argument("config")

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        if args.command == "run":
            cfg = scenario_from_file(args.config, seed_override=args.seed)
            record = run_scenario(cfg)
            if record.report is not None:
                print(f"final loss: {record.report.total_loss!r}")
            for w in record.warnings:
                print(f"warning: {w}", file=sys.stderr)
            print(f"outputs written to {cfg.output_dir}")
            return 0
        if args.command == "bench-cost":
            cfg = bench_from_file(args.config, seed_override=args.seed)
            rows = bench_estimator_cost(cfg)
            out = Path(cfg.output_dir)
            out.mkdir(parents=True, exist_ok=True)
            csv = bench_csv(rows)
            atomic_write_text(out / "bench_cost.csv", csv)
            print(csv, end="")
            return 0
        if args.command == "gen-env":
            cfg = scenario_from_file(args.config, seed_override=args.seed)
            gen_env(cfg)
            print(f"environment snapshots written to {cfg.output_dir}")
            return 0
        if args.command == "score":
            cfg = scenario_from_file(args.config, seed_override=args.seed)
            geometry = build_geometry(cfg.geometry)
            masks = {m: relevance_mask(geometry, m) for m in Measurement}
            env_snaps = _load_snapshot_dir(Path(args.env_dir))
            info_snaps = _load_snapshot_dir(Path(args.info_dir))
            report = compute_loss(env_snaps, info_snaps, masks, cfg.score_config)
            print(report.to_text(), end="")
            return 0
    except (ConfigurationError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    return 2


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
