"""Scenario and benchmark configuration: TOML parsing and validation.

A scenario config is a single TOML file with the tables ``[scenario]``,
``[environment.tylcv]``, ``[environment.ccr]``, ``[environment.humidity]``,
``[robots]``, ``[planner]``, ``[estimator]`` (plus ``[estimator.params]``)
and ``[scoring]``. Every table is optional except ``[scenario]``, which must
carry at least ``geometry`` and ``seed``; omitted keys fall back to the
defaults below. The master seed feeds every RNG stream (environment, planner,
estimator restarts), each on its own counter-based stream id, so one seed
pins the whole run.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import tomli

from .environment import EpidemicParams, HumidityParams, make_infection_kernel
from .estimators import AdaptiveDiskParams, GPParams
from .geometry import GEOMETRY_NAMES, ConfigurationError, Measurement
from .scoring import DEFAULT_ASYMMETRY, DEFAULT_WEIGHTS, ScoreConfig

DEFAULT_EPIDEMIC = {
    # TYLCV spreads fast and kills quickly; CCR creeps.
    Measurement.TYLCV: {"p_total": 0.35, "infect_duration": 5, "seeds": 3},
    Measurement.CCR: {"p_total": 0.12, "infect_duration": 10, "seeds": 3},
}

_MEASUREMENT_KEYS = {
    "tylcv": Measurement.TYLCV,
    "ccr": Measurement.CCR,
    "humidity": Measurement.HUMIDITY,
}

PLANNER_NAMES = ("lawnmower", "adaptive-lawnmower", "spiral", "random-waypoint")
ESTIMATOR_NAMES = ("adaptive-disk", "gp")


@dataclass
class ScenarioConfig:
    geometry: str
    seed: int
    days: int = 1
    steps_per_day: int = 0
    warmup_days: int = 0
    output_dir: str = "out"
    estimation_stride: int = 1
    feasibility_cutoff: float = 10.0
    snapshot_format: str = "wbfg"  # or "csv"
    robot_starts: list[tuple[int, int]] = field(default_factory=lambda: [(0, 0)])
    planner: str = "random-waypoint"
    estimator: str = "adaptive-disk"
    epidemic: dict[Measurement, EpidemicParams] = None
    humidity: HumidityParams = None
    estimator_params: AdaptiveDiskParams | GPParams = None
    score_config: ScoreConfig = field(default_factory=ScoreConfig)
    raw: dict = field(default_factory=dict, repr=False)

    @property
    def total_steps(self) -> int:
        return self.days * self.steps_per_day

    def config_hash(self) -> str:
        canonical = json.dumps(self.raw, sort_keys=True, default=str)
        return hashlib.sha256(canonical.encode()).hexdigest()


def _epidemic_from_table(m: Measurement, table: dict, seed: int) -> EpidemicParams:
    defaults = dict(DEFAULT_EPIDEMIC[m])
    defaults.update(table)
    radius = int(defaults.pop("kernel_radius", 2))
    return EpidemicParams(rng_seed=seed, kernel=make_infection_kernel(radius), **defaults)


def _humidity_from_table(table: dict, seed: int) -> HumidityParams:
    return HumidityParams(rng_seed=seed, **table)


def _score_from_table(table: dict) -> ScoreConfig:
    weights = dict(DEFAULT_WEIGHTS)
    asym = dict(DEFAULT_ASYMMETRY)
    for key, m in _MEASUREMENT_KEYS.items():
        if key in table.get("weights", {}):
            weights[m] = float(table["weights"][key])
        if key in table.get("c_minus", {}):
            asym[m] = (float(table["c_minus"][key]), asym[m][1])
        if key in table.get("c_plus", {}):
            asym[m] = (asym[m][0], float(table["c_plus"][key]))
    return ScoreConfig(weights=weights, asymmetry=asym)


def _estimator_params_from_table(name: str, table: dict, seed: int):
    table = dict(table)
    if "default_value" in table:
        table["default_value"] = {
            _MEASUREMENT_KEYS[k]: float(v) for k, v in table["default_value"].items()
        }
    try:
        if name == "adaptive-disk":
            return AdaptiveDiskParams(**table)
        if name == "gp":
            for k in ("length_scale_bounds", "signal_variance_bounds",
                      "noise_variance_bounds", "clip_range"):
                if k in table:
                    table[k] = tuple(table[k])
            table.setdefault("rng_seed", seed)
            return GPParams(**table)
    except TypeError as exc:
        raise ConfigurationError(f"bad [estimator.params] for {name}: {exc}") from None
    raise ConfigurationError(f"unknown estimator {name!r}; expected {ESTIMATOR_NAMES}")


def scenario_from_dict(data: dict, seed_override: int | None = None) -> ScenarioConfig:
    """Build a validated ScenarioConfig from a parsed TOML dict."""
    if "scenario" not in data:
        raise ConfigurationError("config is missing the [scenario] table")
    sc = data["scenario"]
    if "geometry" not in sc:
        raise ConfigurationError("[scenario] must set 'geometry'")
    if "seed" not in sc and seed_override is None:
        raise ConfigurationError("[scenario] must set 'seed'")
    geometry = sc["geometry"]
    if geometry not in GEOMETRY_NAMES:
        raise ConfigurationError(
            f"unknown geometry {geometry!r}; expected one of {GEOMETRY_NAMES}"
        )
    seed = int(seed_override if seed_override is not None else sc["seed"])
    env_tables = data.get("environment", {})
    robots = data.get("robots", {})
    starts = [tuple(int(v) for v in p) for p in robots.get("starts", [[0, 0]])]
    count = int(robots.get("count", len(starts)))
    if count < 0:
        raise ConfigurationError("robot count must be >= 0")
    if count != len(starts):
        if len(starts) == 1:
            starts = starts * count
        else:
            raise ConfigurationError("robots.count disagrees with robots.starts")
    planner_tbl = data.get("planner", {})
    planner = planner_tbl.get("name", "random-waypoint")
    if planner not in PLANNER_NAMES:
        raise ConfigurationError(
            f"unknown planner {planner!r}; expected one of {PLANNER_NAMES}"
        )
    est_tbl = data.get("estimator", {})
    estimator = est_tbl.get("name", "adaptive-disk")
    cfg = ScenarioConfig(
        geometry=geometry,
        seed=seed,
        days=int(sc.get("days", 1)),
        steps_per_day=int(sc.get("steps_per_day", 0)),
        warmup_days=int(sc.get("warmup_days", 0)),
        output_dir=sc.get("output_dir", "out"),
        estimation_stride=int(sc.get("estimation_stride", 1)),
        feasibility_cutoff=float(sc.get("feasibility_cutoff", 10.0)),
        snapshot_format=sc.get("snapshot_format", "wbfg"),
        robot_starts=starts,
        planner=planner,
        estimator=estimator,
        epidemic={
            m: _epidemic_from_table(m, env_tables.get(key, {}), seed)
            for key, m in (("tylcv", Measurement.TYLCV), ("ccr", Measurement.CCR))
        },
        humidity=_humidity_from_table(env_tables.get("humidity", {}), seed),
        estimator_params=_estimator_params_from_table(
            estimator, est_tbl.get("params", {}), seed
        ),
        score_config=_score_from_table(data.get("scoring", {})),
        raw=data,
    )
    if cfg.days < 0 or cfg.steps_per_day < 0 or cfg.warmup_days < 0:
        raise ConfigurationError("days, steps_per_day and warmup_days must be >= 0")
    if cfg.estimation_stride < 1:
        raise ConfigurationError("estimation_stride must be >= 1")
    if cfg.snapshot_format not in ("wbfg", "csv"):
        raise ConfigurationError("snapshot_format must be 'wbfg' or 'csv'")
    return cfg


def scenario_from_file(path: str | Path, seed_override: int | None = None) -> ScenarioConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"config file not found: {path}")
    try:
        data = tomli.loads(path.read_text())
    except tomli.TOMLDecodeError as exc:
        raise ConfigurationError(f"{path}: {exc}") from None
    return scenario_from_dict(data, seed_override)


@dataclass
class BenchConfig:
    geometries: list[str]
    estimators: list[str]
    counts: list[int]
    seed: int = 1
    feasibility_cutoff: float = 10.0
    repeats: int = 3
    output_dir: str = "out"
    estimator_params: dict = field(default_factory=dict)

    def __post_init__(self):
        if sorted(self.counts) != list(self.counts):
            raise ConfigurationError("bench observation counts must be ascending")
        for g in self.geometries:
            if g not in GEOMETRY_NAMES:
                raise ConfigurationError(f"unknown geometry {g!r}")
        for e in self.estimators:
            if e not in ESTIMATOR_NAMES:
                raise ConfigurationError(f"unknown estimator {e!r}")


def bench_from_file(path: str | Path, seed_override: int | None = None) -> BenchConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"config file not found: {path}")
    try:
        data = tomli.loads(path.read_text())
    except tomli.TOMLDecodeError as exc:
        raise ConfigurationError(f"{path}: {exc}") from None
    if "bench" not in data:
        raise ConfigurationError("config is missing the [bench] table")
    b = dict(data["bench"])
    if seed_override is not None:
        b["seed"] = seed_override
    try:
        return BenchConfig(
            geometries=list(b["geometries"]),
            estimators=list(b["estimators"]),
            counts=[int(n) for n in b["counts"]],
            seed=int(b.get("seed", 1)),
            feasibility_cutoff=float(b.get("feasibility_cutoff", 10.0)),
            repeats=int(b.get("repeats", 3)),
            output_dir=b.get("output_dir", "out"),
            estimator_params=data.get("estimator_params", {}),
        )
    except KeyError as exc:
        raise ConfigurationError(f"[bench] is missing {exc}") from None
