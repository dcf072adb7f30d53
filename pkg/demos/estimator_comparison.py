"""Run the same scenario with both estimators and compare the scores.

A random-waypoint robot surveys the 30x30 farm for five days. The adaptive
disk paints each observation over a shrinking neighborhood; the Gaussian
process regresses a smooth field from the same observations. Takes about a
minute, dominated by the GP hyperparameter fits.
"""

from fieldbench.config import ScenarioConfig
from fieldbench.environment import EpidemicParams, HumidityParams
from fieldbench.geometry import Measurement
from fieldbench.harness import run_scenario

SEED = 11
base = dict(
    geometry="miniberry-30",
    seed=SEED,
    days=5,
    steps_per_day=40,
    warmup_days=2,
    planner="random-waypoint",
    epidemic={
        Measurement.TYLCV: EpidemicParams(0.35, 5, seeds=3, rng_seed=SEED),
        Measurement.CCR: EpidemicParams(0.12, 10, seeds=3, rng_seed=SEED),
    },
    humidity=HumidityParams(rng_seed=SEED),
)

for estimator, stride in (("adaptive-disk", 40), ("gp", 200)):
    cfg = ScenarioConfig(estimator=estimator, estimation_stride=stride, **base)
    rec = run_scenario(cfg, write_outputs=False)
    print(f"\n{estimator}:")
    print(f"  final loss  {rec.report.total_loss:.4f}")
    for m, v in rec.report.components.items():
        print(f"  {m.name.lower():<10} component {v:.4f}")
    print(f"  estimation time {sum(s for _, s in rec.timings):.2f}s")
