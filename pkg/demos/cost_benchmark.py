"""Measure how estimation cost grows with the number of observations.

Times one full three-field estimation on the 100x100 farm at increasing
observation counts and fits a log-log slope: roughly linear for the adaptive
disk, cubic-ish for the GP (Cholesky factorization dominates once the
prediction grid stops mattering). Counts are kept small so this finishes in
about a minute; the `bench-cost` CLI subcommand runs the full sweep.
"""

from fieldbench.config import BenchConfig
from fieldbench.harness import bench_estimator_cost, loglog_slope

rows = bench_estimator_cost(
    BenchConfig(
        geometries=["miniberry-100"],
        estimators=["adaptive-disk", "gp"],
        counts=[25, 50, 100, 200],
        seed=1,
        feasibility_cutoff=10.0,
        repeats=2,
    )
)

print(f"{'estimator':<15} {'n_obs':>6} {'seconds':>10} {'cutoff':>7}")
for r in rows:
    print(f"{r.estimator:<15} {r.n_obs:>6} {r.seconds:>10.4f} {str(r.cutoff_hit):>7}")

for name in ("adaptive-disk", "gp"):
    sub = [r for r in rows if r.estimator == name]
    slope = loglog_slope([r.n_obs for r in sub], [r.seconds for r in sub])
    print(f"\n{name}: log-log slope {slope:.2f} over n in "
          f"[{sub[0].n_obs}, {sub[-1].n_obs}]")
