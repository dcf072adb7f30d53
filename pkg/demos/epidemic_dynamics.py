"""Watch both epidemics and the humidity field evolve on the 30x30 farm.

Runs the environment alone (no robots) for 30 days and prints a census every
five days, plus a crude ASCII view of the tomato disease at the end.
"""

import numpy as np

from fieldbench.environment import EpidemicParams, HumidityParams, init_environment
from fieldbench.geometry import Measurement, build_geometry

g = build_geometry("miniberry-30")
env = init_environment(
    g,
    EpidemicParams(p_total=0.35, infect_duration=5, seeds=3, rng_seed=42),
    EpidemicParams(p_total=0.12, infect_duration=10, seeds=3, rng_seed=42),
    HumidityParams(rng_seed=42),
)

print(f"geometry: {g.width}x{g.height}")
print(f"{'day':>4} {'TYLCV S/I/R':>14} {'CCR S/I/R':>14} {'mean humidity':>14}")

for day in range(31):
    if day % 5 == 0:
        c_ty = env.census(Measurement.TYLCV)
        c_cc = env.census(Measurement.CCR)
        hum = float(env.fields[Measurement.HUMIDITY].mean())
        print(
            f"{day:>4} {c_ty['S']:>5}/{c_ty['I']:>3}/{c_ty['R']:>3}"
            f" {c_cc['S']:>6}/{c_cc['I']:>3}/{c_cc['R']:>3} {hum:>14.3f}"
        )
    if day < 30:
        env.advance_day()

# ASCII snapshot of the tomato epidemic: '.' healthy, 'i' infected,
# 'r' removed, ' ' outside the susceptible area
print("\nTYLCV state after 30 days:")
chars = np.array([".", "i", "r", " "])
for row in chars[env.state[Measurement.TYLCV]]:
    print("".join(row))
