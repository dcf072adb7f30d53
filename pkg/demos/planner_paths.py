"""Compare the four built-in movement policies on the 30x30 farm.

For each planner we walk a 300-step budget and report how many distinct cells
the robot visited, then draw the lawnmower and spiral tracks over the 10x10
farm so the sweep structure is visible.
"""

from fieldbench.geometry import build_geometry
from fieldbench.planners import make_planner
from fieldbench.scoring import DEFAULT_WEIGHTS

BUDGET = 300


def walk(name, geometry, budget, seed=5):
    planner = make_planner(
        name, budget, geometry, (0, 0), DEFAULT_WEIGHTS, planner_seed=seed
    )
    x, y = 0, 0
    cells = {(x, y)}
    path = [(x, y)]
    for t in range(budget):
        dx, dy = planner.next_move(x, y)
        x = min(max(x + dx, 0), geometry.width - 1)
        y = min(max(y + dy, 0), geometry.height - 1)
        cells.add((x, y))
        path.append((x, y))
    return cells, path


g30 = build_geometry("miniberry-30")
print(f"{'planner':<22} {'cells visited':>14} {'coverage':>9}")
for name in ("lawnmower", "adaptive-lawnmower", "spiral", "random-waypoint"):
    cells, _ = walk(name, g30, BUDGET)
    print(f"{name:<22} {len(cells):>14} {len(cells) / (30 * 30):>8.0%}")

g10 = build_geometry("miniberry-10")
for name in ("lawnmower", "spiral"):
    _, path = walk(name, g10, 60)
    grid = [["."] * 10 for _ in range(10)]
    for i, (x, y) in enumerate(path):
        grid[y][x] = "0123456789"[i % 10]
    print(f"\n{name}, 60 steps on the 10x10 farm (digits = step mod 10):")
    print("\n".join("".join(row) for row in grid))
