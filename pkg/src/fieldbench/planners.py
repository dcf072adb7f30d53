"""Movement policies: lawnmower, adaptive lawnmower, spiral, random waypoint.

All planners emit unit king-moves (|dx|, |dy| <= 1). The sweep planners
precompute their whole move sequence up front from the step budget; the row or
ring spacing is the smallest integer whose exact path length fits the budget.
The random-waypoint planner is stateful and seed-deterministic.

The planner interface passes the current information model through
`next_move` so estimator-aware policies can plug in later; the built-in
planners ignore it (they are open loop).
"""

from __future__ import annotations

import numpy as np

from .geometry import Geometry, Measurement

Region = tuple[int, int, int, int]  # (x0, y0, x1, y1), half-open


def _sign(v: int) -> int:
    return (v > 0) - (v < 0)


def transit_moves(start: tuple[int, int], goal: tuple[int, int]) -> list[tuple[int, int]]:
    """Greedy king-move path from `start` to `goal` (a Chebyshev geodesic)."""
    x, y = start
    moves = []
    while (x, y) != goal:
        dx, dy = _sign(goal[0] - x), _sign(goal[1] - y)
        moves.append((dx, dy))
        x += dx
        y += dy
    return moves


def _apply(pos: tuple[int, int], moves) -> tuple[int, int]:
    x, y = pos
    for dx, dy in moves:
        x += dx
        y += dy
    return (x, y)


def lawnmower_moves(region: Region, spacing: int) -> list[tuple[int, int]]:
    """Boustrophedon sweep of `region` with row spacing `spacing`.

    Starts at the region's (x0, y0) corner, sweeps rows along x, steps
    `spacing` cells in y between rows.
    """
    x0, y0, x1, y1 = region
    cols, rows = x1 - x0, y1 - y0
    if cols <= 0 or rows <= 0:
        return []
    moves = []
    sweep_rows = list(range(0, rows, spacing))
    direction = 1
    for i, _ in enumerate(sweep_rows):
        moves.extend([(direction, 0)] * (cols - 1))
        direction = -direction
        if i + 1 < len(sweep_rows):
            moves.extend([(0, 1)] * spacing)
    return moves


def spiral_moves(region: Region, spacing: int) -> list[tuple[int, int]]:
    """Inward rectangular spiral over `region` with ring spacing `spacing`.

    Starts at the (x0, y0) corner and walks right / down / left / up around
    progressively smaller rectangles until the remaining rectangle collapses.
    """
    x0, y0, x1, y1 = region
    if x1 - x0 <= 0 or y1 - y0 <= 0:
        return []
    moves = []
    lo_x, hi_x = 0, x1 - x0 - 1  # inclusive local bounds
    lo_y, hi_y = 0, y1 - y0 - 1
    x, y = 0, 0
    while lo_x <= hi_x and lo_y <= hi_y:
        moves.extend([(1, 0)] * (hi_x - x))
        x = hi_x
        moves.extend([(0, 1)] * (hi_y - y))
        y = hi_y
        if hi_y > lo_y:
            moves.extend([(-1, 0)] * (x - lo_x))
            x = lo_x
        # close the ring, stopping one cell short of its starting corner
        if hi_x > lo_x and y > lo_y + 1:
            up = y - (lo_y + 1)
            moves.extend([(0, -1)] * up)
            y -= up
        lo_x += spacing
        hi_x -= spacing
        lo_y += spacing
        hi_y -= spacing
        if lo_x > hi_x or lo_y > hi_y:
            break
        moves.extend(transit_moves((x, y), (lo_x, lo_y)))
        x, y = lo_x, lo_y
    return moves


def fit_spacing(gen, region: Region, budget: int, max_spacing: int) -> int:
    """Smallest integer spacing whose exact path length fits in `budget`.

    `gen` is a move-sequence generator (region, spacing) -> moves. Falls back
    to `max_spacing` when even the sparsest sweep exceeds the budget (the
    emitted plan is then truncated by the caller).
    """
    for s in range(1, max_spacing + 1):
        if len(gen(region, s)) <= budget:
            return s
    return max_spacing


def plan_lawnmower(budget: int, region: Region) -> list[tuple[int, int]]:
    """Budget-fitted boustrophedon sweep starting at the region corner."""
    if budget <= 0 or region[2] - region[0] <= 0 or region[3] - region[1] <= 0:
        return []
    max_s = max(1, region[3] - region[1])
    s = fit_spacing(lawnmower_moves, region, budget, max_s)
    return lawnmower_moves(region, s)[:budget]


def plan_spiral(budget: int, region: Region) -> list[tuple[int, int]]:
    """Budget-fitted inward spiral starting at the region corner."""
    if budget <= 0 or region[2] - region[0] <= 0 or region[3] - region[1] <= 0:
        return []
    max_s = max(1, max(region[2] - region[0], region[3] - region[1]))
    s = fit_spacing(spiral_moves, region, budget, max_s)
    return spiral_moves(region, s)[:budget]


def plan_adaptive_lawnmower(
    budget: int,
    geometry: Geometry,
    weights: dict[Measurement, float],
    start: tuple[int, int] = (0, 0),
) -> list[tuple[int, int]]:
    """Two-phase sweep: tomatoes first and denser, then strawberries.

    The step budget is split between the crop regions in proportion to their
    share of the scoring weights (disease weight plus the humidity weight for
    each crop); each region gets its own budget-fitted row spacing. Transit
    legs between regions are paid out of the budget.
    """
    from .geometry import CropKind  # local import to avoid cycle noise

    w_tomato = weights[Measurement.TYLCV] + weights[Measurement.HUMIDITY]
    w_straw = weights[Measurement.CCR] + weights[Measurement.HUMIDITY]
    share = w_tomato / (w_tomato + w_straw)
    regions = [
        (geometry.client_crop_bbox(CropKind.TOMATO), int(round(budget * share))),
        (geometry.client_crop_bbox(CropKind.STRAWBERRY), None),  # gets the rest
    ]
    moves: list[tuple[int, int]] = []
    pos = start
    for region, region_budget in regions:
        remaining = budget - len(moves)
        if remaining <= 0:
            break
        if region_budget is None or region_budget > remaining:
            region_budget = remaining
        transit = transit_moves(pos, (region[0], region[1]))
        sweep_budget = region_budget - len(transit)
        if sweep_budget <= 0:
            moves.extend(transit[:remaining])
            pos = _apply(pos, transit[:remaining])
            break
        sweep = plan_lawnmower(sweep_budget, region)
        leg = (transit + sweep)[:remaining]
        moves.extend(leg)
        pos = _apply(pos, leg)
    return moves[:budget]


class SequencePlanner:
    """Replays a precomputed move list, then stands still."""

    def __init__(self, moves: list[tuple[int, int]]):
        self.moves = moves
        self._i = 0

    def next_move(self, x: int, y: int, info_model=None) -> tuple[int, int]:
        if self._i >= len(self.moves):
            return (0, 0)
        mv = self.moves[self._i]
        self._i += 1
        return mv


class RandomWaypointPlanner:
    """Uniform random waypoint chasing, seed-deterministic.

    Draws a waypoint uniformly over the grid, walks the Chebyshev geodesic
    toward it one king-move at a time, redraws on arrival.
    """

    def __init__(self, seed: int, width: int, height: int):
        self.width = width
        self.height = height
        self._rng = np.random.Generator(np.random.Philox(key=[seed, 200]))
        self.waypoint: tuple[int, int] | None = None

    def _draw(self, x: int, y: int) -> tuple[int, int]:
        for _ in range(1000):
            wx = int(self._rng.integers(0, self.width))
            wy = int(self._rng.integers(0, self.height))
            if (wx, wy) != (x, y):
                return (wx, wy)
        return (x, y)  # degenerate 1x1 grid

    def next_move(self, x: int, y: int, info_model=None) -> tuple[int, int]:
        if self.waypoint is None or self.waypoint == (x, y):
            self.waypoint = self._draw(x, y)
        return (_sign(self.waypoint[0] - x), _sign(self.waypoint[1] - y))


def make_planner(
    name: str,
    budget: int,
    geometry: Geometry,
    start: tuple[int, int],
    weights: dict[Measurement, float],
    planner_seed: int = 0,
):
    """Planner factory used by the scenario runner.

    Sweep planners operate over the full grid (plain lawnmower/spiral) or the
    client crop regions (adaptive); transit from the robot start to the sweep
    origin is included in the budget.
    """
    full = (0, 0, geometry.width, geometry.height)
    if name == "lawnmower":
        transit = transit_moves(start, (0, 0))
        return SequencePlanner(
            (transit + plan_lawnmower(budget - len(transit), full))[:budget]
        )
    if name == "spiral":
        transit = transit_moves(start, (0, 0))
        return SequencePlanner(
            (transit + plan_spiral(budget - len(transit), full))[:budget]
        )
    if name == "adaptive-lawnmower":
        return SequencePlanner(
            plan_adaptive_lawnmower(budget, geometry, weights, start=start)
        )
    if name == "random-waypoint":
        return RandomWaypointPlanner(planner_seed, geometry.width, geometry.height)
    raise ValueError(f"unknown planner {name!r}")
