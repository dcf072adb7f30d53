"""Robots, the per-timestep action cycle and the observation log.

Each timestep every robot first observes the cell it stands on, then executes
one king-move (|dx|, |dy| <= 1). The environment is frozen within a day; when
the in-day step counter rolls over, the environment advances one day. Moves
that would leave the grid are clamped and logged as warnings.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

from .environment import Environment
from .gridio import atomic_write_text


@dataclass
class Robot:
    id: int
    x: int
    y: int


@dataclass(frozen=True)
class Observation:
    robot_id: int
    x: int
    y: int
    timestep: int  # global timestep across days
    day: int
    values: tuple[float, float, float]  # (tylcv, ccr, humidity)


class World:
    """Hosts the robots and coordinates steps against the environment."""

    def __init__(
        self,
        env: Environment,
        starts: list[tuple[int, int]],
        steps_per_day: int,
    ):
        if steps_per_day < 0:
            raise ValueError("steps_per_day must be >= 0")
        self.env = env
        self.steps_per_day = steps_per_day
        self.robots = []
        for i, (x, y) in enumerate(starts, start=1):
            if not env.geometry.in_bounds(x, y):
                raise ValueError(f"robot {i} start ({x}, {y}) out of bounds")
            self.robots.append(Robot(id=i, x=x, y=y))
        self.timestep = 0  # global, 0-based count of completed steps
        self.step_in_day = 0
        self.observations: list[Observation] = []
        self.warnings: list[str] = []

    def step(self, moves: list[tuple[int, int]]) -> list[Observation]:
        """Observe-then-move for every robot; returns this step's observations."""
        if len(moves) != len(self.robots):
            raise ValueError(f"expected {len(self.robots)} moves, got {len(moves)}")
        new_obs = []
        for robot, (dx, dy) in zip(self.robots, moves):
            if abs(dx) > 1 or abs(dy) > 1:
                raise ValueError(f"robot {robot.id}: move ({dx}, {dy}) exceeds speed 1")
            values = self.env.read_point(robot.x, robot.y)
            obs = Observation(
                robot_id=robot.id,
                x=robot.x,
                y=robot.y,
                timestep=self.timestep,
                day=self.env.day,
                values=(float(values[0]), float(values[1]), float(values[2])),
            )
            new_obs.append(obs)
            nx = min(max(robot.x + dx, 0), self.env.geometry.width - 1)
            ny = min(max(robot.y + dy, 0), self.env.geometry.height - 1)
            if (nx, ny) != (robot.x + dx, robot.y + dy):
                self.warnings.append(
                    f"t={self.timestep} robot {robot.id}: move ({dx}, {dy}) from "
                    f"({robot.x}, {robot.y}) clamped to ({nx}, {ny})"
                )
            robot.x, robot.y = nx, ny
        self.observations.extend(new_obs)
        self.timestep += 1
        self.step_in_day += 1
        if self.steps_per_day and self.step_in_day >= self.steps_per_day:
            self.step_in_day = 0
            self.env.advance_day()
        return new_obs

    def observations_csv(self) -> str:
        buf = io.StringIO()
        buf.write("timestep,day,robot_id,x,y,tylcv,ccr,humidity\n")
        for o in self.observations:
            buf.write(
                f"{o.timestep},{o.day},{o.robot_id},{o.x},{o.y},"
                f"{o.values[0]!r},{o.values[1]!r},{o.values[2]!r}\n"
            )
        return buf.getvalue()

    def export_observations(self, path) -> None:
        atomic_write_text(path, self.observations_csv())
