"""Benchmark suite for informative path planning over dynamic crop fields.

Procedurally generated ground truth (plant epidemics and soil humidity),
robots observing and moving on a grid, pluggable planner/estimator pairs, and
a masked asymmetric scoring function comparing the estimate against truth.
"""

from .config import BenchConfig, ScenarioConfig, bench_from_file, scenario_from_file
from .environment import (
    Environment,
    EpidemicParams,
    HumidityParams,
    init_environment,
    make_infection_kernel,
)
from .estimators import (
    AdaptiveDiskEstimator,
    AdaptiveDiskParams,
    GPEstimator,
    GPParams,
    InformationModel,
    gp_fit,
    gp_predict,
    make_estimator,
)
from .geometry import (
    ConfigurationError,
    CropKind,
    Geometry,
    Measurement,
    Owner,
    build_geometry,
    relevance_mask,
    susceptibility_mask,
)
from .harness import bench_estimator_cost, gen_env, loglog_slope, run_scenario
from .planners import (
    RandomWaypointPlanner,
    make_planner,
    plan_adaptive_lawnmower,
    plan_lawnmower,
    plan_spiral,
)
from .scoring import ScoreConfig, ScoreReport, asymmetric_error, compute_loss
from .world import Observation, Robot, World

__version__ = "0.1.0"
