"""Field estimators: Adaptive Disk and an exact Gaussian Process regressor.

Adaptive Disk stamps each observation onto a disk whose radius shrinks as
observations accumulate (area equipartition, floored at ``r_min``); each cell
takes the value of its nearest observation, most recent winning ties, and
uncovered cells fall back to per-measurement defaults.

The GP uses a radial-basis kernel plus white noise, hyperparameters fitted by
maximizing the log marginal likelihood with analytic gradients (L-BFGS-B in
log-parameter space, multi-start), Cholesky factorization with escalating
diagonal jitter, and blockwise posterior evaluation over the full grid.
Training targets are centered on their mean and de-centered at prediction.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import linalg, optimize

from .geometry import Geometry, Measurement
from .world import Observation


class EstimatorError(RuntimeError):
    """An estimator failed (e.g. factorization impossible)."""


class EstimationTimeout(RuntimeError):
    """Raised when an estimation run exceeds its deadline."""

    def __init__(self, elapsed: float):
        super().__init__(f"estimation exceeded deadline after {elapsed:.2f}s")
        self.elapsed = elapsed


@dataclass
class InformationModel:
    """The estimator's reconstruction of one environment time-slice."""

    geometry: Geometry
    fields: dict[Measurement, np.ndarray]  # float32 grids, shape (H, W)
    variance: dict[Measurement, np.ndarray] | None
    estimator_id: str
    n_obs: int
    seconds: float = 0.0  # wall-clock time of the producing estimate() call


DEFAULT_VALUES = {
    Measurement.TYLCV: 1.0,  # healthy prior
    Measurement.CCR: 1.0,
    Measurement.HUMIDITY: 0.5,
}


def _check_deadline(t0: float, deadline: float | None) -> None:
    if deadline is not None:
        elapsed = time.perf_counter() - t0
        if elapsed > deadline:
            raise EstimationTimeout(elapsed)


# ---------------------------------------------------------------------------
# Adaptive Disk
# ---------------------------------------------------------------------------


@dataclass
class AdaptiveDiskParams:
    r_min: int = 1
    default_value: dict[Measurement, float] = field(
        default_factory=lambda: dict(DEFAULT_VALUES)
    )

    def __post_init__(self):
        if self.r_min < 1:
            raise ValueError("r_min must be >= 1")


def adaptive_disk_radius(n_obs: int, area: int, r_min: int) -> int:
    """Disk radius for `n_obs` observations: disks jointly cover ~ the area."""
    if n_obs == 0:
        return r_min
    return max(r_min, int(round(math.sqrt(area / (math.pi * n_obs)))))


@lru_cache(maxsize=4)
def _disk_distance_template(r: int) -> np.ndarray:
    ax = np.arange(-r, r + 1, dtype=np.float32)
    return ax[:, None] ** 2 + ax[None, :] ** 2


class AdaptiveDiskEstimator:
    id = "adaptive-disk"

    def __init__(self, params: AdaptiveDiskParams | None = None):
        self.params = params or AdaptiveDiskParams()

    def estimate(
        self,
        observations: list[Observation],
        geometry: Geometry,
        deadline: float | None = None,
    ) -> InformationModel:
        t0 = time.perf_counter()
        p = self.params
        h, w = geometry.shape
        values = np.empty((len(Measurement), h, w), dtype=np.float32)
        for m in Measurement:
            values[m].fill(np.float32(p.default_value[m]))
        # stable time order makes "most recent wins" permutation-proof
        obs = sorted(observations, key=lambda o: (o.timestep, o.robot_id, o.x, o.y))
        if obs:
            r = adaptive_disk_radius(len(obs), geometry.n_cells, p.r_min)
            r2 = np.float32(r * r)
            template = _disk_distance_template(r)
            best = np.full((h, w), np.inf, dtype=np.float32)
            for k, o in enumerate(obs):
                if k % 64 == 0:
                    _check_deadline(t0, deadline)
                y0, y1 = max(o.y - r, 0), min(o.y + r + 1, h)
                x0, x1 = max(o.x - r, 0), min(o.x + r + 1, w)
                patch = template[
                    y0 - o.y + r : y1 - o.y + r, x0 - o.x + r : x1 - o.x + r
                ]
                sel = (patch <= r2) & (patch <= best[y0:y1, x0:x1])
                best[y0:y1, x0:x1][sel] = patch[sel]
                for m in Measurement:
                    values[m, y0:y1, x0:x1][sel] = np.float32(o.values[m])
        return InformationModel(
            geometry=geometry,
            fields={m: values[m] for m in Measurement},
            variance=None,
            estimator_id=self.id,
            n_obs=len(observations),
            seconds=time.perf_counter() - t0,
        )


# ---------------------------------------------------------------------------
# Gaussian Process
# ---------------------------------------------------------------------------


@dataclass
class GPParams:
    length_scale: float = 3.0
    length_scale_bounds: tuple[float, float] = (0.5, 100.0)
    signal_variance: float = 1.0
    signal_variance_bounds: tuple[float, float] = (1e-3, 1e3)
    noise_variance: float = 1e-4
    noise_variance_bounds: tuple[float, float] = (1e-8, 1e-1)
    restarts: int = 5
    jitter: float = 1e-10
    max_opt_iter: int = 50
    block_size: int = 100_000
    rng_seed: int = 0
    #: posterior means are clipped to this interval; all measured
    #: quantities live in [0, 1] by construction
    clip_range: tuple[float, float] = (0.0, 1.0)
    default_value: dict[Measurement, float] = field(
        default_factory=lambda: dict(DEFAULT_VALUES)
    )

    def __post_init__(self):
        for v, b in (
            (self.length_scale, self.length_scale_bounds),
            (self.signal_variance, self.signal_variance_bounds),
            (self.noise_variance, self.noise_variance_bounds),
        ):
            if v <= 0:
                raise ValueError("GP hyperparameters must be positive")
            if not (0 < b[0] <= b[1]):
                raise ValueError("GP bounds must be positive and well-ordered")


def _sqdist(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # quadratic expansion keeps the intermediate at (N, B) instead of (N, B, 2)
    d2 = (
        (a * a).sum(axis=1)[:, None]
        + (b * b).sum(axis=1)[None, :]
        - 2.0 * (a @ b.T)
    )
    return np.maximum(d2, 0.0)


def kernel_matrix(
    a: np.ndarray, b: np.ndarray, length_scale: float, signal_variance: float
) -> np.ndarray:
    """RBF kernel (noise term excluded; add it on the diagonal separately)."""
    return signal_variance * np.exp(-_sqdist(a, b) / (2.0 * length_scale**2))


def cholesky_with_jitter(
    K: np.ndarray, jitter: float, max_doublings: int = 40
) -> tuple[np.ndarray, float]:
    """Lower Cholesky factor of K, adding doubling diagonal jitter on failure."""
    try:
        return linalg.cholesky(K, lower=True), 0.0
    except linalg.LinAlgError:
        pass
    eye = np.eye(K.shape[0])
    j = jitter
    for _ in range(max_doublings):
        try:
            return linalg.cholesky(K + j * eye, lower=True), j
        except linalg.LinAlgError:
            j *= 2.0
    raise EstimatorError(f"Cholesky failed even with jitter {j:.3e}")


def _lml_core(
    log_theta: np.ndarray, D2: np.ndarray, eye: np.ndarray, y: np.ndarray,
    jitter: float,
) -> tuple[float, np.ndarray]:
    ls, sv, nv = np.exp(log_theta)
    n = len(y)
    Krbf = sv * np.exp(D2 * (-0.5 / ls**2))
    K = Krbf + nv * eye
    L, _ = cholesky_with_jitter(K, jitter)
    alpha = linalg.cho_solve((L, True), y, check_finite=False)
    lml = (
        -0.5 * float(y @ alpha)
        - float(np.log(np.diagonal(L)).sum())
        - 0.5 * n * math.log(2.0 * math.pi)
    )
    Kinv = linalg.cho_solve((L, True), eye, check_finite=False)
    W = np.outer(alpha, alpha)
    W -= Kinv
    grad = np.array(
        [
            0.5 / ls**2 * float(np.einsum("ij,ij,ij->", W, Krbf, D2)),
            0.5 * float(np.einsum("ij,ij->", W, Krbf)),
            0.5 * nv * float(np.trace(W)),
        ]
    )
    return lml, grad


def log_marginal_likelihood(
    log_theta: np.ndarray, X: np.ndarray, y: np.ndarray, jitter: float
) -> tuple[float, np.ndarray]:
    """LML and its gradient w.r.t. (log ls, log sv, log nv).

    Gradient: d lml / d theta_j = 1/2 tr((alpha alpha^T - K^-1) dK/dtheta_j).
    """
    X = np.asarray(X, dtype=np.float64)
    return _lml_core(
        np.asarray(log_theta, dtype=np.float64),
        _sqdist(X, X),
        np.eye(len(y)),
        np.asarray(y, dtype=np.float64),
        jitter,
    )


@dataclass
class FittedGP:
    X: np.ndarray
    y_centered: np.ndarray
    y_mean: float
    length_scale: float
    signal_variance: float
    noise_variance: float
    lml: float
    L: np.ndarray
    alpha: np.ndarray


def gp_fit(
    X: np.ndarray, y: np.ndarray, params: GPParams, deadline_t0_pair=None
) -> FittedGP:
    """Fit kernel hyperparameters by multi-start LML maximization."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(y) < 1:
        raise ValueError("gp_fit requires at least one observation")
    y_mean = float(y.mean())
    yc = y - y_mean
    log_lo = np.log(
        [
            params.length_scale_bounds[0],
            params.signal_variance_bounds[0],
            params.noise_variance_bounds[0],
        ]
    )
    log_hi = np.log(
        [
            params.length_scale_bounds[1],
            params.signal_variance_bounds[1],
            params.noise_variance_bounds[1],
        ]
    )
    start0 = np.clip(
        np.log([params.length_scale, params.signal_variance, params.noise_variance]),
        log_lo,
        log_hi,
    )
    rng = np.random.Generator(np.random.Philox(key=[params.rng_seed, 300]))
    starts = [start0] + [
        rng.uniform(log_lo, log_hi) for _ in range(params.restarts)
    ]

    D2 = _sqdist(X, X)
    eye = np.eye(len(yc))

    def objective(log_theta):
        lml, grad = _lml_core(log_theta, D2, eye, yc, params.jitter)
        return -lml, -grad

    best_theta, best_lml = None, -np.inf
    for s in starts:
        if deadline_t0_pair is not None:
            _check_deadline(*deadline_t0_pair)
        res = optimize.minimize(
            objective,
            s,
            jac=True,
            method="L-BFGS-B",
            bounds=list(zip(log_lo, log_hi)),
            options={"maxiter": params.max_opt_iter},
        )
        if -res.fun > best_lml:
            best_lml, best_theta = -res.fun, res.x
    ls, sv, nv = np.exp(best_theta)
    K = kernel_matrix(X, X, ls, sv) + nv * np.eye(len(yc))
    L, _ = cholesky_with_jitter(K, params.jitter)
    alpha = linalg.cho_solve((L, True), yc)
    return FittedGP(
        X=X,
        y_centered=yc,
        y_mean=y_mean,
        length_scale=float(ls),
        signal_variance=float(sv),
        noise_variance=float(nv),
        lml=float(best_lml),
        L=L,
        alpha=alpha,
    )


def gp_predict(
    fit: FittedGP,
    query: np.ndarray,
    block_size: int = 100_000,
    deadline_t0_pair=None,
) -> tuple[np.ndarray, np.ndarray]:
    """Posterior mean and variance at `query` points, evaluated in blocks."""
    query = np.asarray(query, dtype=np.float64)
    n = len(query)
    mean = np.empty(n, dtype=np.float64)
    var = np.empty(n, dtype=np.float64)
    for i in range(0, n, block_size):
        if deadline_t0_pair is not None:
            _check_deadline(*deadline_t0_pair)
        q = query[i : i + block_size]
        ks = kernel_matrix(fit.X, q, fit.length_scale, fit.signal_variance)
        mean[i : i + block_size] = ks.T @ fit.alpha + fit.y_mean
        v = linalg.solve_triangular(fit.L, ks, lower=True)
        var[i : i + block_size] = np.maximum(
            fit.signal_variance - np.einsum("ij,ij->j", v, v), 0.0
        )
    return mean, var


class GPEstimator:
    id = "gp"

    def __init__(self, params: GPParams | None = None):
        self.params = params or GPParams()

    def estimate(
        self,
        observations: list[Observation],
        geometry: Geometry,
        deadline: float | None = None,
    ) -> InformationModel:
        t0 = time.perf_counter()
        p = self.params
        h, w = geometry.shape
        fields, variance = {}, {}
        xs, ys = np.meshgrid(np.arange(w), np.arange(h))
        grid = np.column_stack([xs.ravel(), ys.ravel()]).astype(np.float64)
        dpair = (t0, deadline)
        for m in Measurement:
            if not observations:
                fields[m] = np.full((h, w), p.default_value[m], dtype=np.float32)
                variance[m] = np.full(
                    (h, w), p.signal_variance + p.noise_variance, dtype=np.float32
                )
                continue
            X = np.array([(o.x, o.y) for o in observations], dtype=np.float64)
            y = np.array([o.values[m] for o in observations], dtype=np.float64)
            try:
                fit = gp_fit(X, y, p, deadline_t0_pair=dpair)
            except EstimatorError as exc:
                raise EstimatorError(f"{self.id}/{m.name}: {exc}") from exc
            mean, var = gp_predict(
                fit, grid, block_size=p.block_size, deadline_t0_pair=dpair
            )
            np.clip(mean, p.clip_range[0], p.clip_range[1], out=mean)
            fields[m] = mean.reshape(h, w).astype(np.float32)
            variance[m] = var.reshape(h, w).astype(np.float32)
        return InformationModel(
            geometry=geometry,
            fields=fields,
            variance=variance,
            estimator_id=self.id,
            n_obs=len(observations),
            seconds=time.perf_counter() - t0,
        )


def make_estimator(name: str, params=None):
    if name == "adaptive-disk":
        return AdaptiveDiskEstimator(params)
    if name == "gp":
        return GPEstimator(params)
    raise ValueError(f"unknown estimator {name!r}")
