"""Masked, weighted, asymmetric loss between truth and estimate.

The loss averages per-cell asymmetric squared errors over the relevance-masked
cells of every measurement and every scoring timepoint, weighted by the
per-measurement importance weights and normalized by the total weighted mask
size, so the result is invariant to rescaling all weights. Lower is better;
the *score* is the negated loss. Disease errors with the default parameters
penalize overestimating health (a missed infection) ten times harder than the
reverse.

Accumulation is double precision with numpy's pairwise summation in row-major
order, so reports are bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import Measurement

#: (w, c_minus, c_plus) per measurement: the canonical parametrization.
DEFAULT_WEIGHTS = {
    Measurement.TYLCV: 1.0,
    Measurement.CCR: 0.2,
    Measurement.HUMIDITY: 0.1,
}
DEFAULT_ASYMMETRY = {
    Measurement.TYLCV: (1.0, 10.0),
    Measurement.CCR: (1.0, 10.0),
    Measurement.HUMIDITY: (1.0, 1.0),
}


@dataclass
class ScoreConfig:
    weights: dict[Measurement, float] = field(
        default_factory=lambda: dict(DEFAULT_WEIGHTS)
    )
    asymmetry: dict[Measurement, tuple[float, float]] = field(
        default_factory=lambda: dict(DEFAULT_ASYMMETRY)
    )

    def __post_init__(self):
        for m in Measurement:
            if self.weights.get(m, 0.0) <= 0:
                raise ValueError(f"weight for {m.name} must be > 0")


@dataclass
class ScoreReport:
    total_loss: float
    components: dict[Measurement, float]  # normalized, sum to total_loss
    per_timepoint: dict[int, dict[Measurement, float]]  # raw masked AE sums
    timepoints: list[int]
    normalizer: float

    @property
    def score(self) -> float:
        return -self.total_loss

    def to_text(self) -> str:
        lines = [
            f"total_loss: {self.total_loss!r}",
            f"score: {self.score!r}",
            f"timepoints: {','.join(str(t) for t in self.timepoints)}",
            f"normalizer: {self.normalizer!r}",
        ]
        for m in Measurement:
            lines.append(f"component.{m.name.lower()}: {self.components[m]!r}")
        for t in self.timepoints:
            for m in Measurement:
                lines.append(
                    f"timepoint.{t}.{m.name.lower()}: {self.per_timepoint[t][m]!r}"
                )
        return "\n".join(lines) + "\n"


def asymmetric_error(a, b, c_minus: float, c_plus: float):
    """Squared error weighted c_plus where a < b (overestimate), else c_minus.

    Works elementwise on arrays; scalar inputs give a scalar back.
    """
    a64 = np.asarray(a, dtype=np.float64)
    b64 = np.asarray(b, dtype=np.float64)
    sq = (a64 - b64) ** 2
    out = np.where(a64 < b64, c_plus * sq, c_minus * sq)
    return float(out) if out.ndim == 0 else out


def masked_ae_sum(
    truth: np.ndarray,
    estimate: np.ndarray,
    mask: np.ndarray,
    c_minus: float,
    c_plus: float,
) -> float:
    """Sum of asymmetric errors over masked cells (pairwise f64 summation)."""
    if truth.shape != estimate.shape or truth.shape != mask.shape:
        raise ValueError(
            f"shape mismatch: truth {truth.shape}, estimate {estimate.shape}, "
            f"mask {mask.shape}"
        )
    ae = asymmetric_error(truth, estimate, c_minus, c_plus)
    return float(np.sum(ae * mask, dtype=np.float64))


def compute_loss(
    env_snapshots: dict[int, dict[Measurement, np.ndarray]],
    info_snapshots: dict[int, dict[Measurement, np.ndarray]],
    masks: dict[Measurement, np.ndarray],
    config: ScoreConfig,
) -> ScoreReport:
    """The official loss over a set of scoring timepoints.

    `env_snapshots` and `info_snapshots` map timepoint -> measurement -> grid
    and must cover the same timepoints.
    """
    timepoints = sorted(env_snapshots)
    if sorted(info_snapshots) != timepoints:
        raise ValueError("environment and information snapshots disagree on timepoints")
    if not timepoints:
        raise ValueError("at least one scoring timepoint is required")
    normalizer = len(timepoints) * sum(
        config.weights[m] * float(np.sum(masks[m], dtype=np.float64))
        for m in Measurement
    )
    if normalizer == 0.0:
        raise ValueError("degenerate normalizer: all relevance masks are empty")
    per_timepoint: dict[int, dict[Measurement, float]] = {}
    weighted = {m: 0.0 for m in Measurement}
    for t in timepoints:
        per_timepoint[t] = {}
        for m in Measurement:
            c_minus, c_plus = config.asymmetry[m]
            s = masked_ae_sum(
                env_snapshots[t][m], info_snapshots[t][m], masks[m], c_minus, c_plus
            )
            per_timepoint[t][m] = s
            weighted[m] += config.weights[m] * s
    components = {m: weighted[m] / normalizer for m in Measurement}
    total = sum(components[m] for m in Measurement)
    return ScoreReport(
        total_loss=total,
        components=components,
        per_timepoint=per_timepoint,
        timepoints=timepoints,
        normalizer=normalizer,
    )


def single_timepoint_loss(
    env_fields: dict[Measurement, np.ndarray],
    info_fields: dict[Measurement, np.ndarray],
    masks: dict[Measurement, np.ndarray],
    config: ScoreConfig,
    timepoint: int = 0,
) -> ScoreReport:
    """Diagnostic loss of one snapshot pair (c = 1)."""
    return compute_loss(
        {timepoint: env_fields}, {timepoint: info_fields}, masks, config
    )
