"""Ground-truth field generation: plant epidemics and soil humidity.

Each disease runs a 2-D SIRV process on its crop's cells: susceptible cells
get infected with a probability driven by a convolution of the infected
indicator with a distance-decay kernel, infected cells die off after a fixed
number of days, and non-crop cells are permanently V. Soil humidity loses a
constant amount per day to evaporation and gains periodic Gaussian-shaped
showers.

Field value convention: disease grids encode plant *health* (1.0 healthy or
not-susceptible, 0.0 infected or dead); humidity grids hold the raw value in
[0, 1]. Fields are stored as float32, matching the snapshot file formats
bit for bit.

Everything is deterministic given the geometry and parameter seeds; each
stochastic process draws from its own counter-based RNG stream so the models
cannot perturb each other.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .geometry import (
    DISEASES,
    ConfigurationError,
    Geometry,
    Measurement,
    susceptibility_mask,
)

# Per-cell epidemic states.
S, I, R, V = 0, 1, 2, 3


def make_infection_kernel(radius: int = 2) -> np.ndarray:
    """Distance-decay propagation kernel of side 2*radius + 1.

    Weight 1/d^2 at Euclidean distance d from the center, zero at the center
    itself, normalized to sum to 1 (so `p_total` alone sets the total
    propagation pressure of a lone infected cell).
    """
    if radius < 1:
        raise ConfigurationError("kernel radius must be >= 1")
    ax = np.arange(-radius, radius + 1, dtype=np.float64)
    d2 = ax[:, None] ** 2 + ax[None, :] ** 2
    with np.errstate(divide="ignore"):
        k = np.where(d2 > 0, 1.0 / d2, 0.0)
    return k / k.sum()


@dataclass
class EpidemicParams:
    """Parameters of one disease's spread process."""

    p_total: float
    infect_duration: int
    kernel: np.ndarray = field(default_factory=make_infection_kernel)
    seeds: int = 3
    rng_seed: int = 0

    def __post_init__(self):
        self.kernel = np.asarray(self.kernel, dtype=np.float64)
        if self.kernel.ndim != 2 or self.kernel.shape[0] != self.kernel.shape[1]:
            raise ConfigurationError("kernel must be a square matrix")
        if self.kernel.shape[0] % 2 == 0:
            raise ConfigurationError("kernel side must be odd")
        c = self.kernel.shape[0] // 2
        if self.kernel[c, c] != 0.0:
            raise ConfigurationError("kernel center weight must be 0")
        if (self.kernel < 0).any():
            raise ConfigurationError("kernel weights must be non-negative")
        if self.p_total < 0:
            raise ConfigurationError("p_total must be >= 0")
        if self.infect_duration < 1:
            raise ConfigurationError("infect_duration must be >= 1")
        if self.seeds < 0:
            raise ConfigurationError("seeds must be >= 0")


@dataclass
class HumidityParams:
    """Parameters of the evaporation/shower humidity process."""

    evaporation_rate: float = 0.04
    shower_period: int = 3
    showers_per_event: int = 2
    shower_amplitude: float = 0.7
    h: float | None = None  # shower extent along x; defaults to grid width
    w: float | None = None  # shower extent along y; defaults to grid height
    initial: float = 0.5
    rng_seed: int = 0

    def __post_init__(self):
        if self.evaporation_rate < 0:
            raise ConfigurationError("evaporation_rate must be >= 0")
        if self.shower_amplitude < 0:
            raise ConfigurationError("shower_amplitude must be >= 0")
        if self.shower_period < 1:
            raise ConfigurationError("shower_period must be >= 1")


def _stream(seed: int, stream_id: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed, stream_id]))


class Environment:
    """The ground-truth environment tensor E(x, y, t, m) at day granularity.

    Holds one float32 value grid per measurement plus the epidemic state and
    infection-age grids for each disease. `advance_day` is the only mutator.
    """

    def __init__(
        self,
        geometry: Geometry,
        epidemic_params: dict[Measurement, EpidemicParams],
        humidity_params: HumidityParams,
    ):
        for m in DISEASES:
            if m not in epidemic_params:
                raise ConfigurationError(f"missing epidemic params for {m.name}")
        self.geometry = geometry
        self.epidemic_params = epidemic_params
        self.humidity_params = humidity_params
        self.day = 0
        shape = geometry.shape
        self.fields = {m: np.empty(shape, dtype=np.float32) for m in Measurement}
        self.state: dict[Measurement, np.ndarray] = {}
        self.age: dict[Measurement, np.ndarray] = {}
        # stream ids: disease index for epidemics, 100 for humidity
        self._rngs = {
            m: _stream(epidemic_params[m].rng_seed, int(m)) for m in DISEASES
        }
        self._rngs[Measurement.HUMIDITY] = _stream(humidity_params.rng_seed, 100)
        for m in DISEASES:
            self._init_disease(m)
        self.fields[Measurement.HUMIDITY].fill(np.float32(humidity_params.initial))

    def _init_disease(self, m: Measurement) -> None:
        params = self.epidemic_params[m]
        mask = susceptibility_mask(self.geometry, m)
        state = np.where(mask, S, V).astype(np.uint8)
        n_susceptible = int(mask.sum())
        if params.seeds > n_susceptible:
            raise ConfigurationError(
                f"{m.name}: {params.seeds} seeds exceed "
                f"{n_susceptible} susceptible cells"
            )
        if params.seeds > 0:
            flat = np.flatnonzero(mask)
            chosen = self._rngs[m].choice(flat, size=params.seeds, replace=False)
            state.reshape(-1)[chosen] = I
        self.state[m] = state
        self.age[m] = np.zeros(self.geometry.shape, dtype=np.int32)
        self._refresh_disease_field(m)

    def _refresh_disease_field(self, m: Measurement) -> None:
        # health encoding: S and V read as 1.0, I and R as 0.0
        state = self.state[m]
        healthy = (state == S) | (state == V)
        self.fields[m][:] = healthy.astype(np.float32)

    def step_epidemic(self, m: Measurement) -> None:
        """One day of SIRV dynamics for disease `m`."""
        params = self.epidemic_params[m]
        state = self.state[m]
        age = self.age[m]
        infected = state == I
        if infected.any() and params.p_total > 0:
            pressure = ndimage.convolve(
                infected.astype(np.float64), params.kernel, mode="constant", cval=0.0
            )
            prob = np.minimum(params.p_total * pressure, 1.0)
            candidates = (state == S) & (prob > 0)
            idx = np.flatnonzero(candidates)  # row-major order, stable
            if idx.size:
                u = self._rngs[m].random(idx.size)
                newly = idx[u < prob.reshape(-1)[idx]]
            else:
                newly = idx
        else:
            newly = np.empty(0, dtype=np.intp)
        age[infected] += 1
        expired = infected & (age >= params.infect_duration)
        state[expired] = R
        if newly.size:
            state.reshape(-1)[newly] = I
            age.reshape(-1)[newly] = 0
        self._refresh_disease_field(m)

    def step_humidity(self) -> None:
        """One day of evaporation, plus showers on period boundaries."""
        params = self.humidity_params
        hum = self.fields[Measurement.HUMIDITY]
        np.clip(hum - np.float32(params.evaporation_rate), 0.0, 1.0, out=hum)
        if self.day % params.shower_period != 0:
            return
        rng = self._rngs[Measurement.HUMIDITY]
        width, height = self.geometry.width, self.geometry.height
        ext_x = params.h if params.h is not None else float(width)
        ext_y = params.w if params.w is not None else float(height)
        sigma_x, sigma_y = ext_x / 8.0, ext_y / 8.0
        xs = np.arange(width, dtype=np.float64)
        ys = np.arange(height, dtype=np.float64)
        for _ in range(params.showers_per_event):
            mu_x = rng.uniform(0.0, width)
            mu_y = rng.uniform(0.0, height)
            gx = np.exp(-((xs - mu_x) ** 2) / (2.0 * sigma_x**2))
            gy = np.exp(-((ys - mu_y) ** 2) / (2.0 * sigma_y**2))
            bump = params.shower_amplitude * np.outer(gy, gx)
            np.clip(hum + bump.astype(np.float32), 0.0, 1.0, out=hum)

    def advance_day(self) -> None:
        """Advance the environment by one day: both epidemics, then humidity."""
        for m in DISEASES:
            self.step_epidemic(m)
        self.step_humidity()
        self.day += 1

    def read_point(self, x: int, y: int) -> np.ndarray:
        """Exact, noiseless point sample E(x, y, t, :) as a float32 triple."""
        if not self.geometry.in_bounds(x, y):
            raise ValueError(f"read_point({x}, {y}) outside {self.geometry.shape}")
        return np.array(
            [self.fields[m][y, x] for m in Measurement], dtype=np.float32
        )

    def field_snapshot(self, m: Measurement) -> np.ndarray:
        """Read-only copy of the current value grid for measurement `m`."""
        return self.fields[m].copy()

    def census(self, m: Measurement) -> dict[str, int]:
        """S/I/R/V cell counts for a disease."""
        state = self.state[m]
        return {
            "S": int((state == S).sum()),
            "I": int((state == I).sum()),
            "R": int((state == R).sum()),
            "V": int((state == V).sum()),
        }


def init_environment(
    geometry: Geometry,
    ep_tylcv: EpidemicParams,
    ep_ccr: EpidemicParams,
    hp: HumidityParams,
) -> Environment:
    """Convenience constructor wiring the two diseases by measurement id."""
    return Environment(
        geometry,
        {Measurement.TYLCV: ep_tylcv, Measurement.CCR: ep_ccr},
        hp,
    )
