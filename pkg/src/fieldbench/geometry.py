"""Farm layouts, crop/owner classification and measurement masks.

A geometry is a pair of small-integer grids (crop kind, owner) plus the
derived boolean masks used by the disease dynamics and the scoring:

* the *relevance* mask selects the client-owned cells that count toward
  the score for a measurement;
* the *susceptibility* mask selects every cell a disease can live on,
  including neighbor-owned crops (diseases ignore property lines).

Grids are numpy arrays of shape (height, width), indexed ``[y, x]``.
Geometries are immutable after construction and safe to share.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

GEOMETRY_NAMES = ("waterberry", "miniberry-10", "miniberry-30", "miniberry-100")


class ConfigurationError(ValueError):
    """Raised for invalid names or parameter combinations."""


class CropKind(enum.IntEnum):
    UNPLANTED = 0
    TOMATO = 1
    STRAWBERRY = 2
    POND = 3
    WETLAND = 4


class Owner(enum.IntEnum):
    PUBLIC = 0
    CLIENT = 1
    NEIGHBOR1 = 2
    NEIGHBOR2 = 3
    NEIGHBOR3 = 4
    NEIGHBOR4 = 5


class Measurement(enum.IntEnum):
    """The three measurable quantities; order fixes field/CSV layout."""

    TYLCV = 0
    CCR = 1
    HUMIDITY = 2


DISEASES = (Measurement.TYLCV, Measurement.CCR)

#: Crop a disease lives on.
DISEASE_CROP = {
    Measurement.TYLCV: CropKind.TOMATO,
    Measurement.CCR: CropKind.STRAWBERRY,
}

_KIND_BY_NAME = {
    "unplanted": CropKind.UNPLANTED,
    "tomato": CropKind.TOMATO,
    "strawberry": CropKind.STRAWBERRY,
    "pond": CropKind.POND,
    "wetland": CropKind.WETLAND,
}

_OWNER_BY_NAME = {
    "public": Owner.PUBLIC,
    "client": Owner.CLIENT,
    "neighbor1": Owner.NEIGHBOR1,
    "neighbor2": Owner.NEIGHBOR2,
    "neighbor3": Owner.NEIGHBOR3,
    "neighbor4": Owner.NEIGHBOR4,
}


@dataclass(frozen=True)
class Geometry:
    """Immutable farm layout: per-cell crop kind and owner."""

    name: str
    width: int
    height: int
    kind: np.ndarray  # uint8 grid of CropKind, shape (height, width)
    owner: np.ndarray  # uint8 grid of Owner, shape (height, width)
    _mask_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.kind.setflags(write=False)
        self.owner.setflags(write=False)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.height, self.width)

    @property
    def n_cells(self) -> int:
        return self.width * self.height

    def in_bounds(self, x: int, y: int) -> bool:
        return 0 <= x < self.width and 0 <= y < self.height

    def client_crop_bbox(self, kind: CropKind) -> tuple[int, int, int, int]:
        """Bounding box (x0, y0, x1, y1), half-open, of client cells of `kind`."""
        sel = (self.kind == kind) & (self.owner == Owner.CLIENT)
        ys, xs = np.nonzero(sel)
        if len(xs) == 0:
            raise ConfigurationError(f"{self.name} has no client {kind.name} cells")
        return int(xs.min()), int(ys.min()), int(xs.max()) + 1, int(ys.max()) + 1


def relevance_mask(g: Geometry, m: Measurement) -> np.ndarray:
    """Boolean grid of cells that count toward the score for measurement `m`.

    Diseases are relevant on the client's matching crop; humidity on every
    client-planted cell (tomato or strawberry).
    """
    key = ("rel", m)
    cached = g._mask_cache.get(key)
    if cached is not None:
        return cached
    client = g.owner == Owner.CLIENT
    if m == Measurement.HUMIDITY:
        mask = client & (
            (g.kind == CropKind.TOMATO) | (g.kind == CropKind.STRAWBERRY)
        )
    else:
        mask = client & (g.kind == DISEASE_CROP[m])
    mask.setflags(write=False)
    g._mask_cache[key] = mask
    return mask


def susceptibility_mask(g: Geometry, m: Measurement) -> np.ndarray:
    """Boolean grid of every cell disease `m` can infect, any owner."""
    if m not in DISEASE_CROP:
        raise ValueError(f"{m!r} is not a disease; no susceptibility mask")
    key = ("sus", m)
    cached = g._mask_cache.get(key)
    if cached is not None:
        return cached
    mask = g.kind == DISEASE_CROP[m]
    mask.setflags(write=False)
    g._mask_cache[key] = mask
    return mask


def build_geometry(name: str) -> Geometry:
    """Construct one of the canonical layouts by name.

    Known names: ``waterberry`` and ``miniberry-10/-30/-100``. Deterministic;
    the waterberry layout is loaded from a checked-in rectangle file.
    """
    if name == "waterberry":
        text = (
            resources.files("fieldbench.data").joinpath("waterberry.layout").read_text()
        )
        return geometry_from_layout(name, text)
    if name.startswith("miniberry-"):
        try:
            n = int(name.split("-", 1)[1])
        except ValueError:
            n = -1
        if n in (10, 30, 100):
            return _build_miniberry(name, n)
    raise ConfigurationError(
        f"unknown geometry {name!r}; expected one of {GEOMETRY_NAMES}"
    )


def _build_miniberry(name: str, n: int) -> Geometry:
    # Left half strawberry, right half tomato, everything client-owned.
    kind = np.empty((n, n), dtype=np.uint8)
    kind[:, : n // 2] = CropKind.STRAWBERRY
    kind[:, n // 2 :] = CropKind.TOMATO
    owner = np.full((n, n), Owner.CLIENT, dtype=np.uint8)
    return Geometry(name=name, width=n, height=n, kind=kind, owner=owner)


def geometry_from_layout(name: str, text: str) -> Geometry:
    """Build a geometry from a rectangle layout description.

    One rectangle per line: ``x0 y0 x1 y1 kind owner`` with half-open
    coordinate ranges; later lines overwrite earlier ones. Blank lines and
    ``#`` comments are ignored. The first rectangle must cover the full area
    (it defines the grid size).
    """
    rects = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 6:
            raise ConfigurationError(f"layout line {lineno}: expected 6 fields")
        x0, y0, x1, y1 = (int(p) for p in parts[:4])
        try:
            kind = _KIND_BY_NAME[parts[4].lower()]
            owner = _OWNER_BY_NAME[parts[5].lower()]
        except KeyError as exc:
            raise ConfigurationError(f"layout line {lineno}: unknown {exc}") from None
        if not (0 <= x0 < x1 and 0 <= y0 < y1):
            raise ConfigurationError(f"layout line {lineno}: bad rectangle")
        rects.append((x0, y0, x1, y1, kind, owner))
    if not rects:
        raise ConfigurationError("empty layout")
    x0, y0, x1, y1, kind0, owner0 = rects[0]
    if (x0, y0) != (0, 0):
        raise ConfigurationError("first layout rectangle must start at (0, 0)")
    width, height = x1, y1
    kind = np.full((height, width), kind0, dtype=np.uint8)
    owner = np.full((height, width), owner0, dtype=np.uint8)
    for rx0, ry0, rx1, ry1, k, o in rects[1:]:
        if rx1 > width or ry1 > height:
            raise ConfigurationError("layout rectangle exceeds grid bounds")
        kind[ry0:ry1, rx0:rx1] = k
        owner[ry0:ry1, rx0:rx1] = o
    return Geometry(name=name, width=width, height=height, kind=kind, owner=owner)
