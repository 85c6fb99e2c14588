"""Fire risk weighted overlay.

Six input layers are scored to [0, 1] through reclassification tables, then
combined cellwise:

    FRI = 1 + 75*lc + 30*sl + 10*a + 5*r + 5*se + 2*e

lc: land cover, sl: slope, a: aspect, r: road proximity, se: settlement
proximity, e: elevation. With unit score scales the index spans [1, 128].
Land cover dominates: its coefficient exceeds all others combined.

The shipped score tables are engine defaults meant to be overridden per
study area; every table is ordinary configuration, not a constant.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields

import numpy as np

from . import raster
from .raster import Grid, ReclassTable


class FireRiskError(ValueError):
    """Invalid fire-risk inputs or score tables."""


# Land cover class codes used by the default table.
LAND_COVER_CLASSES = {
    1: "dense forest",
    2: "shrub",
    3: "agriculture",
    4: "grassland",
    5: "built-up",
    6: "water",
    7: "bare",
}


@dataclass(frozen=True)
class ScoreTables:
    land_cover_scores: ReclassTable
    slope_scores: ReclassTable
    aspect_scores: ReclassTable
    road_distance_scores: ReclassTable
    settlement_distance_scores: ReclassTable
    elevation_scores: ReclassTable

    def __post_init__(self):
        for f in fields(self):
            table: ReclassTable = getattr(self, f.name)
            for out in table.outputs():
                if not 0.0 <= out <= 1.0:
                    raise FireRiskError(f"{f.name}: score {out!r} outside [0, 1]")
            if table.default_output is not None and not 0.0 <= table.default_output <= 1.0:
                raise FireRiskError(f"{f.name}: default score outside [0, 1]")


_INF = float("inf")

_DISTANCE_RANGES = (
    (0.0, 100.0, 1.0),
    (100.0, 200.0, 0.8),
    (200.0, 400.0, 0.6),
    (400.0, 800.0, 0.4),
    (800.0, _INF, 0.2),
)


def default_score_tables() -> ScoreTables:
    """Engine default scores: flammability by cover, fire-prone terrain, and
    human ignition pressure falling off with distance."""
    return ScoreTables(
        land_cover_scores=ReclassTable(
            categories={1: 1.0, 2: 0.8, 3: 0.6, 4: 0.4, 5: 0.2, 6: 0.0, 7: 0.0}
        ),
        slope_scores=ReclassTable(
            ranges=(
                (0.0, 5.0, 0.2),
                (5.0, 15.0, 0.4),
                (15.0, 25.0, 0.6),
                (25.0, 35.0, 0.8),
                (35.0, _INF, 1.0),
            )
        ),
        # South-facing slopes get the most sun; score decays toward north.
        aspect_scores=ReclassTable(
            ranges=(
                (0.0, 45.0, 0.1),
                (45.0, 90.0, 0.4),
                (90.0, 135.0, 0.7),
                (135.0, 225.0, 1.0),
                (225.0, 270.0, 0.7),
                (270.0, 315.0, 0.4),
                (315.0, 360.0, 0.1),
            )
        ),
        road_distance_scores=ReclassTable(ranges=_DISTANCE_RANGES),
        settlement_distance_scores=ReclassTable(ranges=_DISTANCE_RANGES),
        elevation_scores=ReclassTable(
            ranges=(
                (-_INF, 800.0, 1.0),
                (800.0, 1200.0, 0.75),
                (1200.0, 1800.0, 0.5),
                (1800.0, 2400.0, 0.25),
                (2400.0, _INF, 0.1),
            )
        ),
    )


@dataclass(frozen=True)
class FireRiskInputs:
    land_cover: Grid
    dem: Grid
    roads_mask: Grid
    settlements_mask: Grid

    def __post_init__(self):
        raster.require_aligned(
            self.land_cover,
            self.dem,
            self.roads_mask,
            self.settlements_mask,
            what="fire-risk inputs",
        )


@dataclass(frozen=True)
class FireRiskScores:
    lc: Grid
    sl: Grid
    a: Grid
    r: Grid
    se: Grid
    e: Grid

    def __post_init__(self):
        grids = [getattr(self, f.name) for f in fields(self)]
        raster.require_aligned(*grids, what="score layers")
        for f in fields(self):
            grid: Grid = getattr(self, f.name)
            vals = grid.values[grid.valid]
            if vals.size and (vals.min() < 0.0 or vals.max() > 1.0):
                raise FireRiskError(f"score layer {f.name} has values outside [0, 1]")


def score_layers(inputs: FireRiskInputs, tables: ScoreTables) -> FireRiskScores:
    """Derive and score all six layers.

    Flat cells (aspect sentinel -1) always score 0 regardless of the aspect
    table: a flat cell has no sun-facing direction.
    """
    aspect = raster.aspect(inputs.dem)
    a = raster.reclassify(aspect, tables.aspect_scores)
    flat = aspect.valid & (aspect.values == raster.FLAT_ASPECT)
    if flat.any():
        scored = a.values.copy()
        scored[flat] = 0.0
        a = a.with_values(scored)
    return FireRiskScores(
        lc=raster.reclassify(inputs.land_cover, tables.land_cover_scores),
        sl=raster.reclassify(raster.slope(inputs.dem), tables.slope_scores),
        a=a,
        r=raster.reclassify(raster.proximity(inputs.roads_mask), tables.road_distance_scores),
        se=raster.reclassify(
            raster.proximity(inputs.settlements_mask), tables.settlement_distance_scores
        ),
        e=raster.reclassify(inputs.dem, tables.elevation_scores),
    )


FRI_COEFFICIENTS = {"lc": 75.0, "sl": 30.0, "a": 10.0, "r": 5.0, "se": 5.0, "e": 2.0}

FRI_MIN = 1.0
FRI_MAX = 1.0 + sum(FRI_COEFFICIENTS.values())  # 128


def fire_risk_index(scores: FireRiskScores) -> Grid:
    """Cellwise weighted overlay; nodata in any score layer propagates."""
    layers = {name: getattr(scores, name) for name in FRI_COEFFICIENTS}
    template = scores.lc
    ok = np.ones(template.values.shape, dtype=bool)
    for grid in layers.values():
        ok &= grid.valid
    out = np.full(template.values.shape, template.nodata_value)
    fri = np.full(template.values.shape, FRI_MIN)
    for name, coeff in FRI_COEFFICIENTS.items():
        fri = fri + coeff * layers[name].values
    out[ok] = fri[ok]
    return template.with_values(out)


def classify_risk_zones(fri: Grid, num_classes: int = 5) -> tuple[Grid, dict[int, float]]:
    """Equal-interval risk classes over [1, 128] plus per-class area in km².

    Class k covers [1 + (k-1)*127/n, 1 + k*127/n), the last class closed at
    128. Every class appears in the area map, zero-area ones included.
    """
    if num_classes < 2:
        raise FireRiskError(f"need at least 2 risk classes, got {num_classes}")
    valid = fri.valid
    vals = fri.values[valid]
    if vals.size:
        lo, hi = float(vals.min()), float(vals.max())
        if lo < FRI_MIN or hi > FRI_MAX:
            raise FireRiskError(f"FRI values span [{lo}, {hi}], outside [1, 128]")
    span = FRI_MAX - FRI_MIN
    classes = np.full(fri.values.shape, fri.nodata_value)
    k = 1.0 + np.floor((fri.values - FRI_MIN) * num_classes / span)
    classes[valid] = np.clip(k[valid], 1, num_classes)
    class_grid = fri.with_values(classes)
    cell_km2 = fri.cellsize * fri.cellsize / 1e6
    areas = {c: 0.0 for c in range(1, num_classes + 1)}
    values, counts = np.unique(classes[valid], return_counts=True)
    for v, count in zip(values, counts):
        areas[int(v)] = float(count) * cell_km2
    return class_grid, areas


# ---------------------------------------------------------------------------
# Score-table JSON IO

_TABLE_NAMES = (
    "land_cover_scores",
    "slope_scores",
    "aspect_scores",
    "road_distance_scores",
    "settlement_distance_scores",
    "elevation_scores",
)


def _table_from_json(name: str, doc) -> ReclassTable:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise FireRiskError(f"{name}: expected an object with a 'kind' key")
    kind = doc["kind"]
    default = doc.get("default_output")
    if kind == "categories":
        cats = doc.get("categories")
        if not isinstance(cats, dict):
            raise FireRiskError(f"{name}: categories table needs a 'categories' object")
        return ReclassTable(
            categories={float(k): float(v) for k, v in cats.items()},
            default_output=None if default is None else float(default),
        )
    if kind == "ranges":
        ranges = doc.get("ranges")
        if not isinstance(ranges, list):
            raise FireRiskError(f"{name}: ranges table needs a 'ranges' array")
        parsed = []
        for entry in ranges:
            if not isinstance(entry, list) or len(entry) != 3:
                raise FireRiskError(f"{name}: each range is [low, high, score]")
            lo = -_INF if entry[0] is None else float(entry[0])
            hi = _INF if entry[1] is None else float(entry[1])
            parsed.append((lo, hi, float(entry[2])))
        return ReclassTable(
            ranges=tuple(parsed),
            default_output=None if default is None else float(default),
        )
    raise FireRiskError(f"{name}: unknown table kind '{kind}'")


def load_score_tables(document: str | bytes) -> ScoreTables:
    """Parse a JSON score-tables document; unbounded range ends are null."""
    text = document.decode("utf-8") if isinstance(document, bytes) else document
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FireRiskError(f"line {exc.lineno}: invalid JSON: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise FireRiskError("score-tables document must be a JSON object")
    missing = [name for name in _TABLE_NAMES if name not in doc]
    if missing:
        raise FireRiskError(f"missing table(s): {', '.join(missing)}")
    try:
        tables = {name: _table_from_json(name, doc[name]) for name in _TABLE_NAMES}
    except raster.ReclassTableError as exc:
        raise FireRiskError(str(exc)) from None
    return ScoreTables(**tables)


def serialize_score_tables(tables: ScoreTables) -> str:
    doc = {}
    for name in _TABLE_NAMES:
        table: ReclassTable = getattr(tables, name)
        if table.categories is not None:
            entry = {
                "kind": "categories",
                "categories": {raster.format_number(k): v for k, v in sorted(table.categories.items())},
            }
        else:
            entry = {
                "kind": "ranges",
                "ranges": [
                    [
                        None if math.isinf(lo) else lo,
                        None if math.isinf(hi) else hi,
                        out,
                    ]
                    for lo, hi, out in table.ranges
                ],
            }
        if table.default_output is not None:
            entry["default_output"] = table.default_output
        doc[name] = entry
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
