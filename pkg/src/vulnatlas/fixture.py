"""Synthetic demo region.

A 3 km x 3 km study area on a 100x100 grid of 30 m cells: 2 departments,
4 municipalities (one per column of villages), 8 villages (4x2 rectangles),
200 surveyed households. All generation is seeded and formula-driven so
repeated runs write byte-identical files.

The region deliberately omits grids for a few catalog indicators (soil
moisture, soil carbon, road quality) and blanks one village's credit answers
entirely, so missing-data handling is exercised end to end.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path

import numpy as np

from . import admin, catalog, raster

SEED = 914408
NCOLS = NROWS = 100
CELLSIZE = 30.0
EXTENT = NCOLS * CELLSIZE  # 3000 m
NODATA = -9999.0

VILLAGE_COLS = 4
VILLAGE_ROWS = 2
VILLAGE_W = EXTENT / VILLAGE_COLS  # 750 m
VILLAGE_H = EXTENT / VILLAGE_ROWS  # 1500 m
HOUSEHOLDS_PER_VILLAGE = 25

SURVEY_COLUMNS = [
    "household_id",
    "village_id",
    "members",
    "dependent_members",
    "disabled_members",
    "employed_members",
    "working_outside",
    "chronic_illness_members",
    "dengue_episodes",
    "crop_types",
    "head_age",
    "farm_area_ha",
    "education_years",
    "market_distance_minutes",
    "head_gender",
    "water_source",
    "water_distance",
    "sewage_type",
    "irrigation",
    "remittances",
    "credit_access",
    "orphans",
    "bed_nets",
    "info_access",
    "community_info_access",
]

# Columns that may be blanked to exercise missing-data handling.
_OPTIONAL = [c for c in SURVEY_COLUMNS if c not in ("household_id", "village_id")]


def _rect(x0: float, y0: float, x1: float, y1: float) -> admin.Polygon:
    return (((x0, y0), (x1, y0), (x1, y1), (x0, y1)),)


def build_admin_hierarchy() -> admin.AdminHierarchy:
    units: list[admin.AdminUnit] = []
    for d in range(2):
        x0 = d * EXTENT / 2
        units.append(
            admin.AdminUnit(
                unit_id=f"D{d + 1:02d}",
                name=f"Department {d + 1}",
                level=admin.Level.DEPARTMENT,
                parent_id=None,
                geometry=(_rect(x0, 0.0, x0 + EXTENT / 2, EXTENT),),
                household_count=4 * HOUSEHOLDS_PER_VILLAGE,
            )
        )
    for m in range(VILLAGE_COLS):
        x0 = m * VILLAGE_W
        units.append(
            admin.AdminUnit(
                unit_id=f"M{m + 1:02d}",
                name=f"Municipality {m + 1}",
                level=admin.Level.MUNICIPALITY,
                parent_id=f"D{m // 2 + 1:02d}",
                geometry=(_rect(x0, 0.0, x0 + VILLAGE_W, EXTENT),),
                household_count=2 * HOUSEHOLDS_PER_VILLAGE,
            )
        )
    for m in range(VILLAGE_COLS):
        x0 = m * VILLAGE_W
        for r in range(VILLAGE_ROWS):
            y0 = r * VILLAGE_H
            v = m * VILLAGE_ROWS + r
            units.append(
                admin.AdminUnit(
                    unit_id=f"V{v + 1:02d}",
                    name=f"Village {v + 1}",
                    level=admin.Level.VILLAGE,
                    parent_id=f"M{m + 1:02d}",
                    geometry=(_rect(x0, y0, x0 + VILLAGE_W, y0 + VILLAGE_H),),
                    household_count=HOUSEHOLDS_PER_VILLAGE,
                )
            )
    return admin.AdminHierarchy(units)


def village_ids() -> list[str]:
    return [f"V{v + 1:02d}" for v in range(VILLAGE_COLS * VILLAGE_ROWS)]


# ---------------------------------------------------------------------------
# Survey


def _pick(rng: np.random.Generator, codes: list[str], weights: list[float]) -> str:
    p = np.array(weights)
    return codes[int(rng.choice(len(codes), p=p / p.sum()))]


def _household_row(rng: np.random.Generator, household_id: str, village_id: str, t: float) -> dict:
    """One household; t in [0,1] tilts answers toward the vulnerable end."""
    members = int(rng.integers(2, 9))
    dependents = min(members - 1, int(rng.binomial(members, 0.2 + 0.3 * t)))
    row = {
        "household_id": household_id,
        "village_id": village_id,
        "members": members,
        "dependent_members": dependents,
        "disabled_members": int(rng.binomial(2, 0.04 + 0.1 * t)),
        "employed_members": int(rng.binomial(max(members - dependents, 1), 0.7 - 0.35 * t)),
        "working_outside": int(rng.binomial(2, 0.15 + 0.25 * t)),
        "chronic_illness_members": int(rng.binomial(3, 0.08 + 0.17 * t)),
        "dengue_episodes": int(rng.binomial(3, 0.05 + 0.25 * t)),
        "crop_types": 1 + int(rng.binomial(4, 0.65 - 0.4 * t)),
        "head_age": int(np.clip(rng.normal(38 + 14 * t, 12), 16, 85)),
        "farm_area_ha": round(max(0.1, float(rng.gamma(2.0, 1.3 - 0.55 * t))), 2),
        "education_years": int(np.clip(rng.normal(7 - 4 * t, 3), 0, 14)),
        "market_distance_minutes": int(15 + rng.random() * 55 + 150 * t),
        "head_gender": "female" if rng.random() < 0.25 + 0.2 * t else "male",
        "water_source": _pick(
            rng,
            ["public", "well", "truck", "river"],
            [0.5 - 0.4 * t, 0.3, 0.1 + 0.1 * t, 0.1 + 0.3 * t],
        ),
        "water_distance": _pick(
            rng,
            ["a", "b", "c", "d", "e", "f"],
            [w * (1 - t) + r * t for w, r in zip([30, 25, 20, 12, 8, 5], [5, 8, 12, 20, 25, 30])],
        ),
        # codes ordered by sanitation risk: sewer a, septic c, latrine d, pit b, none e
        "sewage_type": _pick(
            rng,
            ["a", "c", "d", "b", "e"],
            [w * (1 - t) + r * t for w, r in zip([35, 30, 20, 10, 5], [5, 10, 20, 30, 35])],
        ),
        "irrigation": "yes" if rng.random() < 0.55 - 0.35 * t else "no",
        "remittances": "yes" if rng.random() < 0.35 - 0.15 * t else "no",
        "credit_access": "yes" if rng.random() < 0.65 - 0.45 * t else "no",
        "orphans": "yes" if rng.random() < 0.04 + 0.16 * t else "no",
        "bed_nets": "yes" if rng.random() < 0.75 - 0.35 * t else "no",
        "info_access": "yes" if rng.random() < 0.7 - 0.4 * t else "no",
        "community_info_access": "yes" if rng.random() < 0.65 - 0.3 * t else "no",
    }
    return row


def build_survey_csv() -> str:
    rng = np.random.default_rng(SEED)
    villages = village_ids()
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=SURVEY_COLUMNS, lineterminator="\n")
    writer.writeheader()
    serial = 0
    for v, village_id in enumerate(villages):
        t = v / (len(villages) - 1)
        for _ in range(HOUSEHOLDS_PER_VILLAGE):
            serial += 1
            row = _household_row(rng, f"H{serial:03d}", village_id, t)
            for column in _OPTIONAL:
                if rng.random() < 0.03:
                    row[column] = ""
            # An entire village without credit answers: the indicator must
            # come out missing there, not zero.
            if village_id == "V08":
                row["credit_access"] = ""
            writer.writerow(row)
    return out.getvalue()


# ---------------------------------------------------------------------------
# Rasters


def _grid(values: np.ndarray) -> raster.Grid:
    return raster.Grid(
        ncols=NCOLS,
        nrows=NROWS,
        xllcorner=0.0,
        yllcorner=0.0,
        cellsize=CELLSIZE,
        nodata_value=NODATA,
        values=values,
    )


def _centers() -> tuple[np.ndarray, np.ndarray]:
    cols = np.arange(NCOLS)
    rows = np.arange(NROWS)
    x = (cols + 0.5) * CELLSIZE
    y = (NROWS - rows - 0.5) * CELLSIZE
    return np.meshgrid(x, y)  # xx[r, c], yy[r, c]


def build_dem() -> raster.Grid:
    xx, yy = _centers()
    z = 600.0 + 0.35 * xx + 0.25 * yy + 120.0 * np.sin(xx / 380.0) * np.cos(yy / 410.0)
    z = z.copy()
    z[10:13, 80:83] = NODATA  # small survey gap in the elevation model
    return _grid(z)


def build_land_cover() -> raster.Grid:
    xx, yy = _centers()
    # Patchwork of all 7 classes with a water band along a valley line.
    patch = (np.floor(xx / 270.0) * 3 + np.floor(yy / 330.0)) % 6
    lc = patch + 1  # classes 1..6 by patch
    ridge = np.abs(yy - (900.0 + 0.4 * xx))
    lc = np.where(ridge < 60.0, 6.0, lc)  # water course
    lc = np.where((xx > 2700.0) & (yy > 2700.0), 7.0, lc)  # bare corner
    return _grid(lc)


def build_roads() -> raster.Grid:
    mask = np.zeros((NROWS, NCOLS))
    mask[50, :] = 1.0  # east-west road
    mask[:, 75] = 1.0  # north-south road
    mask[20, 0:40] = 1.0  # northern spur
    return _grid(mask)


def build_settlements() -> raster.Grid:
    mask = np.zeros((NROWS, NCOLS))
    for m in range(VILLAGE_COLS):
        for r in range(VILLAGE_ROWS):
            # village centroid, in cell coordinates
            cx = int((m + 0.5) * NCOLS / VILLAGE_COLS)
            cy = int((r + 0.5) * NROWS / VILLAGE_ROWS)
            mask[cy - 1 : cy + 2, cx - 1 : cx + 2] = 1.0
    return _grid(mask)


def build_indicator_grids() -> dict[str, raster.Grid]:
    xx, yy = _centers()
    sx, sy = xx / EXTENT, yy / EXTENT  # 0..1 across the region
    wave = np.sin(xx / 300.0) * np.cos(yy / 260.0)

    droughts = np.clip(1.0 + 6.0 * sx + 1.5 * wave, 0.0, None)
    floods = np.clip(4.0 * (1.0 - sy) + 1.2 * np.sin(yy / 240.0), 0.0, None)
    temp_change = 0.6 + 1.6 * sx * sy + 0.2 * wave
    precip_change = -180.0 * sx + 60.0 * sy + 25.0 * wave

    fire_prone = ((sx + sy + 0.35 * wave) > 1.05).astype(float)
    cover_change = ((np.sin(xx / 210.0) + np.cos(yy / 330.0)) > 0.9).astype(float)
    degradation = ((sx - sy + 0.4 * np.sin(yy / 200.0)) > 0.15).astype(float)

    cx1, cy1 = 700.0, 2300.0  # health centers
    cx2, cy2 = 2400.0, 700.0
    d1 = np.hypot(xx - cx1, yy - cy1)
    d2 = np.hypot(xx - cx2, yy - cy2)
    health_near = (np.minimum(d1, d2) < 1200.0).astype(float)
    disease = ((sy + 0.3 * np.sin(xx / 260.0)) > 0.72).astype(float)

    return {
        "EXP_DROUGHT_FREQ": _grid(droughts),
        "EXP_FLOOD_FREQ": _grid(floods),
        "EXP_TEMP_CHANGE": _grid(temp_change),
        "EXP_PRECIP_CHANGE": _grid(precip_change),
        "EXP_FIRE_RISK": _grid(fire_prone),
        "SEN_LANDCOVER_CHANGE": _grid(cover_change),
        "SEN_LAND_DEGRADATION": _grid(degradation),
        "HLT_HEALTH_ACCESS": _grid(health_near),
        "HLT_DISEASE_AREAS": _grid(disease),
    }


def write_fixture(dest: str | Path) -> Path:
    """Write the full demo region into a directory; returns its path."""
    dest = Path(dest)
    rasters = dest / "rasters"
    rasters.mkdir(parents=True, exist_ok=True)

    (dest / "survey.csv").write_text(build_survey_csv(), newline="\n")
    (dest / "admin_units.geojson").write_text(
        admin.export_admin_units(build_admin_hierarchy()), newline="\n"
    )
    (dest / "catalog.json").write_text(
        catalog.serialize_catalog(catalog.default_catalog()), newline="\n"
    )

    raster.save_ascii_grid(rasters / "dem.asc", build_dem())
    raster.save_ascii_grid(rasters / "land_cover.asc", build_land_cover())
    raster.save_ascii_grid(rasters / "roads.asc", build_roads())
    raster.save_ascii_grid(rasters / "settlements.asc", build_settlements())
    for code, grid in build_indicator_grids().items():
        raster.save_ascii_grid(rasters / f"{code.lower()}.asc", grid)
    return dest
