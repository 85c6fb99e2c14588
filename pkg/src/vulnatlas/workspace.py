"""On-disk workspace: ingest, compute, export, and the manifest.

Layout under the workspace root:

    catalog.json             canonical indicator catalog
    admin_units.geojson      canonical admin hierarchy
    survey.csv               verbatim copy of the survey input
    rasters/<name>.asc       verbatim copies of the input grids
    derived/zones_<level>.asc   admin units burned onto the grid template
    indicator_matrix.csv     raw indicator values, one row per unit per level
    results/<config_id>/<level>.csv   assessment results
    fire/                    fire-risk outputs (fri.asc, fri_classes.asc, class_areas.csv)
    manifest.json            sha256 digest of every other file

GIS indicator grids are matched to catalog codes by filename: the grid for
code EXP_FLOOD_FREQ is rasters/exp_flood_freq.asc. Absent grids simply leave
that indicator missing; aggregation renormalizes around it.

Aggregation weights are surveyed-household counts (how many records back a
value), not declared census counts; declared counts are only cross-checked.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import re
import shutil
from dataclasses import dataclass
from pathlib import Path

from . import admin as admin_mod
from . import firerisk, raster
from .admin import AdminHierarchy, Level
from .catalog import (
    Aggregation,
    Determinant,
    IndicatorCatalog,
    WeightConfig,
    default_weights,
    load_catalog,
    load_weights,
    serialize_catalog,
    validate_weights,
)
from .indices import AssessmentResult, IndicatorMatrix, compute_assessment, rollup
from .raster import Grid, format_number
from .survey import SurveyRecord, aggregate_to_unit, parse_survey_csv

CATALOG_FILE = "catalog.json"
ADMIN_FILE = "admin_units.geojson"
SURVEY_FILE = "survey.csv"
RASTER_DIR = "rasters"
DERIVED_DIR = "derived"
MATRIX_FILE = "indicator_matrix.csv"
RESULTS_DIR = "results"
FIRE_DIR = "fire"
MANIFEST_FILE = "manifest.json"

LEVEL_ORDER = (Level.DEPARTMENT, Level.MUNICIPALITY, Level.VILLAGE)

DET_COLUMNS = {
    Determinant.EXPOSURE.value: "exposure",
    Determinant.SENSITIVITY.value: "sensitivity",
    Determinant.ADAPTIVE_CAPACITY.value: "adaptive_capacity",
}


class WorkspaceError(ValueError):
    """Workspace is missing pieces or inconsistent."""


def _slug(path: str) -> str:
    return re.sub(r"[^a-z0-9]+", "_", path.lower()).strip("_")


def _fmt(value: float | int | None) -> str:
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    return format_number(value)


# ---------------------------------------------------------------------------
# Manifest


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(root: str | Path) -> dict[str, str]:
    """Digest every file under the root (except the manifest itself)."""
    root = Path(root)
    files = {}
    for path in sorted(root.rglob("*")):
        if not path.is_file() or path.name == MANIFEST_FILE:
            continue
        files[path.relative_to(root).as_posix()] = _sha256(path)
    doc = {"algorithm": "sha256", "files": files}
    (root / MANIFEST_FILE).write_text(
        json.dumps(doc, indent=2, sort_keys=True) + "\n", newline="\n"
    )
    return files


def verify_manifest(root: str | Path) -> list[str]:
    """Differences between the manifest and the files on disk."""
    root = Path(root)
    manifest_path = root / MANIFEST_FILE
    if not manifest_path.exists():
        return [f"missing {MANIFEST_FILE}"]
    recorded = json.loads(manifest_path.read_text()).get("files", {})
    problems = []
    seen = set()
    for path in sorted(root.rglob("*")):
        if not path.is_file() or path.name == MANIFEST_FILE:
            continue
        rel = path.relative_to(root).as_posix()
        seen.add(rel)
        if rel not in recorded:
            problems.append(f"not in manifest: {rel}")
        elif _sha256(path) != recorded[rel]:
            problems.append(f"digest mismatch: {rel}")
    for rel in sorted(set(recorded) - seen):
        problems.append(f"listed but absent: {rel}")
    return problems


# ---------------------------------------------------------------------------
# Indicator matrix CSV


@dataclass(frozen=True)
class UnitRow:
    unit_id: str
    level: str
    household_count: int
    values: dict[str, float | None]


def _write_matrix_csv(path: Path, rows: list[UnitRow], catalog: IndicatorCatalog) -> None:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["unit_id", "level", "household_count", *catalog.codes])
    for row in rows:
        writer.writerow(
            [row.unit_id, row.level, row.household_count]
            + [_fmt(row.values.get(code)) for code in catalog.codes]
        )
    path.write_text(out.getvalue(), newline="\n")


def _read_matrix_csv(path: Path, catalog: IndicatorCatalog) -> list[UnitRow]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        rows = []
        for rec in reader:
            values = {
                code: (None if rec.get(code, "") == "" else float(rec[code]))
                for code in catalog.codes
            }
            rows.append(
                UnitRow(
                    unit_id=rec["unit_id"],
                    level=rec["level"],
                    household_count=int(rec["household_count"]),
                    values=values,
                )
            )
    return rows


# ---------------------------------------------------------------------------
# Results CSV


def results_columns(catalog: IndicatorCatalog) -> list[str]:
    columns = ["unit_id", "level", "household_count"]
    columns += [f"ind_{code.lower()}" for code in catalog.codes]
    columns += [f"sub_{_slug(path)}" for path in catalog.subcomponent_paths()]
    columns += [f"comp_{_slug(path)}" for path in catalog.component_paths()]
    columns += [f"det_{name}" for name in DET_COLUMNS.values()]
    columns += [f"class_{name}" for name in DET_COLUMNS.values()]
    columns += ["vi", "class", "rank", "weight_config_id"]
    if len(set(columns)) != len(columns):
        raise WorkspaceError("catalog produces colliding result column names")
    return columns


def write_results_csv(path: Path, results: list[AssessmentResult], catalog: IndicatorCatalog) -> None:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(results_columns(catalog))
    for r in sorted(results, key=lambda r: r.unit_id):
        row = [r.unit_id, r.level, r.household_count]
        row += [_fmt(r.indicators.get(code)) for code in catalog.codes]
        row += [_fmt(r.subcomponents.get(path)) for path in catalog.subcomponent_paths()]
        row += [_fmt(r.components.get(path)) for path in catalog.component_paths()]
        row += [_fmt(r.determinants.get(det)) for det in DET_COLUMNS]
        row += [_fmt(r.determinant_classes.get(det)) for det in DET_COLUMNS]
        row += [_fmt(r.vi), _fmt(r.vi_class), r.rank, r.weight_config_id]
        writer.writerow(row)
    path.write_text(out.getvalue(), newline="\n")


def read_results_csv(path: Path, catalog: IndicatorCatalog) -> list[AssessmentResult]:
    def opt_float(text: str) -> float | None:
        return None if text == "" else float(text)

    def opt_int(text: str) -> int | None:
        return None if text == "" else int(text)

    results = []
    with open(path, newline="", encoding="utf-8") as fh:
        for rec in csv.DictReader(fh):
            results.append(
                AssessmentResult(
                    unit_id=rec["unit_id"],
                    level=rec["level"],
                    weight_config_id=rec["weight_config_id"],
                    household_count=int(rec["household_count"]),
                    indicators={
                        code: opt_float(rec[f"ind_{code.lower()}"]) for code in catalog.codes
                    },
                    subcomponents={
                        path: opt_float(rec[f"sub_{_slug(path)}"])
                        for path in catalog.subcomponent_paths()
                    },
                    components={
                        path: opt_float(rec[f"comp_{_slug(path)}"])
                        for path in catalog.component_paths()
                    },
                    determinants={
                        det: opt_float(rec[f"det_{name}"]) for det, name in DET_COLUMNS.items()
                    },
                    vi=opt_float(rec["vi"]),
                    vi_class=opt_int(rec["class"]),
                    rank=int(rec["rank"]),
                    determinant_classes={
                        det: opt_int(rec[f"class_{name}"]) for det, name in DET_COLUMNS.items()
                    },
                    support={},
                )
            )
    return results


# ---------------------------------------------------------------------------
# Ingest


def _relabel(records: list[SurveyRecord], hierarchy: AdminHierarchy, level: Level) -> list[SurveyRecord]:
    return [
        SurveyRecord(r.household_id, hierarchy.ancestor_at(r.village_id, level).unit_id, r.answers)
        for r in records
    ]


def _zone_grid(hierarchy: AdminHierarchy, level: Level, template: Grid) -> tuple[Grid, dict[str, int]]:
    units = hierarchy.units_at(level)
    zone_ids = {u.unit_id: i + 1 for i, u in enumerate(units)}
    pairs = [(zone_ids[u.unit_id], poly) for u in units for poly in u.geometry]
    return raster.rasterize_polygons(pairs, template), zone_ids


def ingest(
    survey_path: str | Path,
    admin_path: str | Path,
    rasters_dir: str | Path,
    catalog_path: str | Path,
    out_dir: str | Path,
) -> Path:
    """Build a workspace: parse inputs, derive zones, write the indicator matrix."""
    survey_path, admin_path = Path(survey_path), Path(admin_path)
    rasters_dir, catalog_path, out_dir = Path(rasters_dir), Path(catalog_path), Path(out_dir)

    catalog = load_catalog(catalog_path.read_text(encoding="utf-8"))
    hierarchy = admin_mod.load_admin_units(admin_path.read_text(encoding="utf-8"))
    records = parse_survey_csv(survey_path.read_bytes(), catalog)

    villages = {u.unit_id for u in hierarchy.units_at(Level.VILLAGE)}
    for record in records:
        if record.village_id not in villages:
            raise WorkspaceError(
                f"survey household {record.household_id} references unknown village "
                f"'{record.village_id}'"
            )

    raster_paths = sorted(rasters_dir.glob("*.asc")) if rasters_dir.is_dir() else []
    grids: dict[str, Grid] = {}
    for path in raster_paths:
        try:
            grids[path.stem] = raster.load_ascii_grid(path)
        except ValueError as exc:
            raise WorkspaceError(f"{path}: {exc}") from None
    if grids:
        raster.require_aligned(*grids.values(), what="input rasters")

    # Everything parsed; now write the workspace.
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / CATALOG_FILE).write_text(serialize_catalog(catalog), newline="\n")
    (out_dir / ADMIN_FILE).write_text(admin_mod.export_admin_units(hierarchy), newline="\n")
    shutil.copyfile(survey_path, out_dir / SURVEY_FILE)
    raster_out = out_dir / RASTER_DIR
    raster_out.mkdir(exist_ok=True)
    for path in raster_paths:
        shutil.copyfile(path, raster_out / path.name)

    rows: dict[str, UnitRow] = {}
    for unit in hierarchy.units:
        rows[unit.unit_id] = UnitRow(unit.unit_id, unit.level.value, 0, {})

    # Survey indicators, aggregated per unit at every level.
    for level in LEVEL_ORDER:
        for uiv in aggregate_to_unit(_relabel(records, hierarchy, level), catalog):
            row = rows[uiv.unit_id]
            row.values.update(uiv.values)
            rows[uiv.unit_id] = UnitRow(
                row.unit_id, row.level, uiv.household_count, row.values
            )

    # GIS indicators via zonal statistics against per-level zone grids.
    if grids:
        template = next(iter(grids.values()))
        derived = out_dir / DERIVED_DIR
        derived.mkdir(exist_ok=True)
        for level in LEVEL_ORDER:
            zones, zone_ids = _zone_grid(hierarchy, level, template)
            raster.save_ascii_grid(derived / f"zones_{level.value}.asc", zones)
            for ind in catalog.gis_indicators():
                grid = grids.get(ind.code.lower())
                if grid is None:
                    continue  # no grid shipped: indicator stays missing
                stats = raster.zonal_stats(grid, zones)
                for unit_id, zid in zone_ids.items():
                    st = stats.get(zid)
                    if st is None:
                        continue
                    if ind.aggregation is Aggregation.ZONAL_FRACTION:
                        rows[unit_id].values[ind.code] = st.fraction_above
                    else:
                        rows[unit_id].values[ind.code] = st.mean

    ordered = [
        rows[u.unit_id]
        for level in LEVEL_ORDER
        for u in hierarchy.units_at(level)
    ]
    _write_matrix_csv(out_dir / MATRIX_FILE, ordered, catalog)
    write_manifest(out_dir)
    return out_dir


# ---------------------------------------------------------------------------
# Loaded workspace


@dataclass
class LoadedWorkspace:
    root: Path
    catalog: IndicatorCatalog
    hierarchy: AdminHierarchy
    rows: list[UnitRow]

    def rows_at(self, level: Level) -> list[UnitRow]:
        return [r for r in self.rows if r.level == level.value]

    def village_matrix(self) -> IndicatorMatrix:
        village_rows = self.rows_at(Level.VILLAGE)
        return IndicatorMatrix.from_unit_values(
            {r.unit_id: r.values for r in village_rows},
            self.catalog.codes,
            {r.unit_id: r.household_count for r in village_rows},
        )

    def results_config_ids(self) -> list[str]:
        results_dir = self.root / RESULTS_DIR
        if not results_dir.is_dir():
            return []
        return sorted(p.name for p in results_dir.iterdir() if p.is_dir())

    def default_config_id(self) -> str:
        ids = self.results_config_ids()
        if not ids:
            raise WorkspaceError("workspace has no computed results; run compute first")
        return "default" if "default" in ids else ids[0]

    def read_results(self, config_id: str, level: Level) -> list[AssessmentResult]:
        path = self.root / RESULTS_DIR / config_id / f"{level.value}.csv"
        if not path.exists():
            raise WorkspaceError(f"no results for config '{config_id}' at level {level.value}")
        return read_results_csv(path, self.catalog)


def load_workspace(root: str | Path) -> LoadedWorkspace:
    root = Path(root)
    for name in (CATALOG_FILE, ADMIN_FILE, MATRIX_FILE):
        if not (root / name).exists():
            raise WorkspaceError(f"{root} is not an ingested workspace: missing {name}")
    catalog = load_catalog((root / CATALOG_FILE).read_text(encoding="utf-8"))
    hierarchy = admin_mod.load_admin_units((root / ADMIN_FILE).read_text(encoding="utf-8"))
    rows = _read_matrix_csv(root / MATRIX_FILE, catalog)
    return LoadedWorkspace(root=root, catalog=catalog, hierarchy=hierarchy, rows=rows)


# ---------------------------------------------------------------------------
# Compute


def compute_all_levels(
    ws: LoadedWorkspace, config: WeightConfig, prenormalized_matrix: IndicatorMatrix | None = None
) -> dict[Level, list[AssessmentResult]]:
    """Assess villages, then roll up the admin hierarchy."""
    if prenormalized_matrix is not None:
        villages = compute_assessment(
            prenormalized_matrix, ws.catalog, config, level=Level.VILLAGE.value, prenormalized=True
        )
    else:
        villages = compute_assessment(
            ws.village_matrix(), ws.catalog, config, level=Level.VILLAGE.value
        )
    munis = rollup(villages, ws.hierarchy.parent_map(Level.VILLAGE), Level.MUNICIPALITY.value)
    depts = rollup(munis, ws.hierarchy.parent_map(Level.MUNICIPALITY), Level.DEPARTMENT.value)
    return {Level.VILLAGE: villages, Level.MUNICIPALITY: munis, Level.DEPARTMENT: depts}


def compute(workspace_dir: str | Path, weights_path: str | Path | None = None) -> str:
    """Run the assessment and write per-level results CSVs; returns config id."""
    ws = load_workspace(workspace_dir)
    if weights_path is None:
        config = validate_weights(default_weights(ws.catalog), ws.catalog)
    else:
        config = load_weights(Path(weights_path).read_text(encoding="utf-8"), ws.catalog)
    # Weights are fully validated before anything is written.
    results = compute_all_levels(ws, config)
    out = ws.root / RESULTS_DIR / config.id
    out.mkdir(parents=True, exist_ok=True)
    for level, level_results in results.items():
        write_results_csv(out / f"{level.value}.csv", level_results, ws.catalog)
    write_manifest(ws.root)
    return config.id


# ---------------------------------------------------------------------------
# Export


def export(workspace_dir: str | Path, fmt: str, level: Level | str, out_path: str | Path) -> Path:
    ws = load_workspace(workspace_dir)
    level = level if isinstance(level, Level) else admin_mod.parse_level(level)
    config_id = ws.default_config_id()
    out_path = Path(out_path)
    if fmt == "geojson":
        results = ws.read_results(config_id, level)
        out_path.write_text(
            admin_mod.export_choropleth(ws.hierarchy, results, level), newline="\n"
        )
    elif fmt == "csv":
        source = ws.root / RESULTS_DIR / config_id / f"{level.value}.csv"
        if not source.exists():
            raise WorkspaceError(f"no results for config '{config_id}' at level {level.value}")
        shutil.copyfile(source, out_path)
    else:
        raise WorkspaceError(f"unknown export format '{fmt}' (expected geojson or csv)")
    return out_path


# ---------------------------------------------------------------------------
# Fire risk


def run_fire_risk(
    landcover_path: str | Path,
    dem_path: str | Path,
    roads_path: str | Path,
    settlements_path: str | Path,
    out_dir: str | Path,
    tables_path: str | Path | None = None,
) -> Path:
    """Score, overlay, classify, and write fri.asc / fri_classes.asc / class_areas.csv."""
    inputs = firerisk.FireRiskInputs(
        land_cover=raster.load_ascii_grid(landcover_path),
        dem=raster.load_ascii_grid(dem_path),
        roads_mask=raster.load_ascii_grid(roads_path),
        settlements_mask=raster.load_ascii_grid(settlements_path),
    )
    if tables_path is None:
        tables = firerisk.default_score_tables()
    else:
        tables = firerisk.load_score_tables(Path(tables_path).read_text(encoding="utf-8"))
    scores = firerisk.score_layers(inputs, tables)
    fri = firerisk.fire_risk_index(scores)
    class_grid, areas = firerisk.classify_risk_zones(fri)

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    raster.save_ascii_grid(out_dir / "fri.asc", fri)
    raster.save_ascii_grid(out_dir / "fri_classes.asc", class_grid)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["class", "area_km2"])
    for cls in sorted(areas):
        writer.writerow([cls, format_number(areas[cls])])
    (out_dir / "class_areas.csv").write_text(buf.getvalue(), newline="\n")

    # Keep the enclosing workspace manifest fresh when writing into one.
    parent = out_dir.parent
    if (parent / MANIFEST_FILE).exists():
        write_manifest(parent)
    return out_dir
