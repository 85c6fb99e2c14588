"""HTTP API over a computed workspace.

The app takes an immutable snapshot of the workspace at startup: catalog,
hierarchy, indicator matrix, the stored batch results, and a cached
normalized matrix. What-if requests re-run only the weighted aggregation on
that cache; nothing is ever written back to the workspace.
"""

from __future__ import annotations

import csv
import json
import sys
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import Response

from . import workspace as ws_mod
from .admin import AdminError, Level, build_adjacency, export_choropleth, parse_level
from .catalog import WeightError, default_weights, load_weights, serialize_weights
from .indices import AssessmentResult, hotspot_gi_star, normalize
from .workspace import FIRE_DIR, LoadedWorkspace


def _result_json(r: AssessmentResult) -> dict:
    return {
        "unit_id": r.unit_id,
        "level": r.level,
        "household_count": r.household_count,
        "vi": r.vi,
        "class": r.vi_class,
        "rank": r.rank,
        "determinants": dict(r.determinants),
        "determinant_classes": dict(r.determinant_classes),
        "components": dict(r.components),
        "subcomponents": dict(r.subcomponents),
        "indicators": dict(r.indicators),
        "weight_config_id": r.weight_config_id,
    }


def _parse_level_or_404(text: str) -> Level:
    try:
        return parse_level(text)
    except AdminError as exc:
        raise HTTPException(status_code=404, detail=str(exc)) from None


def create_app(workspace_dir: str | Path) -> FastAPI:
    ws: LoadedWorkspace = ws_mod.load_workspace(workspace_dir)
    config_id = ws.default_config_id()  # errors out when nothing is computed
    stale = ws_mod.verify_manifest(ws.root)
    if stale:
        print(f"warning: workspace manifest out of date ({len(stale)} issue(s))", file=sys.stderr)

    stored: dict[Level, list[AssessmentResult]] = {
        level: ws.read_results(config_id, level) for level in ws_mod.LEVEL_ORDER
    }
    village_matrix = ws.village_matrix()
    normalized = normalize(village_matrix, ws.catalog)  # weight-independent cache
    defaults = default_weights(ws.catalog)
    default_weight_doc = json.loads(serialize_weights(defaults))
    adjacency_cache: dict[Level, dict[str, set[str]]] = {}

    app = FastAPI(title="vulnatlas", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.get("/api/catalog")
    def get_catalog():
        indicators = []
        for ind in ws.catalog.indicators:
            indicators.append(
                {
                    "code": ind.code,
                    "name": ind.name,
                    "determinant": ind.determinant.value,
                    "component": ind.component,
                    "subcomponent": ind.subcomponent,
                    "unit": ind.unit,
                    "source": ind.source.value,
                    "polarity": ind.polarity.value,
                    "aggregation": ind.aggregation.value,
                    "survey_field": ind.survey_field,
                }
            )
        hierarchy = {
            det: {
                comp: {sub: [i.code for i in inds] for sub, inds in comps.items()}
                for comp, comps in dets.items()
            }
            for det, dets in ws.catalog.hierarchy.items()
        }
        return {
            "indicators": indicators,
            "hierarchy": hierarchy,
            "default_weights": default_weight_doc,
            "weight_config_id": config_id,
        }

    @app.get("/api/units")
    def get_units(level: str | None = Query(default=None)):
        if level is None:
            units = list(ws.hierarchy.units)
        else:
            units = ws.hierarchy.units_at(_parse_level_or_404(level))
        return [
            {
                "unit_id": u.unit_id,
                "name": u.name,
                "level": u.level.value,
                "parent_id": u.parent_id,
                "household_count": u.household_count,
            }
            for u in sorted(units, key=lambda u: (u.level.value, u.unit_id))
        ]

    @app.get("/api/results")
    def get_results(level: str = Query(...)):
        lv = _parse_level_or_404(level)
        return [_result_json(r) for r in sorted(stored[lv], key=lambda r: r.unit_id)]

    @app.get("/api/choropleth/{level}")
    def get_choropleth(level: str):
        lv = _parse_level_or_404(level)
        doc = export_choropleth(ws.hierarchy, stored[lv], lv)
        return Response(content=doc, media_type="application/geo+json")

    @app.get("/api/fire-risk/summary")
    def get_fire_summary():
        path = ws.root / FIRE_DIR / "class_areas.csv"
        if not path.exists():
            raise HTTPException(status_code=404, detail="no fire-risk outputs in workspace")
        classes = []
        with open(path, newline="", encoding="utf-8") as fh:
            for rec in csv.DictReader(fh):
                classes.append({"class": int(rec["class"]), "area_km2": float(rec["area_km2"])})
        return {
            "classes": classes,
            "total_area_km2": sum(c["area_km2"] for c in classes),
        }

    @app.get("/api/unit/{unit_id}")
    def get_unit(unit_id: str):
        if unit_id not in ws.hierarchy:
            raise HTTPException(status_code=404, detail=f"unknown unit '{unit_id}'")
        unit = ws.hierarchy.by_id(unit_id)
        row = next((r for r in ws.rows if r.unit_id == unit_id), None)
        result = next((r for r in stored[unit.level] if r.unit_id == unit_id), None)
        return {
            "unit_id": unit.unit_id,
            "name": unit.name,
            "level": unit.level.value,
            "parent_id": unit.parent_id,
            "household_count": unit.household_count,
            "surveyed_households": 0 if row is None else row.household_count,
            "raw_indicators": {} if row is None else dict(row.values),
            "result": None if result is None else _result_json(result),
            "children": [
                {"unit_id": c.unit_id, "name": c.name, "level": c.level.value}
                for c in ws.hierarchy.children(unit_id)
            ],
        }

    @app.post("/api/whatif")
    def post_whatif(weights: dict):
        try:
            config = load_weights(weights, ws.catalog, config_id="whatif")
        except WeightError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        results = ws_mod.compute_all_levels(ws, config, prenormalized_matrix=normalized)
        return {
            "weight_config_id": config.id,
            "results": {
                level.value: [_result_json(r) for r in sorted(rs, key=lambda r: r.unit_id)]
                for level, rs in results.items()
            },
            "rankings": {
                level.value: [r.unit_id for r in sorted(rs, key=lambda r: r.rank)]
                for level, rs in results.items()
            },
        }

    @app.get("/api/hotspots")
    def get_hotspots(level: str = Query(...)):
        lv = _parse_level_or_404(level)
        values = {r.unit_id: r.vi for r in stored[lv] if r.vi is not None}
        if len(values) < 3:
            raise HTTPException(
                status_code=422,
                detail=f"hotspot statistic needs at least 3 units with data at level "
                f"{lv.value}, got {len(values)}",
            )
        if lv not in adjacency_cache:
            adjacency_cache[lv] = build_adjacency(ws.hierarchy, lv)
        adjacency = {
            uid: {v for v in neighbors if v in values}
            for uid, neighbors in adjacency_cache[lv].items()
            if uid in values
        }
        z = hotspot_gi_star(values, adjacency)
        return {"level": lv.value, "zscores": z}

    return app
