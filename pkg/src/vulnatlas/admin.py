"""Administrative hierarchy: units, geometries, GeoJSON IO, adjacency.

Three levels: department > municipality > village. Units carry polygon
geometries (WGS84-style lon-lat pairs, exterior ring first, optional holes)
used for rasterization, choropleth export, and contiguity analysis.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from . import geometry
from .catalog import Determinant
from .indices import AssessmentResult

Ring = tuple[tuple[float, float], ...]
Polygon = tuple[Ring, ...]


class AdminError(ValueError):
    """Invalid admin-unit document or hierarchy."""


class Level(str, Enum):
    DEPARTMENT = "department"
    MUNICIPALITY = "municipality"
    VILLAGE = "village"


# child level -> required parent level
PARENT_LEVEL: dict[Level, Level | None] = {
    Level.DEPARTMENT: None,
    Level.MUNICIPALITY: Level.DEPARTMENT,
    Level.VILLAGE: Level.MUNICIPALITY,
}

LEVELS = (Level.DEPARTMENT, Level.MUNICIPALITY, Level.VILLAGE)


def parse_level(text: str) -> Level:
    try:
        return Level(str(text).lower())
    except ValueError:
        names = ", ".join(lv.value for lv in LEVELS)
        raise AdminError(f"unknown level '{text}' (expected one of: {names})") from None


@dataclass(frozen=True)
class AdminUnit:
    unit_id: str
    name: str
    level: Level
    parent_id: str | None
    geometry: tuple[Polygon, ...]
    household_count: int = 0

    def __post_init__(self):
        if not self.unit_id:
            raise AdminError("unit_id must be non-empty")
        if self.household_count < 0:
            raise AdminError(f"unit {self.unit_id}: negative household_count")
        for poly in self.geometry:
            if not poly:
                raise AdminError(f"unit {self.unit_id}: polygon with no rings")
            for ring in poly:
                if len(ring) < 3:
                    raise AdminError(f"unit {self.unit_id}: ring with fewer than 3 vertices")


class AdminHierarchy:
    """Validated unit set; immutable after construction."""

    def __init__(self, units: Iterable[AdminUnit]):
        self.units: tuple[AdminUnit, ...] = tuple(units)
        by_id: dict[str, AdminUnit] = {}
        for unit in self.units:
            if unit.unit_id in by_id:
                raise AdminError(f"duplicate unit_id '{unit.unit_id}'")
            by_id[unit.unit_id] = unit
        self._by_id = by_id

        children: dict[str, list[str]] = {}
        for unit in self.units:
            expected = PARENT_LEVEL[unit.level]
            if expected is None:
                if unit.parent_id is not None:
                    raise AdminError(f"{unit.level.value} {unit.unit_id} must not have a parent")
                continue
            if unit.parent_id is None:
                raise AdminError(f"{unit.level.value} {unit.unit_id} has no parent_id")
            parent = by_id.get(unit.parent_id)
            if parent is None:
                raise AdminError(f"orphan unit {unit.unit_id}: parent '{unit.parent_id}' not found")
            if parent.level is not expected:
                raise AdminError(
                    f"{unit.level.value} {unit.unit_id}: parent {parent.unit_id} is a "
                    f"{parent.level.value}, expected {expected.value}"
                )
            children.setdefault(unit.parent_id, []).append(unit.unit_id)
        self._children = {pid: tuple(sorted(ids)) for pid, ids in children.items()}

    def __len__(self) -> int:
        return len(self.units)

    def by_id(self, unit_id: str) -> AdminUnit:
        try:
            return self._by_id[unit_id]
        except KeyError:
            raise AdminError(f"unknown unit_id '{unit_id}'") from None

    def __contains__(self, unit_id: str) -> bool:
        return unit_id in self._by_id

    def units_at(self, level: Level) -> list[AdminUnit]:
        return sorted((u for u in self.units if u.level is level), key=lambda u: u.unit_id)

    def children(self, unit_id: str) -> list[AdminUnit]:
        return [self._by_id[cid] for cid in self._children.get(unit_id, ())]

    def parent_map(self, level: Level) -> dict[str, str]:
        """child unit_id -> parent unit_id for all units at the given level."""
        if PARENT_LEVEL[level] is None:
            raise AdminError("departments have no parent level")
        return {u.unit_id: u.parent_id for u in self.units_at(level)}

    def ancestor_at(self, unit_id: str, level: Level) -> AdminUnit:
        unit = self.by_id(unit_id)
        while unit.level is not level:
            if unit.parent_id is None:
                raise AdminError(f"unit {unit_id} has no ancestor at level {level.value}")
            unit = self.by_id(unit.parent_id)
        return unit

    def household_count_mismatches(self) -> list[str]:
        """Parents whose declared count differs from the sum of their children's.

        Informational only: aggregation always uses village-level counts.
        """
        messages = []
        for level in (Level.MUNICIPALITY, Level.DEPARTMENT):
            for unit in self.units_at(level):
                kids = self.children(unit.unit_id)
                if not kids:
                    continue
                total = sum(k.household_count for k in kids)
                if unit.household_count and unit.household_count != total:
                    messages.append(
                        f"{level.value} {unit.unit_id}: household_count "
                        f"{unit.household_count} != sum of children {total}"
                    )
        return messages


# ---------------------------------------------------------------------------
# GeoJSON IO


def _ring_from_positions(unit_id: str, positions) -> Ring:
    if not isinstance(positions, list) or len(positions) < 4:
        raise AdminError(f"unit {unit_id}: ring needs at least 4 positions (closed)")
    points = []
    for pos in positions:
        if not isinstance(pos, list) or len(pos) != 2:
            raise AdminError(f"unit {unit_id}: positions must be [lon, lat] pairs")
        points.append((float(pos[0]), float(pos[1])))
    if points[0] != points[-1]:
        raise AdminError(f"unit {unit_id}: ring is not closed")
    return tuple(points[:-1])  # stored open; edges wrap implicitly


def _polygon_from_coordinates(unit_id: str, coords) -> Polygon:
    if not isinstance(coords, list) or not coords:
        raise AdminError(f"unit {unit_id}: empty polygon coordinates")
    return tuple(_ring_from_positions(unit_id, ring) for ring in coords)


def load_admin_units(document: str | bytes) -> AdminHierarchy:
    """Parse a GeoJSON FeatureCollection of admin units."""
    text = document.decode("utf-8") if isinstance(document, bytes) else document
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise AdminError(f"line {exc.lineno}: invalid JSON: {exc.msg}") from None
    if not isinstance(doc, dict) or doc.get("type") != "FeatureCollection":
        raise AdminError("expected a GeoJSON FeatureCollection")
    units = []
    for idx, feature in enumerate(doc.get("features", [])):
        props = feature.get("properties") or {}
        unit_id = props.get("unit_id")
        if not unit_id:
            raise AdminError(f"feature {idx + 1}: missing properties.unit_id")
        for key in ("name", "level"):
            if key not in props:
                raise AdminError(f"unit {unit_id}: missing properties.{key}")
        geom = feature.get("geometry") or {}
        gtype = geom.get("type")
        coords = geom.get("coordinates")
        if gtype == "Polygon":
            polygons = (_polygon_from_coordinates(unit_id, coords),)
        elif gtype == "MultiPolygon":
            if not isinstance(coords, list) or not coords:
                raise AdminError(f"unit {unit_id}: empty MultiPolygon")
            polygons = tuple(_polygon_from_coordinates(unit_id, poly) for poly in coords)
        else:
            raise AdminError(f"unit {unit_id}: geometry must be Polygon or MultiPolygon")
        units.append(
            AdminUnit(
                unit_id=str(unit_id),
                name=str(props["name"]),
                level=parse_level(props["level"]),
                parent_id=None if props.get("parent_id") is None else str(props["parent_id"]),
                geometry=polygons,
                household_count=int(props.get("household_count", 0)),
            )
        )
    return AdminHierarchy(units)


def _geometry_json(polygons: tuple[Polygon, ...]) -> dict:
    def close(ring: Ring) -> list[list[float]]:
        return [[p[0], p[1]] for p in ring] + [[ring[0][0], ring[0][1]]]

    if len(polygons) == 1:
        return {"type": "Polygon", "coordinates": [close(r) for r in polygons[0]]}
    return {
        "type": "MultiPolygon",
        "coordinates": [[close(r) for r in poly] for poly in polygons],
    }


def export_admin_units(hierarchy: AdminHierarchy) -> str:
    """Canonical GeoJSON document; load(export(h)) preserves the hierarchy."""
    features = []
    for unit in sorted(hierarchy.units, key=lambda u: u.unit_id):
        features.append(
            {
                "type": "Feature",
                "geometry": _geometry_json(unit.geometry),
                "properties": {
                    "unit_id": unit.unit_id,
                    "name": unit.name,
                    "level": unit.level.value,
                    "parent_id": unit.parent_id,
                    "household_count": unit.household_count,
                },
            }
        )
    doc = {"type": "FeatureCollection", "features": features}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def export_choropleth(
    hierarchy: AdminHierarchy,
    results: Iterable[AssessmentResult],
    level: Level | str,
) -> str:
    """GeoJSON with assessment properties per unit at the given level.

    Units without a result get null index properties so the map can still
    draw them in a no-data style.
    """
    level = level if isinstance(level, Level) else parse_level(level)
    by_id: dict[str, AssessmentResult] = {r.unit_id: r for r in results}
    features = []
    for unit in hierarchy.units_at(level):
        r = by_id.get(unit.unit_id)
        properties = {
            "unit_id": unit.unit_id,
            "name": unit.name,
            "vi": None if r is None else r.vi,
            "exposure_index": None if r is None else r.determinants.get(Determinant.EXPOSURE.value),
            "sensitivity_index": None if r is None else r.determinants.get(Determinant.SENSITIVITY.value),
            "adaptive_capacity_index": None
            if r is None
            else r.determinants.get(Determinant.ADAPTIVE_CAPACITY.value),
            "class": None if r is None else r.vi_class,
            "rank": None if r is None else r.rank,
        }
        features.append(
            {
                "type": "Feature",
                "geometry": _geometry_json(unit.geometry),
                "properties": properties,
            }
        )
    doc = {"type": "FeatureCollection", "features": features}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# Contiguity


def _unit_segments(unit: AdminUnit) -> list[tuple[tuple[float, float], tuple[float, float]]]:
    segments = []
    for poly in unit.geometry:
        for ring in poly:
            n = len(ring)
            for k in range(n):
                a, b = ring[k], ring[(k + 1) % n]
                if a != b:
                    segments.append((a, b))
    return segments


def build_adjacency(
    hierarchy: AdminHierarchy, level: Level | str, rule: str = "queen"
) -> dict[str, set[str]]:
    """Contiguity neighbors at a level.

    queen: any shared boundary point (a single corner suffices).
    rook: requires a shared boundary segment of positive length.
    """
    if rule not in ("queen", "rook"):
        raise AdminError(f"unknown contiguity rule '{rule}' (expected queen or rook)")
    touches = geometry.segments_touch if rule == "queen" else geometry.segments_overlap
    level = level if isinstance(level, Level) else parse_level(level)
    units = hierarchy.units_at(level)
    segments = {u.unit_id: _unit_segments(u) for u in units}
    bboxes = {u.unit_id: geometry.ring_bbox([r for p in u.geometry for r in p]) for u in units}
    out: dict[str, set[str]] = {u.unit_id: set() for u in units}
    for i, a in enumerate(units):
        ax0, ay0, ax1, ay1 = bboxes[a.unit_id]
        for b in units[i + 1 :]:
            bx0, by0, bx1, by1 = bboxes[b.unit_id]
            if ax1 < bx0 or bx1 < ax0 or ay1 < by0 or by1 < ay0:
                continue
            if any(
                touches(p, q, r, s)
                for (p, q) in segments[a.unit_id]
                for (r, s) in segments[b.unit_id]
            ):
                out[a.unit_id].add(b.unit_id)
                out[b.unit_id].add(a.unit_id)
    return out
