"""Indicator taxonomy and weight configurations.

The catalog is a four-tier hierarchy: determinant (Exposure, Sensitivity,
AdaptiveCapacity) > component > subcomponent > indicator. Every indicator is
either extracted from household surveys or derived from raster analysis, and
carries a polarity flag so that after normalization higher always means more
vulnerable.

Weights are defined per sibling group at every tier. Within a group they must
be non-negative and sum to 1, which keeps every aggregated index inside
[0, 1].
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping

GROUP_SUM_TOL = 1e-9

PATH_SEP = "/"


class CatalogError(ValueError):
    """Invalid catalog document or definition."""


class WeightError(ValueError):
    """Invalid weight configuration."""


class Determinant(str, Enum):
    EXPOSURE = "Exposure"
    SENSITIVITY = "Sensitivity"
    ADAPTIVE_CAPACITY = "AdaptiveCapacity"


class IndicatorSource(str, Enum):
    SURVEY = "SurveyQuestion"
    GIS = "GisAnalysis"


class Polarity(str, Enum):
    HIGHER_IS_MORE_VULNERABLE = "HigherIsMoreVulnerable"
    HIGHER_IS_LESS_VULNERABLE = "HigherIsLessVulnerable"


class Aggregation(str, Enum):
    MEAN_OVER_HOUSEHOLDS = "MeanOverHouseholds"
    RATIO_COUNT_OVER_TOTAL = "RatioCountOverTotal"
    SUM_OVER_HOUSEHOLDS = "SumOverHouseholds"
    ZONAL_MEAN = "ZonalMean"
    ZONAL_FRACTION = "ZonalFraction"


SURVEY_AGGREGATIONS = frozenset(
    {
        Aggregation.MEAN_OVER_HOUSEHOLDS,
        Aggregation.RATIO_COUNT_OVER_TOTAL,
        Aggregation.SUM_OVER_HOUSEHOLDS,
    }
)
ZONAL_AGGREGATIONS = frozenset({Aggregation.ZONAL_MEAN, Aggregation.ZONAL_FRACTION})


@dataclass(frozen=True)
class IndicatorDefinition:
    code: str
    name: str
    determinant: Determinant
    component: str
    subcomponent: str
    unit: str
    source: IndicatorSource
    polarity: Polarity
    aggregation: Aggregation
    survey_field: str | None = None

    def __post_init__(self):
        if not self.code:
            raise CatalogError("indicator code must be non-empty")
        for part in (self.component, self.subcomponent):
            if PATH_SEP in part:
                raise CatalogError(f"'{part}': names may not contain '{PATH_SEP}'")
        if self.source is IndicatorSource.SURVEY and not self.survey_field:
            raise CatalogError(f"indicator {self.code}: survey_field required for SurveyQuestion")
        if self.source is IndicatorSource.GIS and self.survey_field:
            raise CatalogError(f"indicator {self.code}: survey_field only valid for SurveyQuestion")
        if self.source is IndicatorSource.SURVEY and self.aggregation not in SURVEY_AGGREGATIONS:
            raise CatalogError(f"indicator {self.code}: {self.aggregation.value} needs GIS source")
        if self.source is IndicatorSource.GIS and self.aggregation not in ZONAL_AGGREGATIONS:
            raise CatalogError(f"indicator {self.code}: {self.aggregation.value} needs survey source")

    @property
    def subcomponent_path(self) -> str:
        return PATH_SEP.join((self.determinant.value, self.component, self.subcomponent))

    @property
    def component_path(self) -> str:
        return PATH_SEP.join((self.determinant.value, self.component))


class IndicatorCatalog:
    """Ordered indicator set plus the tree derived from the hierarchy fields."""

    def __init__(self, indicators: Iterable[IndicatorDefinition]):
        self.indicators: tuple[IndicatorDefinition, ...] = tuple(indicators)
        if not self.indicators:
            raise CatalogError("catalog has no indicators")
        seen: dict[str, IndicatorDefinition] = {}
        for ind in self.indicators:
            if ind.code in seen:
                raise CatalogError(f"duplicate indicator code '{ind.code}'")
            seen[ind.code] = ind
        self._by_code = seen

        # determinant -> component -> subcomponent -> [indicator, ...]
        tree: dict[str, dict[str, dict[str, list[IndicatorDefinition]]]] = {}
        for ind in self.indicators:
            tree.setdefault(ind.determinant.value, {}).setdefault(
                ind.component, {}
            ).setdefault(ind.subcomponent, []).append(ind)
        self.hierarchy = tree

    def __len__(self) -> int:
        return len(self.indicators)

    def __iter__(self):
        return iter(self.indicators)

    def __eq__(self, other) -> bool:
        return isinstance(other, IndicatorCatalog) and self.indicators == other.indicators

    def by_code(self, code: str) -> IndicatorDefinition:
        try:
            return self._by_code[code]
        except KeyError:
            raise CatalogError(f"unknown indicator code '{code}'") from None

    @property
    def codes(self) -> tuple[str, ...]:
        return tuple(ind.code for ind in self.indicators)

    def determinants(self) -> list[str]:
        return list(self.hierarchy.keys())

    def components(self, determinant: str) -> list[str]:
        return list(self.hierarchy[determinant].keys())

    def subcomponents(self, determinant: str, component: str) -> list[str]:
        return list(self.hierarchy[determinant][component].keys())

    def subcomponent_indicators(self, path: str) -> list[IndicatorDefinition]:
        det, comp, sub = path.split(PATH_SEP)
        return self.hierarchy[det][comp][sub]

    def component_paths(self) -> list[str]:
        return [
            PATH_SEP.join((det, comp))
            for det in self.hierarchy
            for comp in self.hierarchy[det]
        ]

    def subcomponent_paths(self) -> list[str]:
        return [
            PATH_SEP.join((det, comp, sub))
            for det in self.hierarchy
            for comp in self.hierarchy[det]
            for sub in self.hierarchy[det][comp]
        ]

    def survey_indicators(self) -> list[IndicatorDefinition]:
        return [i for i in self.indicators if i.source is IndicatorSource.SURVEY]

    def gis_indicators(self) -> list[IndicatorDefinition]:
        return [i for i in self.indicators if i.source is IndicatorSource.GIS]


# ---------------------------------------------------------------------------
# Catalog document IO

_FIELD_ORDER = (
    "code",
    "name",
    "determinant",
    "component",
    "subcomponent",
    "unit",
    "source",
    "polarity",
    "aggregation",
    "survey_field",
)


def _record_line(text: str, code: str | None, occurrence: int) -> int | None:
    """Best-effort line number of the occurrence-th record with this code."""
    if code is None:
        return None
    hits = [m.start() for m in re.finditer(re.escape(json.dumps(code)), text)]
    if occurrence < len(hits):
        return text.count("\n", 0, hits[occurrence]) + 1
    return None


def _loc(text: str, code: str | None, occurrence: int, record_index: int) -> str:
    line = _record_line(text, code, occurrence)
    if line is not None:
        return f"line {line}"
    return f"record {record_index + 1}"


def load_catalog(document: str | bytes) -> IndicatorCatalog:
    """Parse and validate a JSON catalog document (array of indicator records)."""
    text = document.decode("utf-8") if isinstance(document, bytes) else document
    try:
        records = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CatalogError(f"line {exc.lineno}: invalid JSON: {exc.msg}") from None
    if not isinstance(records, list):
        raise CatalogError("catalog document must be a JSON array of indicator records")

    seen_codes: dict[str, int] = {}
    indicators: list[IndicatorDefinition] = []
    for idx, rec in enumerate(records):
        if not isinstance(rec, dict):
            raise CatalogError(f"record {idx + 1}: expected an object")
        code = rec.get("code")
        occurrence = seen_codes.get(code, 0)
        where = _loc(text, code, occurrence, idx)
        if code is None:
            raise CatalogError(f"{where}: missing 'code'")
        seen_codes[code] = occurrence + 1
        if occurrence:
            raise CatalogError(f"{where}: duplicate indicator code '{code}'")
        missing = [k for k in _FIELD_ORDER[:-1] if k not in rec]
        if missing:
            raise CatalogError(f"{where}: indicator {code}: missing key(s) {', '.join(missing)}")
        try:
            determinant = Determinant(rec["determinant"])
        except ValueError:
            raise CatalogError(
                f"{where}: indicator {code}: unknown determinant '{rec['determinant']}'"
            ) from None
        try:
            source = IndicatorSource(rec["source"])
            polarity = Polarity(rec["polarity"])
            aggregation = Aggregation(rec["aggregation"])
        except ValueError as exc:
            raise CatalogError(f"{where}: indicator {code}: {exc}") from None
        try:
            indicators.append(
                IndicatorDefinition(
                    code=code,
                    name=rec["name"],
                    determinant=determinant,
                    component=rec["component"],
                    subcomponent=rec["subcomponent"],
                    unit=rec["unit"],
                    source=source,
                    polarity=polarity,
                    aggregation=aggregation,
                    survey_field=rec.get("survey_field"),
                )
            )
        except CatalogError as exc:
            raise CatalogError(f"{where}: {exc}") from None
    try:
        return IndicatorCatalog(indicators)
    except CatalogError as exc:
        # Re-scan for the duplicate's position so the message carries a line.
        msg = str(exc)
        m = re.search(r"duplicate indicator code '(.+)'", msg)
        if m:
            where = _loc(text, m.group(1), 1, len(records) - 1)
            raise CatalogError(f"{where}: {msg}") from None
        raise


def serialize_catalog(catalog: IndicatorCatalog) -> str:
    """Canonical JSON document; load_catalog(serialize_catalog(c)) == c."""
    records = []
    for ind in catalog.indicators:
        rec = {
            "code": ind.code,
            "name": ind.name,
            "determinant": ind.determinant.value,
            "component": ind.component,
            "subcomponent": ind.subcomponent,
            "unit": ind.unit,
            "source": ind.source.value,
            "polarity": ind.polarity.value,
            "aggregation": ind.aggregation.value,
        }
        if ind.survey_field is not None:
            rec["survey_field"] = ind.survey_field
        records.append(rec)
    return json.dumps(records, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# Weight configurations


@dataclass(frozen=True)
class WeightConfig:
    """User-definable weights at every tier of the hierarchy.

    component_weights is keyed by determinant name, subcomponent_weights by
    "Determinant/Component" path, indicator_weights by
    "Determinant/Component/Subcomponent" path.
    """

    id: str
    determinant_weights: Mapping[str, float]
    component_weights: Mapping[str, Mapping[str, float]]
    subcomponent_weights: Mapping[str, Mapping[str, float]]
    indicator_weights: Mapping[str, Mapping[str, float]]


def _equal_split(names: list[str]) -> dict[str, float]:
    n = len(names)
    return {name: 1.0 / n for name in names}


def default_weights(catalog: IndicatorCatalog, config_id: str = "default") -> WeightConfig:
    """Equal weights within every sibling group."""
    return WeightConfig(
        id=config_id,
        determinant_weights=_equal_split(catalog.determinants()),
        component_weights={
            det: _equal_split(catalog.components(det)) for det in catalog.determinants()
        },
        subcomponent_weights={
            path: _equal_split(
                catalog.subcomponents(*path.split(PATH_SEP))
            )
            for path in catalog.component_paths()
        },
        indicator_weights={
            path: _equal_split([i.code for i in catalog.subcomponent_indicators(path)])
            for path in catalog.subcomponent_paths()
        },
    )


def _check_group(group_path: str, given: Mapping[str, float], expected: list[str]) -> None:
    for name, w in given.items():
        if name not in expected:
            raise WeightError(f"group {group_path}: weight for unknown node '{name}'")
        if not w >= 0:
            raise WeightError(f"group {group_path}: negative weight {w!r} for '{name}'")
    missing = [name for name in expected if name not in given]
    if missing:
        raise WeightError(f"group {group_path}: missing weight(s) for {', '.join(missing)}")
    total = sum(given[name] for name in expected)
    if abs(total - 1.0) > GROUP_SUM_TOL:
        raise WeightError(f"group {group_path}: weights sum to {total!r}, expected 1")


def validate_weights(config: WeightConfig, catalog: IndicatorCatalog) -> WeightConfig:
    """Return the config unchanged when every sibling group is complete and convex."""
    _check_group("determinants", config.determinant_weights, catalog.determinants())
    for det in catalog.determinants():
        if det not in config.component_weights:
            raise WeightError(f"missing component weights for determinant {det}")
        _check_group(det, config.component_weights[det], catalog.components(det))
    for name in config.component_weights:
        if name not in catalog.hierarchy:
            raise WeightError(f"component weights for unknown determinant '{name}'")
    for path in catalog.component_paths():
        if path not in config.subcomponent_weights:
            raise WeightError(f"missing subcomponent weights for {path}")
        _check_group(path, config.subcomponent_weights[path], catalog.subcomponents(*path.split(PATH_SEP)))
    for path in config.subcomponent_weights:
        if path not in catalog.component_paths():
            raise WeightError(f"subcomponent weights for unknown component '{path}'")
    for path in catalog.subcomponent_paths():
        if path not in config.indicator_weights:
            raise WeightError(f"missing indicator weights for {path}")
        _check_group(
            path,
            config.indicator_weights[path],
            [i.code for i in catalog.subcomponent_indicators(path)],
        )
    for path in config.indicator_weights:
        if path not in catalog.subcomponent_paths():
            raise WeightError(f"indicator weights for unknown subcomponent '{path}'")
    return config


def load_weights(
    document: str | bytes | Mapping, catalog: IndicatorCatalog, config_id: str | None = None
) -> WeightConfig:
    """Parse a JSON weight document; groups it omits inherit equal weights.

    Accepts raw JSON text or an already-parsed object.
    """
    if isinstance(document, (str, bytes)):
        text = document.decode("utf-8") if isinstance(document, bytes) else document
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise WeightError(f"line {exc.lineno}: invalid JSON: {exc.msg}") from None
    else:
        doc = document
    if not isinstance(doc, dict):
        raise WeightError("weight document must be a JSON object")
    base = default_weights(catalog)

    def merge(given: Mapping | None, fallback: Mapping[str, float]) -> dict[str, float]:
        if given is None:
            return dict(fallback)
        if not isinstance(given, dict):
            raise WeightError("weight groups must be JSON objects of name -> number")
        try:
            return {str(k): float(v) for k, v in given.items()}
        except (TypeError, ValueError):
            raise WeightError("weight values must be numbers") from None

    determinants = merge(doc.get("determinants"), base.determinant_weights)
    comp_doc = doc.get("components") or {}
    sub_doc = doc.get("subcomponents") or {}
    ind_doc = doc.get("indicators") or {}
    config = WeightConfig(
        id=config_id or str(doc.get("id", "custom")),
        determinant_weights=determinants,
        component_weights={
            det: merge(comp_doc.get(det), base.component_weights[det])
            for det in catalog.determinants()
        }
        | {det: merge(comp_doc[det], {}) for det in comp_doc if det not in catalog.hierarchy},
        subcomponent_weights={
            path: merge(sub_doc.get(path), base.subcomponent_weights[path])
            for path in catalog.component_paths()
        }
        | {p: merge(sub_doc[p], {}) for p in sub_doc if p not in catalog.component_paths()},
        indicator_weights={
            path: merge(ind_doc.get(path), base.indicator_weights[path])
            for path in catalog.subcomponent_paths()
        }
        | {p: merge(ind_doc[p], {}) for p in ind_doc if p not in catalog.subcomponent_paths()},
    )
    return validate_weights(config, catalog)


def serialize_weights(config: WeightConfig) -> str:
    doc = {
        "id": config.id,
        "determinants": dict(config.determinant_weights),
        "components": {k: dict(v) for k, v in config.component_weights.items()},
        "subcomponents": {k: dict(v) for k, v in config.subcomponent_weights.items()},
        "indicators": {k: dict(v) for k, v in config.indicator_weights.items()},
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# Built-in default catalog

_E = Determinant.EXPOSURE.value
_S = Determinant.SENSITIVITY.value
_A = Determinant.ADAPTIVE_CAPACITY.value
_MORE = Polarity.HIGHER_IS_MORE_VULNERABLE.value
_LESS = Polarity.HIGHER_IS_LESS_VULNERABLE.value
_GIS = IndicatorSource.GIS.value
_SRV = IndicatorSource.SURVEY.value

# code, name, det, component, subcomponent, unit, source, polarity, aggregation, survey_field
_DEFAULT_ROWS = [
    # Exposure: raster-derived climate stressors.
    ("EXP_DROUGHT_FREQ", "Frequency of Droughts", _E, "Extreme Climate Events", "Droughts",
     "droughts", _GIS, _MORE, "ZonalMean", None),
    ("EXP_FLOOD_FREQ", "Frequency of Flood", _E, "Extreme Climate Events", "Flood",
     "floods", _GIS, _MORE, "ZonalMean", None),
    ("EXP_TEMP_CHANGE", "Change in Temperature", _E, "Change in Climate", "Change in Temperature",
     "degrees Celsius", _GIS, _MORE, "ZonalMean", None),
    ("EXP_PRECIP_CHANGE", "Change in Precipitation", _E, "Change in Climate", "Change in Precipitation",
     "mm", _GIS, _MORE, "ZonalMean", None),
    ("EXP_FIRE_RISK", "Forest Fire Risk", _E, "Forest Fires", "Forest Fires",
     "fraction of area", _GIS, _MORE, "ZonalFraction", None),
    ("EXP_SOIL_MOISTURE", "Change in Soil Moisture", _E, "Soil Moisture", "Soil Moisture",
     "fraction of area", _GIS, _MORE, "ZonalFraction", None),
    ("EXP_SOIL_CARBON", "Soil Organic Carbon Deficit", _E, "Soil Carbon", "Soil Organic Carbon",
     "fraction of area", _GIS, _MORE, "ZonalFraction", None),
    # Sensitivity: land and farming system.
    ("SEN_LANDCOVER_CHANGE", "Change in Land Cover", _S, "Deforestation", "Change in Land Cover",
     "fraction of area", _GIS, _MORE, "ZonalFraction", None),
    ("SEN_LAND_DEGRADATION", "Share of Area with High Land Degradation", _S, "Land Degradation Index",
     "Percentage of Land Degradation", "fraction of area", _GIS, _MORE, "ZonalFraction", None),
    ("SEN_IRRIGATION", "Share of Farms with Irrigation", _S, "Irrigated Land", "Percentage of Irrigated Land",
     "ratio of farms", _SRV, _LESS, "RatioCountOverTotal", "irrigation"),
    ("SEN_SMALL_FARM", "Share of Small-Scale Farming Operations", _S, "Small-Scale Farming",
     "Small-Scale Farming", "ratio of farms", _SRV, _MORE, "RatioCountOverTotal", "farm_area_ha"),
    ("SEN_CROP_DIVERSITY", "Number of Crop Types", _S, "Crop Diversification", "Crop Diversification",
     "crop types", _SRV, _LESS, "MeanOverHouseholds", "crop_types"),
    # Adaptive capacity: household socioeconomics.
    ("HH_MEMBERS", "Number of Household Members", _A, "Socioeconomic", "Economic Capacity",
     "members", _SRV, _MORE, "MeanOverHouseholds", "members"),
    ("HH_FEMALE_HEAD", "Number of Households where the Primary Adult is Female", _A, "Socioeconomic",
     "Economic Capacity", "ratio of households", _SRV, _MORE, "RatioCountOverTotal", "head_gender"),
    ("HH_LOW_EDUCATION", "Heads of Household with under 3 Years of School", _A, "Socioeconomic",
     "Economic Capacity", "ratio of households", _SRV, _MORE, "RatioCountOverTotal", "education_years"),
    ("HH_HEAD_AGE_RISK", "Heads of Household Aged under 18 or over 45", _A, "Socioeconomic",
     "Economic Capacity", "ratio of households", _SRV, _MORE, "RatioCountOverTotal", "head_age"),
    ("HH_EMPLOYED", "Employed Household Members", _A, "Socioeconomic", "Economic Capacity",
     "members", _SRV, _LESS, "MeanOverHouseholds", "employed_members"),
    ("HH_WORK_OUTSIDE", "Members Working outside the Community", _A, "Socioeconomic", "Economic Capacity",
     "members", _SRV, _MORE, "MeanOverHouseholds", "working_outside"),
    ("HH_REMITTANCES", "Households Receiving Regular Remittances", _A, "Socioeconomic", "Economic Capacity",
     "ratio of households", _SRV, _LESS, "RatioCountOverTotal", "remittances"),
    ("DEP_RATIO", "Members under 14 or over 60", _A, "Socioeconomic", "Dependency",
     "dependency ratio", _SRV, _MORE, "MeanOverHouseholds", "dependent_members"),
    ("DEP_DISABILITY", "Members with Physical or Mental Disability", _A, "Socioeconomic", "Dependency",
     "ratio of members", _SRV, _MORE, "MeanOverHouseholds", "disabled_members"),
    ("DEP_ORPHANS", "Households with Orphans", _A, "Socioeconomic", "Dependency",
     "ratio of households", _SRV, _MORE, "RatioCountOverTotal", "orphans"),
    ("WAT_SOURCE", "Source of Water", _A, "Access to Basic Sanitary Service", "Availability",
     "supply risk score", _SRV, _MORE, "MeanOverHouseholds", "water_source"),
    ("WAT_DISTANCE", "Distance to the Source of Water", _A, "Access to Basic Sanitary Service",
     "Availability", "km", _SRV, _MORE, "MeanOverHouseholds", "water_distance"),
    ("SAN_SEWAGE", "Type of Sewage Disposal System", _A, "Access to Basic Sanitary Service",
     "Sewage Disposal System", "sanitation risk score", _SRV, _MORE, "MeanOverHouseholds", "sewage_type"),
    ("FIN_CREDIT", "Households with Access to Credit", _A, "Financial Access", "Access to Credit",
     "ratio of households", _SRV, _LESS, "RatioCountOverTotal", "credit_access"),
    ("MKT_DISTANCE", "Distance to Nearest Market", _A, "Market Access", "Distance to Markets",
     "minutes", _SRV, _MORE, "MeanOverHouseholds", "market_distance_minutes"),
    ("MKT_ROAD_QUALITY", "Share of Unpaved Roads", _A, "Market Access", "Quality of Road",
     "fraction unpaved", _GIS, _MORE, "ZonalMean", None),
    ("HLT_CHRONIC", "Members with a Chronic Illness", _A, "Health", "Chronic Illness",
     "members", _SRV, _MORE, "MeanOverHouseholds", "chronic_illness_members"),
    ("HLT_HEALTH_ACCESS", "Area within 5 km of a Basic Health Center", _A, "Health",
     "Access to Health Service", "fraction of area", _GIS, _LESS, "ZonalFraction", None),
    ("HLT_BED_NETS", "Households with Bed Nets", _A, "Health", "Vector-Borne Disease",
     "ratio of households", _SRV, _LESS, "RatioCountOverTotal", "bed_nets"),
    ("HLT_DISEASE_AREAS", "Areas with a High Number of Disease Cases", _A, "Health",
     "Vector-Borne Disease", "fraction of area", _GIS, _MORE, "ZonalFraction", None),
    ("HLT_DENGUE", "Members with a Recent Dengue-like Episode", _A, "Health", "Vector-Borne Disease",
     "members", _SRV, _MORE, "MeanOverHouseholds", "dengue_episodes"),
    ("INF_ACCESS", "Households with Access to Information and Knowledge", _A, "Knowledge and Information",
     "Access to Knowledge and Information", "ratio of households", _SRV, _LESS, "RatioCountOverTotal",
     "info_access"),
    ("INF_COMMUNITY", "Local Organizations and Leaders with Information Access", _A,
     "Knowledge and Information", "Access to Knowledge and Information", "ratio of households",
     _SRV, _LESS, "RatioCountOverTotal", "community_info_access"),
]


def default_catalog() -> IndicatorCatalog:
    """The built-in catalog; runs the engine with zero configuration."""
    return IndicatorCatalog(
        IndicatorDefinition(
            code=code,
            name=name,
            determinant=Determinant(det),
            component=comp,
            subcomponent=sub,
            unit=unit,
            source=IndicatorSource(source),
            polarity=Polarity(polarity),
            aggregation=Aggregation(agg),
            survey_field=survey_field,
        )
        for code, name, det, comp, sub, unit, source, polarity, agg, survey_field in _DEFAULT_ROWS
    )
