"""Household survey ingestion.

Survey answers arrive as CSV with one row per household. Columns are the
catalog's survey_field keys plus the mandatory household_id and village_id.
Parsing validates types and category codes; extraction turns answers into
per-household indicator values; aggregation reduces households to villages
according to each indicator's aggregation rule.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import IO, Callable, Iterable, Mapping

from .catalog import Aggregation, IndicatorCatalog, IndicatorDefinition, IndicatorSource


class SurveyFormatError(ValueError):
    """Malformed survey CSV."""


# ---------------------------------------------------------------------------
# Field registry: how each known survey column parses.

_INT_FIELDS = frozenset(
    {
        "members",
        "dependent_members",
        "disabled_members",
        "employed_members",
        "working_outside",
        "chronic_illness_members",
        "dengue_episodes",
        "crop_types",
        "head_age",
    }
)

_FLOAT_FIELDS = frozenset({"farm_area_ha", "education_years", "market_distance_minutes"})

_YES_NO_FIELDS = frozenset(
    {
        "irrigation",
        "remittances",
        "credit_access",
        "orphans",
        "bed_nets",
        "info_access",
        "community_info_access",
    }
)

CATEGORY_CODES: dict[str, frozenset[str]] = {
    "water_source": frozenset({"well", "river", "public", "truck"}),
    "water_distance": frozenset({"a", "b", "c", "d", "e", "f"}),
    "sewage_type": frozenset({"a", "b", "c", "d", "e"}),
    "head_gender": frozenset({"male", "female"}),
}


def _parse_cell(field: str, text: str, row: int) -> float | bool | str:
    def bad(expected: str):
        return SurveyFormatError(f"row {row}, column {field}: invalid value '{text}' ({expected})")

    if field in _INT_FIELDS:
        try:
            return float(int(text))
        except ValueError:
            raise bad("expected an integer") from None
    if field in _YES_NO_FIELDS:
        low = text.lower()
        if low not in ("yes", "no"):
            raise bad("expected yes or no")
        return low == "yes"
    if field in CATEGORY_CODES:
        low = text.lower()
        codes = CATEGORY_CODES[field]
        if low not in codes:
            raise bad(f"expected one of: {', '.join(sorted(codes))}")
        return low
    # float fields and anything unregistered
    try:
        value = float(text)
    except ValueError:
        raise bad("expected a number") from None
    if not math.isfinite(value):
        raise bad("expected a finite number")
    return value


@dataclass(frozen=True)
class SurveyRecord:
    household_id: str
    village_id: str
    answers: Mapping[str, float | bool | str]


def parse_survey_csv(stream: str | bytes | IO, catalog: IndicatorCatalog) -> list[SurveyRecord]:
    """Parse survey CSV into records; blank cells become missing answers."""
    if isinstance(stream, bytes):
        text = stream.decode("utf-8-sig")
    elif isinstance(stream, str):
        text = stream
    else:
        raw = stream.read()
        text = raw.decode("utf-8-sig") if isinstance(raw, bytes) else raw
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise SurveyFormatError("empty survey file")
    header = [h.strip() for h in rows[0]]
    for required in ("household_id", "village_id"):
        if required not in header:
            raise SurveyFormatError(f"missing required column '{required}'")
    known_fields = {ind.survey_field for ind in catalog.survey_indicators()}
    columns = [
        (i, name)
        for i, name in enumerate(header)
        if name in known_fields  # columns the catalog does not mention are ignored
    ]
    id_col = header.index("household_id")
    village_col = header.index("village_id")

    records: list[SurveyRecord] = []
    seen_ids: set[str] = set()
    for row_num, row in enumerate(rows[1:], start=2):
        if not any(cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise SurveyFormatError(
                f"row {row_num}: expected {len(header)} cells, found {len(row)}"
            )
        household_id = row[id_col].strip()
        village_id = row[village_col].strip()
        if not household_id:
            raise SurveyFormatError(f"row {row_num}: blank household_id")
        if not village_id:
            raise SurveyFormatError(f"row {row_num}: blank village_id")
        if household_id in seen_ids:
            raise SurveyFormatError(f"row {row_num}: duplicate household_id '{household_id}'")
        seen_ids.add(household_id)
        answers: dict[str, float | bool | str] = {}
        for col, field in columns:
            cell = row[col].strip()
            if cell == "":
                continue
            answers[field] = _parse_cell(field, cell, row_num)
        records.append(SurveyRecord(household_id, village_id, answers))
    return records


# ---------------------------------------------------------------------------
# Household-level indicator extraction.

WATER_DISTANCE_KM = {"a": 0.0, "b": 0.5, "c": 1.0, "d": 1.5, "e": 2.0, "f": 2.5}

# Supply-reliability risk by source type. Piped public supply is safest; an
# unprotected river is the most climate-exposed.
WATER_SOURCE_RISK = {"public": 0.0, "well": 0.5, "truck": 0.75, "river": 1.0}

# Sanitation risk by disposal type. Codes follow the questionnaire's option
# order, which is not sorted by risk: a piped sewer (a), septic tank (c),
# improved latrine (d), simple pit (b), none/open (e).
SEWAGE_RISK = {"a": 0.0, "c": 0.25, "d": 0.5, "b": 0.75, "e": 1.0}

LOW_EDUCATION_YEARS = 3.0
HEAD_AGE_LOW, HEAD_AGE_HIGH = 18.0, 45.0
SMALL_FARM_HA = 2.0


def _ans(record: SurveyRecord, field: str) -> float | bool | str | None:
    return record.answers.get(field)


def _dependency_ratio(record: SurveyRecord) -> float | None:
    dependents = _ans(record, "dependent_members")
    members = _ans(record, "members")
    if dependents is None or members is None:
        return None
    working_age = max(1.0, float(members) - float(dependents))
    return float(dependents) / working_age


def _disability_share(record: SurveyRecord) -> float | None:
    disabled = _ans(record, "disabled_members")
    members = _ans(record, "members")
    if disabled is None or members is None:
        return None
    return float(disabled) / max(1.0, float(members))


_Extractor = Callable[[SurveyRecord], "float | None"]


def _category_score(field: str, table: Mapping[str, float]) -> _Extractor:
    def extract(record: SurveyRecord) -> float | None:
        code = _ans(record, field)
        return None if code is None else table[str(code)]

    return extract


def _threshold(field: str, predicate: Callable[[float], bool]) -> _Extractor:
    def extract(record: SurveyRecord) -> float | None:
        value = _ans(record, field)
        return None if value is None else (1.0 if predicate(float(value)) else 0.0)

    return extract


_EXTRACTORS: dict[str, _Extractor] = {
    "WAT_DISTANCE": _category_score("water_distance", WATER_DISTANCE_KM),
    "WAT_SOURCE": _category_score("water_source", WATER_SOURCE_RISK),
    "SAN_SEWAGE": _category_score("sewage_type", SEWAGE_RISK),
    "HH_FEMALE_HEAD": lambda r: (
        None if _ans(r, "head_gender") is None else (1.0 if _ans(r, "head_gender") == "female" else 0.0)
    ),
    "HH_LOW_EDUCATION": _threshold("education_years", lambda v: v < LOW_EDUCATION_YEARS),
    "HH_HEAD_AGE_RISK": _threshold("head_age", lambda v: v < HEAD_AGE_LOW or v > HEAD_AGE_HIGH),
    "SEN_SMALL_FARM": _threshold("farm_area_ha", lambda v: v < SMALL_FARM_HA),
    "DEP_RATIO": _dependency_ratio,
    "DEP_DISABILITY": _disability_share,
}


def extract_household_indicators(
    record: SurveyRecord, catalog: IndicatorCatalog
) -> dict[str, float | None]:
    """Per-household indicator values; missing answers yield None."""
    out: dict[str, float | None] = {}
    for ind in catalog.survey_indicators():
        extractor = _EXTRACTORS.get(ind.code)
        if extractor is not None:
            out[ind.code] = extractor(record)
            continue
        value = _ans(record, ind.survey_field)
        if value is None:
            out[ind.code] = None
        elif isinstance(value, str):
            raise SurveyFormatError(
                f"indicator {ind.code}: no numeric rule for category field '{ind.survey_field}'"
            )
        else:
            out[ind.code] = float(value)  # bool yes/no collapses to 1/0 here
    return out


# ---------------------------------------------------------------------------
# Village aggregation.


@dataclass(frozen=True)
class UnitIndicatorValues:
    unit_id: str
    values: Mapping[str, float | None]
    household_count: int


def aggregate_to_unit(
    records: Iterable[SurveyRecord], catalog: IndicatorCatalog
) -> list[UnitIndicatorValues]:
    """Reduce household values to one row per village, sorted by unit id."""
    by_village: dict[str, list[SurveyRecord]] = {}
    for record in records:
        by_village.setdefault(record.village_id, []).append(record)

    survey_inds = catalog.survey_indicators()
    out = []
    for village_id in sorted(by_village):
        group = by_village[village_id]
        extracted = [extract_household_indicators(r, catalog) for r in group]
        values: dict[str, float | None] = {}
        for ind in survey_inds:
            present = [e[ind.code] for e in extracted if e[ind.code] is not None]
            values[ind.code] = _reduce(ind, present)
        out.append(UnitIndicatorValues(village_id, values, len(group)))
    return out


def _reduce(ind: IndicatorDefinition, present: list[float]) -> float | None:
    if not present:
        return None
    if ind.aggregation is Aggregation.MEAN_OVER_HOUSEHOLDS:
        return sum(present) / len(present)
    if ind.aggregation is Aggregation.RATIO_COUNT_OVER_TOTAL:
        return sum(1 for v in present if v > 0.5) / len(present)
    if ind.aggregation is Aggregation.SUM_OVER_HOUSEHOLDS:
        return float(sum(present))
    raise ValueError(f"indicator {ind.code}: {ind.aggregation.value} is not a survey aggregation")
