"""Vulnerability index engine.

Raw indicator values per admin unit are min-max normalized (oriented so that
higher always means more vulnerable), then aggregated bottom-up with weighted
means: indicators to subcomponents, subcomponents to components, components
to determinants, determinants to the vulnerability index. Missing values drop
out at each stage with the remaining weights renormalized, so every index is
a convex combination of whatever data exists and stays inside [0, 1].

Results roll up the admin hierarchy as household-count-weighted means. Each
result tracks per-node "support" (how many households actually contributed),
which makes village->municipality->department equal to the direct
village->department aggregation even when some children are missing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.stats import rankdata

from .catalog import PATH_SEP, IndicatorCatalog, Polarity, WeightConfig


class AssessmentError(ValueError):
    """Inconsistent inputs to the index engine."""


@dataclass(frozen=True)
class IndicatorMatrix:
    """Admin-unit by indicator raw values with an explicit missingness mask."""

    unit_ids: tuple[str, ...]
    indicator_codes: tuple[str, ...]
    values: np.ndarray
    missing: np.ndarray
    household_counts: np.ndarray

    def __post_init__(self):
        n, m = len(self.unit_ids), len(self.indicator_codes)
        if len(set(self.unit_ids)) != n:
            raise AssessmentError("duplicate unit ids in matrix")
        if len(set(self.indicator_codes)) != m:
            raise AssessmentError("duplicate indicator codes in matrix")
        values = np.asarray(self.values, dtype=np.float64)
        missing = np.asarray(self.missing, dtype=bool)
        counts = np.asarray(self.household_counts, dtype=np.int64)
        if values.shape != (n, m) or missing.shape != (n, m):
            raise AssessmentError(f"matrix shape {values.shape} does not match ids ({n}, {m})")
        if counts.shape != (n,):
            raise AssessmentError("household_counts length does not match unit ids")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "missing", missing)
        object.__setattr__(self, "household_counts", counts)

    @classmethod
    def from_unit_values(
        cls,
        rows: Mapping[str, Mapping[str, float | None]],
        indicator_codes: Sequence[str],
        household_counts: Mapping[str, int],
    ) -> "IndicatorMatrix":
        unit_ids = tuple(sorted(rows))
        codes = tuple(indicator_codes)
        values = np.full((len(unit_ids), len(codes)), np.nan)
        missing = np.ones((len(unit_ids), len(codes)), dtype=bool)
        for i, uid in enumerate(unit_ids):
            row = rows[uid]
            for j, code in enumerate(codes):
                v = row.get(code)
                if v is not None:
                    values[i, j] = v
                    missing[i, j] = False
        counts = np.array([household_counts.get(uid, 0) for uid in unit_ids], dtype=np.int64)
        return cls(unit_ids, codes, values, missing, counts)

    def value_at(self, unit_id: str, code: str) -> float | None:
        i = self.unit_ids.index(unit_id)
        j = self.indicator_codes.index(code)
        return None if self.missing[i, j] else float(self.values[i, j])


def normalize(matrix: IndicatorMatrix, catalog: IndicatorCatalog) -> IndicatorMatrix:
    """Min-max normalize each indicator column over its non-missing units.

    Constant columns map to 0 everywhere (no relative signal). Indicators
    whose higher raw values mean less vulnerability are flipped to 1-x'.
    """
    values = matrix.values.copy()
    for j, code in enumerate(matrix.indicator_codes):
        definition = catalog.by_code(code)
        present = ~matrix.missing[:, j]
        if not present.any():
            continue
        col = values[present, j]
        lo, hi = col.min(), col.max()
        if hi == lo:
            scaled = np.zeros_like(col)
        else:
            scaled = (col - lo) / (hi - lo)
            if definition.polarity is Polarity.HIGHER_IS_LESS_VULNERABLE:
                scaled = 1.0 - scaled
        values[present, j] = scaled
    values[matrix.missing] = np.nan
    return IndicatorMatrix(
        matrix.unit_ids, matrix.indicator_codes, values, matrix.missing, matrix.household_counts
    )


def weighted_index(
    values: Sequence[float | None], weights: Sequence[float]
) -> float | None:
    """Weighted mean with missing entries dropped and weights renormalized.

    All entries missing, or every surviving weight zero, yields missing.
    """
    if len(values) != len(weights):
        raise AssessmentError("values and weights differ in length")
    total = 0.0
    acc = 0.0
    for v, w in zip(values, weights):
        if v is None:
            continue
        total += w
        acc += w * v
    if total <= 0.0:
        return None
    return acc / total


@dataclass(frozen=True)
class AssessmentResult:
    """One admin unit's full assessment: every index, class, and rank.

    support maps each hierarchy node to the number of households behind its
    value ("ind:CODE", "sub:PATH", "comp:PATH", "det:NAME", "vi"); it is what
    keeps hierarchical rollups consistent with direct aggregation.
    """

    unit_id: str
    level: str
    weight_config_id: str
    household_count: int
    indicators: Mapping[str, float | None]
    subcomponents: Mapping[str, float | None]
    components: Mapping[str, float | None]
    determinants: Mapping[str, float | None]
    vi: float | None
    vi_class: int | None
    rank: int
    determinant_classes: Mapping[str, int | None]
    support: Mapping[str, float]


def classify_quantiles(values: Sequence[float], k: int = 5) -> list[int]:
    """Quantile class 1..k per value using average ranks for ties.

    class(v) = min(k, 1 + floor(k * (rank - 1) / n)). Integer arithmetic on
    doubled ranks keeps boundaries exact (average ranks are multiples of 1/2).
    """
    if k < 2:
        raise AssessmentError(f"need at least 2 classes, got {k}")
    n = len(values)
    if n == 0:
        raise AssessmentError("cannot classify an empty value list")
    ranks = rankdata(values, method="average")
    out = []
    for r in ranks:
        r2 = int(round(2.0 * r))  # exact: ranks are integers or half-integers
        out.append(min(k, 1 + (k * (r2 - 2)) // (2 * n)))
    return out


def _rank_order(results: Iterable[tuple[str, float | None]]) -> dict[str, int]:
    """Dense 1..n ranks, descending value, missing last, ties by unit id."""

    def key(item: tuple[str, float | None]):
        uid, vi = item
        return (1, 0.0, uid) if vi is None else (0, -vi, uid)

    ordered = sorted(results, key=key)
    return {uid: pos for pos, (uid, _) in enumerate(ordered, start=1)}


def _attach_classes_and_ranks(
    partial: list[dict], k: int = 5
) -> list[AssessmentResult]:
    """Fill vi_class, determinant_classes, and rank, then freeze results."""
    ranks = _rank_order([(p["unit_id"], p["vi"]) for p in partial])

    def classes_for(key_fn) -> dict[str, int | None]:
        present = [(i, key_fn(p)) for i, p in enumerate(partial) if key_fn(p) is not None]
        assigned: dict[int, int] = {}
        if present:
            classes = classify_quantiles([v for _, v in present], k)
            assigned = {i: c for (i, _), c in zip(present, classes)}
        return assigned

    vi_classes = classes_for(lambda p: p["vi"])
    det_names = list(partial[0]["determinants"]) if partial else []
    det_classes = {name: classes_for(lambda p, n=name: p["determinants"][n]) for name in det_names}

    out = []
    for i, p in enumerate(partial):
        out.append(
            AssessmentResult(
                unit_id=p["unit_id"],
                level=p["level"],
                weight_config_id=p["weight_config_id"],
                household_count=p["household_count"],
                indicators=p["indicators"],
                subcomponents=p["subcomponents"],
                components=p["components"],
                determinants=p["determinants"],
                vi=p["vi"],
                vi_class=vi_classes.get(i),
                rank=ranks[p["unit_id"]],
                determinant_classes={name: det_classes[name].get(i) for name in det_names},
                support=p["support"],
            )
        )
    return out


def compute_assessment(
    matrix: IndicatorMatrix,
    catalog: IndicatorCatalog,
    config: WeightConfig,
    level: str = "village",
    prenormalized: bool = False,
) -> list[AssessmentResult]:
    """Normalize, then aggregate bottom-up to the vulnerability index.

    prenormalized=True skips normalization (the matrix already holds oriented
    [0,1] values); normalization is weight-independent, so interactive weight
    scenarios reuse one normalized matrix. Running normalize twice would
    re-flip flipped-polarity columns, hence the explicit flag.
    """
    for code in catalog.codes:
        if code not in matrix.indicator_codes:
            raise AssessmentError(f"catalog indicator {code} absent from matrix")
    norm = matrix if prenormalized else normalize(matrix, catalog)
    col = {code: j for j, code in enumerate(norm.indicator_codes)}

    partial = []
    for i, unit_id in enumerate(norm.unit_ids):
        hh = int(norm.household_counts[i])
        support: dict[str, float] = {}

        indicators: dict[str, float | None] = {}
        for code in catalog.codes:
            j = col[code]
            value = None if norm.missing[i, j] else float(norm.values[i, j])
            indicators[code] = value
            support[f"ind:{code}"] = float(hh) if value is not None else 0.0

        subcomponents: dict[str, float | None] = {}
        for path in catalog.subcomponent_paths():
            group = catalog.subcomponent_indicators(path)
            w = config.indicator_weights[path]
            value = weighted_index([indicators[g.code] for g in group], [w[g.code] for g in group])
            subcomponents[path] = value
            support[f"sub:{path}"] = float(hh) if value is not None else 0.0

        components: dict[str, float | None] = {}
        for path in catalog.component_paths():
            det, comp = path.split(PATH_SEP)
            subs = catalog.subcomponents(det, comp)
            w = config.subcomponent_weights[path]
            value = weighted_index(
                [subcomponents[PATH_SEP.join((det, comp, s))] for s in subs],
                [w[s] for s in subs],
            )
            components[path] = value
            support[f"comp:{path}"] = float(hh) if value is not None else 0.0

        determinants: dict[str, float | None] = {}
        for det in catalog.determinants():
            comps = catalog.components(det)
            w = config.component_weights[det]
            value = weighted_index(
                [components[PATH_SEP.join((det, c))] for c in comps],
                [w[c] for c in comps],
            )
            determinants[det] = value
            support[f"det:{det}"] = float(hh) if value is not None else 0.0

        dets = catalog.determinants()
        vi = weighted_index(
            [determinants[d] for d in dets],
            [config.determinant_weights[d] for d in dets],
        )
        support["vi"] = float(hh) if vi is not None else 0.0

        partial.append(
            {
                "unit_id": unit_id,
                "level": level,
                "weight_config_id": config.id,
                "household_count": hh,
                "indicators": indicators,
                "subcomponents": subcomponents,
                "components": components,
                "determinants": determinants,
                "vi": vi,
                "support": support,
            }
        )
    return _attach_classes_and_ranks(partial)


def rollup(
    children: Sequence[AssessmentResult],
    parent_of: Mapping[str, str],
    level: str,
) -> list[AssessmentResult]:
    """Aggregate child results to their parents by contributing households.

    Each parent node value is the support-weighted mean of its children's
    values for that node; a node's parent support is the sum of child
    supports, so chained rollups compose exactly.
    """
    if not children:
        return []
    config_ids = {c.weight_config_id for c in children}
    if len(config_ids) != 1:
        raise AssessmentError(f"mixed weight configs in rollup: {sorted(config_ids)}")
    for child in children:
        if child.unit_id not in parent_of:
            raise AssessmentError(f"orphan child unit {child.unit_id}: no parent at level {level}")

    groups: dict[str, list[AssessmentResult]] = {}
    for child in children:
        groups.setdefault(parent_of[child.unit_id], []).append(child)

    template = children[0]

    def merge(group: list[AssessmentResult], node_key: str, value_of) -> tuple[float | None, float]:
        total = 0.0
        acc = 0.0
        contributors = 0
        last = 0.0
        for child in group:
            v = value_of(child)
            s = child.support.get(node_key, 0.0)
            if v is None or s <= 0.0:
                continue
            total += s
            acc += s * v
            contributors += 1
            last = v
        if total <= 0.0:
            return None, 0.0
        if contributors == 1:
            return last, total  # exact: (s*v)/s drifts by an ulp in floats
        return acc / total, total

    partial = []
    for parent_id in sorted(groups):
        group = groups[parent_id]
        support: dict[str, float] = {}

        indicators: dict[str, float | None] = {}
        for code in template.indicators:
            v, s = merge(group, f"ind:{code}", lambda c, code=code: c.indicators[code])
            indicators[code] = v
            support[f"ind:{code}"] = s

        subcomponents: dict[str, float | None] = {}
        for path in template.subcomponents:
            v, s = merge(group, f"sub:{path}", lambda c, path=path: c.subcomponents[path])
            subcomponents[path] = v
            support[f"sub:{path}"] = s

        components: dict[str, float | None] = {}
        for path in template.components:
            v, s = merge(group, f"comp:{path}", lambda c, path=path: c.components[path])
            components[path] = v
            support[f"comp:{path}"] = s

        determinants: dict[str, float | None] = {}
        for name in template.determinants:
            v, s = merge(group, f"det:{name}", lambda c, name=name: c.determinants[name])
            determinants[name] = v
            support[f"det:{name}"] = s

        vi, vi_support = merge(group, "vi", lambda c: c.vi)
        support["vi"] = vi_support

        partial.append(
            {
                "unit_id": parent_id,
                "level": level,
                "weight_config_id": template.weight_config_id,
                "household_count": int(sum(c.household_count for c in group)),
                "indicators": indicators,
                "subcomponents": subcomponents,
                "components": components,
                "determinants": determinants,
                "vi": vi,
                "support": support,
            }
        )
    return _attach_classes_and_ranks(partial)


def hotspot_gi_star(
    values: Mapping[str, float], adjacency: Mapping[str, Iterable[str]]
) -> dict[str, float]:
    """Getis-Ord Gi* z-score per unit, binary weights including self.

    Constant inputs (zero variance) or a neighborhood covering every unit
    (zero denominator) yield z = 0.
    """
    unit_ids = sorted(values)
    n = len(unit_ids)
    if n < 3:
        raise AssessmentError(f"hotspot statistic needs at least 3 units, got {n}")
    neighbor_sets: dict[str, set[str]] = {}
    for uid in unit_ids:
        neighbors = set(adjacency.get(uid, ()))
        if uid in neighbors:
            raise AssessmentError(f"unit {uid} listed as its own neighbor")
        unknown = neighbors - set(unit_ids)
        if unknown:
            raise AssessmentError(f"unit {uid} has unknown neighbor {sorted(unknown)[0]}")
        neighbor_sets[uid] = neighbors
    for uid in unit_ids:
        for other in neighbor_sets[uid]:
            if uid not in neighbor_sets[other]:
                raise AssessmentError(f"asymmetric adjacency between {uid} and {other}")

    x = np.array([float(values[uid]) for uid in unit_ids])
    mean = float(x.mean())
    s = math.sqrt(max(0.0, float((x * x).mean()) - mean * mean))
    out: dict[str, float] = {}
    for i, uid in enumerate(unit_ids):
        if s == 0.0:
            out[uid] = 0.0
            continue
        w = 1.0 + len(neighbor_sets[uid])
        local = x[i] + sum(values[v] for v in neighbor_sets[uid])
        den = s * math.sqrt(max(0.0, (n * w - w * w) / (n - 1)))
        out[uid] = 0.0 if den == 0.0 else (local - mean * w) / den
    return out
