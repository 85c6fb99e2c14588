"""Independent reference implementations used to check the engine.

Everything here is written the slow, obvious way (plain loops, exact
rational arithmetic where ties matter) and shares no code with the package.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np


def brute_proximity(mask_values: np.ndarray, cellsize: float) -> np.ndarray:
    """All-pairs Euclidean distance to the nearest 1-cell; inf when none."""
    nrows, ncols = mask_values.shape
    features = [
        (r, c) for r in range(nrows) for c in range(ncols) if mask_values[r, c] == 1.0
    ]
    out = np.full((nrows, ncols), np.inf)
    for r in range(nrows):
        for c in range(ncols):
            best = math.inf
            for fr, fc in features:
                d = math.hypot((r - fr) * cellsize, (c - fc) * cellsize)
                if d < best:
                    best = d
            out[r, c] = best
    return out


def brute_zonal(
    value_values: np.ndarray,
    zone_values: np.ndarray,
    value_nodata: float,
    zone_nodata: float,
    threshold: float,
) -> dict[int, dict[str, float]]:
    """Per-zone stats via a single dictionary-accumulating pass."""
    acc: dict[int, list[float]] = {}
    nrows, ncols = value_values.shape
    for r in range(nrows):
        for c in range(ncols):
            v = value_values[r, c]
            z = zone_values[r, c]
            if v == value_nodata or z == zone_nodata:
                continue
            acc.setdefault(int(z), []).append(float(v))
    out = {}
    for zone_id, vals in acc.items():
        total = 0.0
        for v in vals:  # sequential sum in scan order, like the engine's bincount
            total += v
        above = sum(1 for v in vals if v > threshold)
        out[zone_id] = {
            "count": len(vals),
            "mean": total / len(vals),
            "min": min(vals),
            "max": max(vals),
            "sum": total,
            "fraction_above": above / len(vals),
        }
    return out


def brute_change(
    a_values: np.ndarray, b_values: np.ndarray, a_nodata: float, b_nodata: float
) -> dict[tuple[float, float], int]:
    counts: dict[tuple[float, float], int] = {}
    nrows, ncols = a_values.shape
    for r in range(nrows):
        for c in range(ncols):
            a, b = a_values[r, c], b_values[r, c]
            if a == a_nodata or b == b_nodata:
                continue
            key = (float(a), float(b))
            counts[key] = counts.get(key, 0) + 1
    return counts


def brute_gi_star(
    values: dict[str, float], adjacency: dict[str, set[str]]
) -> dict[str, float]:
    """Textbook Gi* with an explicit binary weight matrix including self."""
    ids = sorted(values)
    n = len(ids)
    index = {uid: i for i, uid in enumerate(ids)}
    w = [[0.0] * n for _ in range(n)]
    for uid in ids:
        w[index[uid]][index[uid]] = 1.0
        for other in adjacency.get(uid, set()):
            w[index[uid]][index[other]] = 1.0
    x = [values[uid] for uid in ids]
    xbar = sum(x) / n
    s = math.sqrt(max(0.0, sum(v * v for v in x) / n - xbar * xbar))
    out = {}
    for i, uid in enumerate(ids):
        if s == 0.0:
            out[uid] = 0.0
            continue
        wi = sum(w[i])
        s1i = sum(v * v for v in w[i])
        num = sum(w[i][j] * x[j] for j in range(n)) - xbar * wi
        den = s * math.sqrt(max(0.0, (n * s1i - wi * wi) / (n - 1)))
        out[uid] = 0.0 if den == 0.0 else num / den
    return out


def point_in_polygon_exact(px, py, rings) -> str:
    """Even-odd membership with pure Fraction arithmetic: 'in', 'out', 'boundary'."""
    px, py = Fraction(px), Fraction(py)
    crossings = 0
    for ring in rings:
        pts = [(Fraction(x), Fraction(y)) for x, y in ring]
        n = len(pts)
        for k in range(n):
            ax, ay = pts[k]
            bx, by = pts[(k + 1) % n]
            if (ax, ay) == (bx, by):
                continue
            cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
            if cross == 0 and min(ax, bx) <= px <= max(ax, bx) and min(ay, by) <= py <= max(ay, by):
                return "boundary"
            if (ay > py) != (by > py):
                # exact x of edge at height py, compared to px
                t = (py - ay) / (by - ay)
                x_at = ax + t * (bx - ax)
                if x_at > px:
                    crossings += 1
    return "in" if crossings % 2 == 1 else "out"


def straight_line_fri(lc, sl, a, r, se, e) -> float:
    return 1.0 + 75.0 * lc + 30.0 * sl + 10.0 * a + 5.0 * r + 5.0 * se + 2.0 * e


def plane_slope_degrees(gradient: float) -> float:
    return math.degrees(math.atan(gradient))


def composed_vi(
    normalized_row: dict[str, float | None], catalog, config
) -> float | None:
    """VI from composed path weights, renormalized among non-missing branches.

    Recursive descent over the catalog tree; each node's weight mass is
    redistributed across its siblings that still carry data, mirroring the
    drop-and-renormalize rule without ever forming intermediate indices.
    """

    def subcomponent_value(path):
        inds = catalog.subcomponent_indicators(path)
        w = config.indicator_weights[path]
        pairs = [(normalized_row[i.code], w[i.code]) for i in inds if normalized_row[i.code] is not None]
        total = sum(wt for _, wt in pairs)
        if total <= 0:
            return None
        return sum(v * wt for v, wt in pairs) / total

    def component_value(det, comp):
        w = config.subcomponent_weights[f"{det}/{comp}"]
        pairs = []
        for sub in catalog.subcomponents(det, comp):
            v = subcomponent_value(f"{det}/{comp}/{sub}")
            if v is not None:
                pairs.append((v, w[sub]))
        total = sum(wt for _, wt in pairs)
        if total <= 0:
            return None
        return sum(v * wt for v, wt in pairs) / total

    def determinant_value(det):
        w = config.component_weights[det]
        pairs = []
        for comp in catalog.components(det):
            v = component_value(det, comp)
            if v is not None:
                pairs.append((v, w[comp]))
        total = sum(wt for _, wt in pairs)
        if total <= 0:
            return None
        return sum(v * wt for v, wt in pairs) / total

    pairs = []
    for det in catalog.determinants():
        v = determinant_value(det)
        if v is not None:
            pairs.append((v, config.determinant_weights[det]))
    total = sum(wt for _, wt in pairs)
    if total <= 0:
        return None
    return sum(v * wt for v, wt in pairs) / total
