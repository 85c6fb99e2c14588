import numpy as np
import pytest

from vulnatlas.firerisk import (
    FRI_COEFFICIENTS,
    FRI_MAX,
    FRI_MIN,
    FireRiskError,
    FireRiskInputs,
    FireRiskScores,
    ScoreTables,
    classify_risk_zones,
    default_score_tables,
    fire_risk_index,
    load_score_tables,
    score_layers,
    serialize_score_tables,
)
from vulnatlas.raster import Grid, ReclassTable, aspect, proximity, reclassify, slope

from oracles import straight_line_fri


def grid(values, cellsize=30.0, nodata=-9999.0) -> Grid:
    arr = np.asarray(values, dtype=np.float64)
    return Grid(arr.shape[1], arr.shape[0], 0.0, 0.0, cellsize, nodata, arr)


def const_scores(n=4, **overrides) -> FireRiskScores:
    layers = {}
    for name in ("lc", "sl", "a", "r", "se", "e"):
        layers[name] = grid(np.full((n, n), overrides.get(name, 0.0)))
    return FireRiskScores(**layers)


# --- formula ------------------------------------------------------------------


def test_fri_floor_and_ceiling():
    assert FRI_MIN == 1.0 and FRI_MAX == 128.0
    lo = fire_risk_index(const_scores())
    assert np.all(lo.values == 1.0)
    hi = fire_risk_index(const_scores(lc=1.0, sl=1.0, a=1.0, r=1.0, se=1.0, e=1.0))
    assert np.all(hi.values == 128.0)


def test_fri_hand_evaluation():
    scores = const_scores(lc=0.8, sl=0.6, a=0.4, r=1.0, se=0.2, e=0.5)
    out = fire_risk_index(scores)
    assert np.all(out.values == 90.0)
    assert straight_line_fri(0.8, 0.6, 0.4, 1.0, 0.2, 0.5) == 90.0


def test_fri_matches_straight_line_oracle_on_random_scores():
    rng = np.random.default_rng(17)
    layers = {name: grid(rng.random((6, 6))) for name in FRI_COEFFICIENTS}
    out = fire_risk_index(FireRiskScores(**layers))
    for row in range(6):
        for col in range(6):
            expected = straight_line_fri(
                *(layers[name].values[row, col] for name in ("lc", "sl", "a", "r", "se", "e"))
            )
            assert out.values[row, col] == pytest.approx(expected, abs=1e-12)
            assert FRI_MIN <= out.values[row, col] <= FRI_MAX


def test_fri_nodata_propagates_from_any_layer():
    layers = {name: grid(np.full((3, 3), 0.5)) for name in FRI_COEFFICIENTS}
    vals = layers["se"].values.copy()
    vals[1, 1] = -9999.0
    layers["se"] = layers["se"].with_values(vals)
    out = fire_risk_index(FireRiskScores(**layers))
    assert out.values[1, 1] == -9999.0
    assert out.values[0, 0] != -9999.0


def test_fri_monotone_in_each_layer():
    rng = np.random.default_rng(23)
    base = {name: float(rng.random()) for name in FRI_COEFFICIENTS}
    for name in FRI_COEFFICIENTS:
        bumped = dict(base)
        bumped[name] = min(1.0, base[name] + 0.25)
        lo = fire_risk_index(const_scores(**base)).values[0, 0]
        hi = fire_risk_index(const_scores(**bumped)).values[0, 0]
        assert hi >= lo


def test_land_cover_coefficient_dominates_the_rest():
    others = sum(v for k, v in FRI_COEFFICIENTS.items() if k != "lc")
    assert FRI_COEFFICIENTS["lc"] > others


def test_score_outside_unit_interval_rejected():
    good = grid(np.full((2, 2), 0.5))
    bad = grid(np.full((2, 2), 1.2))
    with pytest.raises(FireRiskError, match="outside \\[0, 1\\]"):
        FireRiskScores(lc=bad, sl=good, a=good, r=good, se=good, e=good)


# --- scoring ------------------------------------------------------------------


def test_default_tables_sampled_lookups():
    t = default_score_tables()
    lc = t.land_cover_scores.categories
    assert lc[1.0] == 1.0 and lc[2.0] == 0.8 and lc[3.0] == 0.6
    assert lc[4.0] == 0.4 and lc[5.0] == 0.2 and lc[6.0] == 0.0 and lc[7.0] == 0.0

    def lookup(table, v):
        g = reclassify(grid([[v]]), table)
        return g.values[0, 0]

    assert lookup(t.slope_scores, 0.0) == 0.2
    assert lookup(t.slope_scores, 4.99) == 0.2
    assert lookup(t.slope_scores, 5.0) == 0.4
    assert lookup(t.slope_scores, 24.0) == 0.6
    assert lookup(t.slope_scores, 89.0) == 1.0
    assert lookup(t.aspect_scores, 180.0) == 1.0
    assert lookup(t.aspect_scores, 135.0) == 1.0
    assert lookup(t.aspect_scores, 100.0) == 0.7
    assert lookup(t.aspect_scores, 250.0) == 0.7
    assert lookup(t.aspect_scores, 60.0) == 0.4
    assert lookup(t.aspect_scores, 300.0) == 0.4
    assert lookup(t.aspect_scores, 10.0) == 0.1
    assert lookup(t.aspect_scores, 350.0) == 0.1
    assert lookup(t.road_distance_scores, 0.0) == 1.0
    assert lookup(t.road_distance_scores, 150.0) == 0.8
    assert lookup(t.road_distance_scores, 399.0) == 0.6
    assert lookup(t.road_distance_scores, 799.0) == 0.4
    assert lookup(t.road_distance_scores, 800.0) == 0.2
    assert lookup(t.road_distance_scores, 1e7) == 0.2
    assert lookup(t.elevation_scores, 500.0) == 1.0
    assert lookup(t.elevation_scores, 1000.0) == 0.75
    assert lookup(t.elevation_scores, 1500.0) == 0.5
    assert lookup(t.elevation_scores, 2000.0) == 0.25
    assert lookup(t.elevation_scores, 3000.0) == 0.1


def tilted_inputs(n=8, cellsize=30.0):
    cols = np.arange(n)
    rows = np.arange(n)
    x = (cols + 0.5) * cellsize
    y = (n - rows - 0.5) * cellsize
    xx, yy = np.meshgrid(x, y)
    dem = grid(900.0 + 0.1 * xx + 0.0 * yy, cellsize=cellsize)
    land = grid(np.full((n, n), 2.0), cellsize=cellsize)
    roads = np.zeros((n, n))
    roads[4, :] = 1.0
    setts = np.zeros((n, n))
    setts[0, 0] = 1.0
    return FireRiskInputs(
        land_cover=land,
        dem=dem,
        roads_mask=grid(roads, cellsize=cellsize),
        settlements_mask=grid(setts, cellsize=cellsize),
    )


def test_score_layers_hand_checked_cells():
    inputs = tilted_inputs()
    scores = score_layers(inputs, default_score_tables())
    # land cover class 2 scores 0.8 everywhere
    assert np.all(scores.lc.values == 0.8)
    # 0.1 east-west gradient: slope 5.71 degrees -> 0.4; aspect west 270 -> 0.4
    assert scores.sl.values[3, 3] == 0.4
    assert scores.a.values[3, 3] == 0.4
    # cell on the road row scores distance 0 -> 1.0
    assert scores.r.values[4, 2] == 1.0
    # two rows off the road: 60 m -> still [0,100) -> 1.0; far corner ~crosses bins
    assert scores.r.values[6, 2] == 1.0
    # elevation 900 + 0.1x stays inside [800, 1200) across the fixture
    assert np.all(scores.e.values == 0.75)
    # settlement at the far corner: distance from (7,7) is sqrt(49+49)*30 > 200
    assert scores.se.values[7, 7] == 0.6


def test_flat_dem_aspect_scores_zero():
    n = 6
    flat_dem = grid(np.full((n, n), 1000.0))
    inputs = FireRiskInputs(
        land_cover=grid(np.full((n, n), 1.0)),
        dem=flat_dem,
        roads_mask=grid(np.zeros((n, n))),
        settlements_mask=grid(np.zeros((n, n))),
    )
    scores = score_layers(inputs, default_score_tables())
    interior = scores.a.values[1:-1, 1:-1]
    assert np.all(interior == 0.0)
    assert np.all(scores.sl.values[1:-1, 1:-1] == 0.2)  # slope 0 -> first bin


def test_flat_rule_overrides_custom_aspect_table():
    # even a table that scores everything 1.0 cannot make a flat cell burn hotter
    n = 5
    tables = ScoreTables(
        land_cover_scores=ReclassTable(categories={1.0: 1.0}),
        slope_scores=ReclassTable(ranges=((0.0, 90.0, 1.0),), default_output=1.0),
        aspect_scores=ReclassTable(ranges=((-5.0, 360.0, 1.0),), default_output=1.0),
        road_distance_scores=ReclassTable(ranges=((0.0, _inf(), 1.0),)),
        settlement_distance_scores=ReclassTable(ranges=((0.0, _inf(), 1.0),)),
        elevation_scores=ReclassTable(ranges=((-_inf(), _inf(), 1.0),)),
    )
    inputs = FireRiskInputs(
        land_cover=grid(np.ones((n, n))),
        dem=grid(np.full((n, n), 500.0)),
        roads_mask=grid(np.eye(n)),
        settlements_mask=grid(np.eye(n)),
    )
    scores = score_layers(inputs, tables)
    assert np.all(scores.a.values[1:-1, 1:-1] == 0.0)


def _inf() -> float:
    return float("inf")


def test_no_roads_yields_all_nodata_fri():
    n = 5
    inputs = FireRiskInputs(
        land_cover=grid(np.ones((n, n))),
        dem=grid(np.full((n, n), 500.0)),
        roads_mask=grid(np.zeros((n, n))),
        settlements_mask=grid(np.eye(n)),
    )
    scores = score_layers(inputs, default_score_tables())
    assert np.all(scores.r.values == -9999.0)
    fri = fire_risk_index(scores)
    assert np.all(fri.values == -9999.0)


def test_misaligned_inputs_rejected():
    a = grid(np.zeros((3, 3)))
    b = Grid(3, 3, 10.0, 0.0, 30.0, -9999.0, np.zeros((3, 3)))
    with pytest.raises(Exception, match="not aligned"):
        FireRiskInputs(land_cover=a, dem=b, roads_mask=a, settlements_mask=a)


# --- risk zones ----------------------------------------------------------------


def test_constant_fri_single_class_full_area():
    fri = grid(np.full((10, 10), 1.0), cellsize=100.0)
    class_grid, areas = classify_risk_zones(fri)
    assert np.all(class_grid.values == 1.0)
    assert areas[1] == pytest.approx(1.0)  # 100 cells * 0.01 km2
    assert areas[2] == areas[3] == areas[4] == areas[5] == 0.0


def test_fri_128_lands_in_top_class():
    fri = grid([[128.0, 1.0]])
    class_grid, _ = classify_risk_zones(fri)
    assert class_grid.values[0, 0] == 5.0
    assert class_grid.values[0, 1] == 1.0


def test_class_boundaries_equal_interval():
    # class k covers [1 + (k-1)*25.4, 1 + k*25.4)
    edges = [1.0 + k * 127.0 / 5.0 for k in range(6)]
    for k in range(1, 6):
        inside = grid([[edges[k - 1], edges[k] - 1e-9]])
        got, _ = classify_risk_zones(inside)
        assert got.values[0, 0] == float(k)
        assert got.values[0, 1] == float(k)


def test_forty_cells_at_cellsize_100_cover_04_km2():
    vals = np.full((10, 10), 2.0)
    vals.flat[:40] = 60.0  # class 3: [51.8, 77.2)
    fri = grid(vals, cellsize=100.0)
    _, areas = classify_risk_zones(fri)
    assert areas[3] == pytest.approx(0.4)
    assert areas[1] == pytest.approx(0.6)


def test_class_areas_partition_valid_area():
    rng = np.random.default_rng(31)
    vals = rng.uniform(1.0, 128.0, size=(50, 50))
    vals[rng.random((50, 50)) < 0.1] = -9999.0
    fri = grid(vals, cellsize=30.0)
    class_grid, areas = classify_risk_zones(fri, num_classes=7)
    valid_km2 = np.sum(vals != -9999.0) * 30.0 * 30.0 / 1e6
    assert sum(areas.values()) == pytest.approx(valid_km2, abs=1e-9)
    assert set(areas) == set(range(1, 8))
    assert np.all(class_grid.values[vals == -9999.0] == -9999.0)


def test_fri_out_of_bounds_rejected():
    with pytest.raises(FireRiskError, match="outside \\[1, 128\\]"):
        classify_risk_zones(grid([[0.5]]))
    with pytest.raises(FireRiskError, match="outside \\[1, 128\\]"):
        classify_risk_zones(grid([[129.0]]))
    with pytest.raises(FireRiskError, match="at least 2"):
        classify_risk_zones(grid([[5.0]]), num_classes=1)


# --- table IO -------------------------------------------------------------------


def test_score_tables_round_trip():
    tables = default_score_tables()
    text = serialize_score_tables(tables)
    again = load_score_tables(text)
    assert serialize_score_tables(again) == text
    assert again.land_cover_scores.categories == tables.land_cover_scores.categories
    assert again.elevation_scores.ranges == tables.elevation_scores.ranges


def test_load_tables_null_means_unbounded():
    doc = serialize_score_tables(default_score_tables())
    assert '"ranges"' in doc and "null" in doc
    tables = load_score_tables(doc.encode())
    lo, hi, out = tables.elevation_scores.ranges[0]
    assert lo == -_inf() and hi == 800.0 and out == 1.0


def test_load_tables_missing_table_reported():
    with pytest.raises(FireRiskError, match="missing table.*aspect_scores"):
        load_score_tables("{}")


def test_load_tables_score_out_of_range_rejected():
    import json

    doc = json.loads(serialize_score_tables(default_score_tables()))
    doc["slope_scores"]["ranges"][0][2] = 1.5
    with pytest.raises(FireRiskError, match="outside \\[0, 1\\]"):
        load_score_tables(json.dumps(doc))


def test_load_tables_bad_kind_rejected():
    import json

    doc = json.loads(serialize_score_tables(default_score_tables()))
    doc["slope_scores"]["kind"] = "fuzzy"
    with pytest.raises(FireRiskError, match="unknown table kind 'fuzzy'"):
        load_score_tables(json.dumps(doc))
