"""Acceptance suite: one test per shipping criterion, oracle-checked at desk scale.

Each test prints a single PASS line so `pytest -v tests/test_acceptance.py`
reads as a checklist. Tolerances are stated inline; none of the tests share
code with the engine beyond calling its public API.
"""

import json
import math
import time

import numpy as np
import pytest
from fastapi.testclient import TestClient

from vulnatlas.admin import Level, export_admin_units, load_admin_units
from vulnatlas.catalog import (
    IndicatorCatalog,
    Polarity,
    default_weights,
    serialize_weights,
)
from vulnatlas.firerisk import FireRiskScores, fire_risk_index
from vulnatlas.fixture import write_fixture
from vulnatlas.indices import (
    IndicatorMatrix,
    compute_assessment,
    hotspot_gi_star,
    normalize,
    rollup,
)
from vulnatlas.raster import (
    FLAT_ASPECT,
    Grid,
    aspect,
    change_matrix,
    proximity,
    slope,
    write_ascii_grid,
    zonal_stats,
)
from vulnatlas.raster import load_ascii_grid
from vulnatlas.server import create_app
from vulnatlas.workspace import compute, ingest, load_workspace, verify_manifest

from oracles import (
    brute_change,
    brute_gi_star,
    brute_proximity,
    brute_zonal,
    composed_vi,
    straight_line_fri,
)
from test_indices import gis_ind, random_weights
from test_terrain import plane_grid

NODATA = -9999.0


def _grid(values, cellsize=30.0) -> Grid:
    arr = np.asarray(values, dtype=np.float64)
    return Grid(arr.shape[1], arr.shape[0], 0.0, 0.0, cellsize, NODATA, arr)


# --- fire risk index exactness -------------------------------------------------


def test_fire_risk_index_exactness():
    rng = np.random.default_rng(20260816)
    n = 20
    layers = {}
    for name in ("lc", "sl", "a", "r", "se", "e"):
        vals = rng.random((n, n))
        vals[rng.random((n, n)) < 0.06] = NODATA
        layers[name] = _grid(vals)
    fri = fire_risk_index(FireRiskScores(**layers))
    checked = 0
    for row in range(n):
        for col in range(n):
            cell = [layers[k].values[row, col] for k in ("lc", "sl", "a", "r", "se", "e")]
            if any(v == NODATA for v in cell):
                assert fri.values[row, col] == NODATA
                continue
            expected = straight_line_fri(*cell)
            assert abs(fri.values[row, col] - expected) <= 1e-12
            assert 1.0 <= fri.values[row, col] <= 128.0
            checked += 1
    assert checked > 200  # ~69% of 400 cells survive the 6-layer nodata overlay

    zero = fire_risk_index(FireRiskScores(**{k: _grid(np.zeros((n, n))) for k in layers}))
    assert np.all(zero.values == 1.0)
    one = fire_risk_index(FireRiskScores(**{k: _grid(np.ones((n, n))) for k in layers}))
    assert np.all(one.values == 128.0)
    print("PASS: fire risk index matches the straight-line oracle exactly on 20x20")


# --- terrain oracle ------------------------------------------------------------


def test_terrain_tilted_plane_oracle():
    for g in (0.05, 0.1, 0.2):
        east = plane_grid(g, 0.0, n=9)
        sl = slope(east)
        expected = math.degrees(math.atan(g))
        interior = sl.values[1:-1, 1:-1]
        assert np.all(np.abs(interior - expected) <= 1e-6)
        assert np.all(aspect(east).values[1:-1, 1:-1] == pytest.approx(270.0, abs=1e-9))

        north = plane_grid(0.0, g, n=9)
        assert np.all(np.abs(slope(north).values[1:-1, 1:-1] - expected) <= 1e-6)
        assert np.all(aspect(north).values[1:-1, 1:-1] == pytest.approx(180.0, abs=1e-9))

    flat = plane_grid(0.0, 0.0, n=9)
    assert np.all(slope(flat).values[1:-1, 1:-1] == 0.0)
    assert np.all(aspect(flat).values[1:-1, 1:-1] == FLAT_ASPECT)
    print("PASS: tilted-plane slope within 1e-6 deg, aspect 270/180, flat sentinel")


# --- brute-force equivalence ----------------------------------------------------


def test_brute_force_equivalence_proximity():
    rng = np.random.default_rng(31)
    for case in range(100):
        if case < 92:
            nrows, ncols = rng.integers(4, 19, size=2)
            p_feature = 0.12
        else:
            nrows, ncols = rng.integers(30, 51, size=2)  # sparse large grids
            p_feature = 0.01
        cellsize = float(rng.uniform(1.0, 90.0))
        vals = np.zeros((nrows, ncols))
        vals[rng.random((nrows, ncols)) < p_feature] = 1.0
        vals[rng.random((nrows, ncols)) < 0.05] = NODATA
        g = _grid(vals, cellsize)
        out = proximity(g)
        expected = brute_proximity(g.values, cellsize)
        for r in range(nrows):
            for c in range(ncols):
                if math.isinf(expected[r, c]):
                    assert out.values[r, c] == NODATA
                else:
                    assert abs(out.values[r, c] - expected[r, c]) <= 1e-9
    print("PASS: proximity matches all-pairs brute force within 1e-9 on 100 grids")


def test_brute_force_equivalence_zonal():
    rng = np.random.default_rng(32)
    for case in range(100):
        nrows, ncols = rng.integers(4, 31, size=2)
        vals = rng.random((nrows, ncols)) * 10
        vals[rng.random((nrows, ncols)) < 0.1] = NODATA
        zones = rng.integers(1, rng.integers(2, 11), size=(nrows, ncols)).astype(float)
        zones[rng.random((nrows, ncols)) < 0.1] = NODATA
        threshold = float(rng.uniform(0, 10))
        stats = zonal_stats(_grid(vals), _grid(zones), threshold=threshold)
        expected = brute_zonal(vals, zones, NODATA, NODATA, threshold)
        assert set(stats) == set(expected)
        for zid, st in stats.items():
            exp = expected[zid]
            assert st.count == exp["count"]
            assert st.min == exp["min"]
            assert st.max == exp["max"]
            assert abs(st.sum - exp["sum"]) <= 1e-9
            assert abs(st.mean - exp["mean"]) <= 1e-9
            assert abs(st.fraction_above - exp["fraction_above"]) <= 1e-9
    print("PASS: zonal statistics match the dictionary oracle on 100 grids")


def test_brute_force_equivalence_change():
    rng = np.random.default_rng(33)
    for case in range(100):
        nrows, ncols = rng.integers(4, 31, size=2)
        classes = rng.integers(2, 6)
        a = rng.integers(1, classes + 1, size=(nrows, ncols)).astype(float)
        b = rng.integers(1, classes + 1, size=(nrows, ncols)).astype(float)
        a[rng.random((nrows, ncols)) < 0.08] = NODATA
        b[rng.random((nrows, ncols)) < 0.08] = NODATA
        cellsize = float(rng.uniform(1.0, 120.0))
        cm = change_matrix(_grid(a, cellsize), _grid(b, cellsize))
        expected = brute_change(a, b, NODATA, NODATA)
        assert cm.total() == sum(expected.values())
        for ca in range(1, classes + 1):
            for cb in range(1, classes + 1):
                want = expected.get((float(ca), float(cb)), 0)
                if float(ca) in cm.classes_a and float(cb) in cm.classes_b:
                    assert cm.count(float(ca), float(cb)) == want
                else:
                    assert want == 0
        cls = float(rng.integers(1, classes + 1))
        loss = sum(v for (x, y), v in expected.items() if x == cls and y != cls)
        gain = sum(v for (x, y), v in expected.items() if y == cls and x != cls)
        area = cellsize * cellsize
        assert abs(cm.loss_area(cls) - loss * area) <= 1e-9
        assert abs(cm.gain_area(cls) - gain * area) <= 1e-9
    print("PASS: change matrices match the dictionary oracle on 100 grid pairs")


def test_brute_force_equivalence_gi_star():
    rng = np.random.default_rng(34)
    for case in range(100):
        n = int(rng.integers(3, 11))
        ids = [f"u{i}" for i in range(n)]
        adjacency = {uid: set() for uid in ids}
        for i in range(n):
            for j in range(i + 1, n):
                if rng.random() < 0.4:
                    adjacency[ids[i]].add(ids[j])
                    adjacency[ids[j]].add(ids[i])
        values = {uid: float(rng.normal(0, 10)) for uid in ids}
        if case % 10 == 0:
            values = {uid: 4.2 for uid in ids}  # constant field: all z must be 0
        z = hotspot_gi_star(values, adjacency)
        expected = brute_gi_star(values, adjacency)
        assert set(z) == set(expected)
        for uid in ids:
            assert abs(z[uid] - expected[uid]) <= 1e-9
    print("PASS: Gi* matches the explicit-matrix oracle on 100 random unit graphs")


# --- index-engine properties ------------------------------------------------------


def acceptance_catalog() -> IndicatorCatalog:
    less = Polarity.HIGHER_IS_LESS_VULNERABLE
    layout = [
        ("X01", "Exposure", "Climate", "Heat", None),
        ("X02", "Exposure", "Climate", "Heat", None),
        ("X03", "Exposure", "Climate", "Rain", None),
        ("X04", "Exposure", "Climate", "Rain", less),
        ("X05", "Exposure", "Hazard", "Flood", None),
        ("X06", "Exposure", "Hazard", "Flood", None),
        ("X07", "Sensitivity", "Livelihood", "Crops", None),
        ("X08", "Sensitivity", "Livelihood", "Crops", less),
        ("X09", "Sensitivity", "Health", "Illness", None),
        ("X10", "Sensitivity", "Health", "Illness", None),
        ("X11", "AdaptiveCapacity", "Social", "Networks", less),
        ("X12", "AdaptiveCapacity", "Social", "Networks", None),
        ("X13", "AdaptiveCapacity", "Economic", "Assets", None),
        ("X14", "AdaptiveCapacity", "Economic", "Assets", less),
        ("X15", "AdaptiveCapacity", "Economic", "Assets", None),
    ]
    return IndicatorCatalog(
        [
            gis_ind(code, det, comp=comp, sub=sub, polarity=pol or Polarity.HIGHER_IS_MORE_VULNERABLE)
            for code, det, comp, sub, pol in layout
        ]
    )


def random_rows(cat, rng, n_units=20, missing=0.1):
    rows = {}
    for i in range(n_units):
        rows[f"V{i:02d}"] = {
            code: (None if rng.random() < missing else float(rng.normal(50, 20)))
            for code in cat.codes
        }
    counts = {uid: int(rng.integers(5, 60)) for uid in rows}
    return rows, counts


def pools(result):
    return (
        result.indicators,
        result.subcomponents,
        result.components,
        result.determinants,
        {"vi": result.vi},
    )


def test_index_engine_properties():
    cat = acceptance_catalog()
    rng = np.random.default_rng(40)
    for trial in range(20):
        rows, counts = random_rows(cat, rng)
        m = IndicatorMatrix.from_unit_values(rows, cat.codes, counts)
        config = default_weights(cat) if trial % 2 == 0 else random_weights(cat, rng)
        results = compute_assessment(m, cat, config)

        # every index in [0,1]
        for r in results:
            for pool in pools(r):
                for v in pool.values():
                    assert v is None or 0.0 - 1e-12 <= v <= 1.0 + 1e-12

        # staged aggregation equals composed-weight direct aggregation
        norm = normalize(m, cat)
        for r in results:
            row = {code: norm.value_at(r.unit_id, code) for code in cat.codes}
            expected = composed_vi(row, cat, config)
            if expected is None:
                assert r.vi is None
            else:
                assert abs(r.vi - expected) <= 1e-12

        # positive-affine rescaling of one raw column changes nothing
        code = cat.codes[int(rng.integers(len(cat.codes)))]
        a, b = float(rng.uniform(0.1, 6.0)), float(rng.uniform(-30.0, 30.0))
        scaled_rows = {
            uid: {
                c: (v if v is None or c != code else a * v + b)
                for c, v in row.items()
            }
            for uid, row in rows.items()
        }
        scaled = IndicatorMatrix.from_unit_values(scaled_rows, cat.codes, counts)
        rescaled = compute_assessment(scaled, cat, config)
        for r1, r2 in zip(results, rescaled):
            assert r1.unit_id == r2.unit_id
            assert r1.rank == r2.rank
            assert r1.vi_class == r2.vi_class
            assert r1.determinant_classes == r2.determinant_classes
            for p1, p2 in zip(pools(r1), pools(r2)):
                for key, v in p1.items():
                    if v is None:
                        assert p2[key] is None
                    else:
                        assert abs(p2[key] - v) <= 1e-12

        # village -> department directly equals village -> municipality -> department
        to_muni = {f"V{i:02d}": f"M{i % 6}" for i in range(20)}
        muni_to_dept = {f"M{j}": f"D{j % 2}" for j in range(6)}
        to_dept = {v: muni_to_dept[mm] for v, mm in to_muni.items()}
        staged = rollup(rollup(results, to_muni, "municipality"), muni_to_dept, "department")
        direct = rollup(results, to_dept, "department")
        assert [r.unit_id for r in staged] == [r.unit_id for r in direct]
        for rs, rd in zip(staged, direct):
            for ps, pd in zip(pools(rs), pools(rd)):
                for key, v in ps.items():
                    if v is None:
                        assert pd[key] is None
                    else:
                        assert abs(pd[key] - v) <= 1e-12
    print("PASS: bounds, affine invariance, staged=composed, rollup composition (1e-12)")


# --- end-to-end determinism -------------------------------------------------------


def run_pipeline(root):
    inputs = write_fixture(root / "inputs")
    ws = ingest(
        inputs / "survey.csv",
        inputs / "admin_units.geojson",
        inputs / "rasters",
        inputs / "catalog.json",
        root / "ws",
    )
    compute(ws)
    from vulnatlas.workspace import export

    export(ws, "geojson", "village", root / "villages.geojson")
    export(ws, "csv", "municipality", root / "munis.csv")
    snapshot = {}
    for path in sorted(root.rglob("*")):
        if path.is_file():
            snapshot[path.relative_to(root).as_posix()] = path.read_bytes()
    return snapshot


def test_end_to_end_determinism(tmp_path):
    t0 = time.perf_counter()
    first = run_pipeline(tmp_path / "run1")
    elapsed = time.perf_counter() - t0
    second = run_pipeline(tmp_path / "run2")
    assert sorted(first) == sorted(second)
    for name in first:
        assert first[name] == second[name], f"{name} differs between runs"
    assert elapsed < 5.0, f"pipeline took {elapsed:.2f}s"
    assert "ws/results/default/village.csv" in first
    print(f"PASS: two pipeline runs byte-identical ({len(first)} files, {elapsed:.2f}s)")


# --- batch/online equivalence --------------------------------------------------


def test_batch_online_equivalence(workspace_dir):
    ws = load_workspace(workspace_dir)
    manifest_before = (workspace_dir / "manifest.json").read_bytes()
    defaults = json.loads(serialize_weights(default_weights(ws.catalog)))
    with TestClient(create_app(workspace_dir)) as tc:
        doc = tc.post("/api/whatif", json=defaults).json()
        for level in (Level.DEPARTMENT, Level.MUNICIPALITY, Level.VILLAGE):
            batch = {r.unit_id: r for r in ws.read_results("default", level)}
            online = doc["results"][level.value]
            assert {r["unit_id"] for r in online} == set(batch)
            for row in online:
                ref = batch[row["unit_id"]]
                assert abs(row["vi"] - ref.vi) <= 1e-12
                for det, v in ref.determinants.items():
                    assert abs(row["determinants"][det] - v) <= 1e-12
                for path, v in ref.components.items():
                    if v is None:
                        assert row["components"][path] is None
                    else:
                        assert abs(row["components"][path] - v) <= 1e-12
                for code, v in ref.indicators.items():
                    if v is None:
                        assert row["indicators"][code] is None
                    else:
                        assert abs(row["indicators"][code] - v) <= 1e-12

        bad = {"determinants": {"Exposure": 0.6, "Sensitivity": 0.4, "AdaptiveCapacity": 0.2}}
        resp = tc.post("/api/whatif", json=bad)
        assert resp.status_code == 422
    assert (workspace_dir / "manifest.json").read_bytes() == manifest_before
    assert verify_manifest(workspace_dir) == []
    print("PASS: what-if with default weights equals batch CSVs (1e-12); 422 writes nothing")


# --- format round trips --------------------------------------------------------


def test_format_round_trips(fixture_dir, workspace_dir):
    grids = 0
    for root in (fixture_dir, workspace_dir):
        for path in sorted(root.rglob("*.asc")):
            text = path.read_text()
            assert write_ascii_grid(load_ascii_grid(path)) == text, path.name
            grids += 1
    assert grids >= 15

    for admin_path in (fixture_dir / "admin_units.geojson", workspace_dir / "admin_units.geojson"):
        text = admin_path.read_text()
        assert export_admin_units(load_admin_units(text)) == text
    print(f"PASS: read/write identity on {grids} grids and both admin documents")
