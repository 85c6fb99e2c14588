import pytest
from fastapi.testclient import TestClient

from vulnatlas.fixture import write_fixture
from vulnatlas.server import create_app
from vulnatlas.workspace import RASTER_DIR, compute, ingest, run_fire_risk


@pytest.fixture(scope="session")
def fixture_dir(tmp_path_factory):
    dest = tmp_path_factory.mktemp("inputs")
    write_fixture(dest)
    return dest


@pytest.fixture(scope="session")
def workspace_dir(tmp_path_factory, fixture_dir):
    dest = tmp_path_factory.mktemp("workspace") / "ws"
    ingest(
        fixture_dir / "survey.csv",
        fixture_dir / "admin_units.geojson",
        fixture_dir / "rasters",
        fixture_dir / "catalog.json",
        dest,
    )
    compute(dest)
    rasters = dest / RASTER_DIR
    run_fire_risk(
        rasters / "land_cover.asc",
        rasters / "dem.asc",
        rasters / "roads.asc",
        rasters / "settlements.asc",
        dest / "fire",
    )
    return dest


@pytest.fixture(scope="session")
def client(workspace_dir):
    app = create_app(workspace_dir)
    with TestClient(app) as tc:
        yield tc
