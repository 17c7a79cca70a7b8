import pytest
from fastapi.testclient import TestClient

from app.main import app

PREFIX = "/apiBiquotient"


@pytest.fixture(scope="module")
def client():
    with TestClient(app) as c:
        yield c


def test_root(client):
    assert client.get("/").status_code == 200


def test_circle(client):
    body = client.post(f"{PREFIX}/circle", json={"weights": [1, 0, 0, 1], "oracle": 12}).json()
    assert body["errCode"] == 0
    assert body["data"]["diffeo"] == "S3xS2"
    assert body["data"]["provenance"] == "both"
    assert body["data"]["schema"] == "biquotient-report/1"


def test_circle_domain_error(client):
    response = client.post(f"{PREFIX}/circle", json={"weights": [0, 0, 0, 0]})
    assert response.status_code == 200
    assert response.json()["errCode"] == 1001


@pytest.mark.parametrize(
    "payload",
    [{"weights": [1, 0, 0]}, {"weights": [1, 0, 0, 1], "oracle": 1}, {"weights": "1,0,0,1"}],
)
def test_circle_validation(client, payload):
    response = client.post(f"{PREFIX}/circle", json=payload)
    assert response.status_code == 422
    assert response.json()["errCode"] == 1400


def test_torus(client):
    body = client.post(f"{PREFIX}/torus", json={"rows": [[1, 1, 0, 0], [0, 2, 1, 1]]}).json()
    assert body["errCode"] == 0
    assert body["data"]["diffeo"] == "S2xS2"
    assert body["data"]["normalized"] == [1, 2, 0, 1]


def test_degenerate_torus_is_reported_not_raised(client):
    body = client.post(f"{PREFIX}/torus", json={"rows": [[1, 0, 1, 0], [0, 1, 0, 1]], "oracle": 4}).json()
    assert body["errCode"] == 0
    assert body["data"]["verdict"]["status"] == "degenerate"
    assert body["data"]["diffeo"] is None
    assert body["data"]["oracle"]["agrees"] is True


def test_catalog(client):
    assert len(client.get(f"{PREFIX}/catalog/4").json()["data"]) == 10
    assert len(client.get(f"{PREFIX}/catalog/4", params={"manifold": "S4"}).json()["data"]) == 5
    body = client.get(f"{PREFIX}/catalog/6").json()
    assert body["errCode"] == 1001
    assert body["data"] is None


def test_enumerate(client):
    body = client.post(f"{PREFIX}/enumerate", json={"dim": 5, "bound": 1}).json()
    assert body["errCode"] == 0
    assert body["data"]["summary"]["canonical_count"] == len(body["data"]["reports"])
    assert set(body["data"]["summary"]["histogram"]) <= {"S3xS2", "S3twistS2"}


def test_enumerate_limits(client):
    assert client.post(f"{PREFIX}/enumerate", json={"dim": 5, "bound": 99}).json()["errCode"] == 1001
    assert client.post(f"{PREFIX}/enumerate", json={"dim": 4, "bound": 2}).json()["errCode"] == 1001
    assert client.post(f"{PREFIX}/enumerate", json={"dim": 3, "bound": 1}).status_code == 422


def test_enumerate_torus_default_bound(client):
    body = client.post(f"{PREFIX}/enumerate", json={"dim": 4}).json()
    assert body["errCode"] == 0
    assert body["data"]["summary"]["bound"] == 1
    assert body["data"]["summary"]["raw_count"] == 80 ** 2
