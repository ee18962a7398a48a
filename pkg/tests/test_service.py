"""HTTP endpoint behavior and parity with the command line."""

import json

import numpy as np
import pytest
from fastapi.testclient import TestClient

from texstage import model_digest, synth_texture
from texstage.cli import main as cli_main
from texstage.service import create_app

from conftest import png_bytes


@pytest.fixture(scope="module")
def client(synth_model_file):
    with TestClient(create_app(synth_model_file)) as c:
        yield c


def post_image(client, arr, **params):
    return client.post("/classify", params=params,
                       files={"file": ("img.png", png_bytes(arr), "image/png")})


# --- health -----------------------------------------------------------------


def test_health_is_503_without_a_model():
    with TestClient(create_app()) as c:
        r = c.get("/health")
        assert r.status_code == 503
        assert r.json()["status"] == "unavailable"
        r = post_image(c, synth_texture(0, 1))
        assert r.status_code == 503


def test_health_reports_model_version_and_fingerprint(client, synth_model):
    r = client.get("/health")
    assert r.status_code == 200
    doc = r.json()
    assert doc["status"] == "ok"
    assert doc["model_version"] == model_digest(synth_model)
    assert doc["fingerprint"] == synth_model.fingerprint


def test_reloading_the_same_model_file_gives_the_same_fingerprint(synth_model_file):
    with TestClient(create_app(synth_model_file)) as a, \
            TestClient(create_app(synth_model_file)) as b:
        assert a.get("/health").json() == b.get("/health").json()


# --- classify ----------------------------------------------------------------


def test_classify_returns_stage_phrase_features_and_version(client, synth_model):
    r = post_image(client, synth_texture(2, 555))
    assert r.status_code == 200
    doc = r.json()
    assert doc["stage"] == "III"
    assert doc["phrase"] == "not recommended"
    assert len(doc["features"]) == 4
    assert doc["model_version"] == model_digest(synth_model)
    assert "binary" not in doc


def test_classify_binary_query_parameter(client):
    r = post_image(client, synth_texture(0, 556), binary="true")
    assert r.status_code == 200
    assert r.json()["binary"] == "normal use"
    r = post_image(client, synth_texture(2, 557), binary=1)
    assert r.json()["binary"] == "not recommended"


def test_repeated_uploads_get_identical_bodies(client):
    arr = synth_texture(1, 558)
    first = post_image(client, arr)
    second = post_image(client, arr)
    assert first.status_code == second.status_code == 200
    assert first.json() == second.json()


def test_classify_parity_with_the_cli(client, synth_model_file, capsys):
    for c, seed in [(0, 700), (1, 701), (2, 702)]:
        arr = synth_texture(c, seed)
        service_stage = post_image(client, arr).json()["stage"]

        from PIL import Image
        import tempfile, os
        with tempfile.TemporaryDirectory() as d:
            path = os.path.join(d, "probe.png")
            Image.fromarray(arr).save(path)
            rc = cli_main(["classify", "--model", str(synth_model_file), path,
                           "--format", "json"])
            out = capsys.readouterr().out
        assert rc == 0
        assert json.loads(out)["stage"] == service_stage


# --- error paths -------------------------------------------------------------


def test_degenerate_image_is_422(client):
    r = post_image(client, np.full((32, 32), 99, dtype=np.uint8))
    assert r.status_code == 422
    assert "correlation" in r.json()["error"]


def test_unreadable_upload_is_400(client):
    r = client.post("/classify", files={"file": ("x.txt", b"hello world", "text/plain")})
    assert r.status_code == 400
    assert "error" in r.json()


def test_unsupported_format_is_400(client):
    import io
    from PIL import Image
    buf = io.BytesIO()
    Image.new("L", (8, 8)).save(buf, format="BMP")
    r = client.post("/classify", files={"file": ("x.bmp", buf.getvalue(), "image/bmp")})
    assert r.status_code == 400


def test_missing_file_field_is_400(client):
    assert client.post("/classify").status_code == 400
    r = client.post("/classify", files={"picture": ("x.png", b"123", "image/png")})
    assert r.status_code == 400


def test_oversized_upload_is_400(synth_model_file):
    with TestClient(create_app(synth_model_file, max_upload_bytes=64)) as c:
        r = c.post("/classify", files={"file": ("x.png", b"\x89" * 65, "image/png")})
        assert r.status_code == 400
        assert "64" in r.json()["error"]
        # and a tiny payload still gets past the size gate
        r = c.post("/classify", files={"file": ("x.png", b"\x89" * 10, "image/png")})
        assert r.status_code == 400  # unreadable, but not because of size
        assert "64" not in r.json()["error"]
