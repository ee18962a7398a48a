"""
Serving the classifier over HTTP
================================

Stands up the inference app in-process (no network) and exercises the
health and classify endpoints. Running a real server is one command:
``texstage-serve --model model.json --port 8000``.

Requires the test extra for the in-process client: ``pip install httpx``.
"""

import io
import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient
from PIL import Image

from texstage import (
    GlcmConfig,
    as_training_samples,
    build_model,
    save_model,
    synth_texture,
    synthetic_samples,
)
from texstage.service import create_app

config = GlcmConfig()
train = as_training_samples(synthetic_samples(6, base_seed=0, config=config))
model = build_model(train, k=3, glcm_config=config)

with tempfile.TemporaryDirectory() as tmp:
    model_path = Path(tmp) / "model.json"
    save_model(model, model_path)
    app = create_app(model_path)

client = TestClient(app)

# The health endpoint reports the model version so a deployment can verify
# what it is serving.
print("GET /health")
print(json.dumps(client.get("/health").json(), indent=2))
print()

# Classify one fresh texture, uploaded as a PNG.
buf = io.BytesIO()
Image.fromarray(synth_texture(1, seed=777), mode="L").save(buf, format="PNG")

resp = client.post(
    "/classify",
    params={"binary": "true"},
    files={"file": ("probe.png", buf.getvalue(), "image/png")},
)
print("POST /classify")
print(json.dumps(resp.json(), indent=2))
