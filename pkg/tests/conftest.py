"""Shared fixtures: a small trained model and PNG byte helpers."""

import io

import numpy as np
import pytest
from PIL import Image

from texstage import as_training_samples, build_model, save_model, synthetic_samples


def png_bytes(arr: np.ndarray) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(arr).save(buf, format="PNG")
    return buf.getvalue()


@pytest.fixture(scope="session")
def synth_model():
    """k=3 model built from 5 synthetic samples per class (seeds 0..4)."""
    samples = synthetic_samples(5, 0)
    return build_model(as_training_samples(samples), k=3)


@pytest.fixture(scope="session")
def synth_model_file(synth_model, tmp_path_factory):
    path = tmp_path_factory.mktemp("model") / "model.json"
    save_model(synth_model, path)
    return path
