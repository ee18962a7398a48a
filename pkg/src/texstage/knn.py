"""k-nearest-neighbor stage classification over texture feature vectors.

A model is nothing more than the stored training samples plus ``k`` and the
feature-extraction configuration they were produced with; classification
is a distance scan.  All tie-breaking is deterministic:

* neighbors are ranked by (distance, sample id), a total order;
* a majority-vote tie goes to the tied label with the smaller summed
  neighbor distance, then to the lower stage label.
"""

from __future__ import annotations

import hashlib
import json
import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum, IntEnum
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import (
    DatasetParseError,
    InvalidConfigError,
    InvalidInputError,
    InvalidModelError,
    ValidationError,
)
from .glcm import FeatureVector, GlcmConfig

__all__ = [
    "StageLabel",
    "BinaryLabel",
    "to_binary",
    "TrainingSample",
    "Neighbor",
    "Prediction",
    "Model",
    "build_model",
    "distance",
    "classify",
    "SweepRow",
    "SweepResult",
    "sweep_k",
    "save_model",
    "load_model",
    "model_digest",
]

MODEL_SCHEMA_VERSION = 1

NORMALIZATIONS = ("none", "zscore")


class StageLabel(IntEnum):
    """Service stage of a mask: the ordering I < II < III is meaningful."""

    TYPE_I = 1
    TYPE_II = 2
    TYPE_III = 3

    @property
    def code(self) -> str:
        return _CODES[self]

    @property
    def phrase(self) -> str:
        return _PHRASES[self]

    @classmethod
    def from_code(cls, code: str) -> "StageLabel":
        for label, c in _CODES.items():
            if c == code:
                return label
        raise ValidationError(f"unknown stage label {code!r}; expected one of I, II, III")

    def __str__(self) -> str:
        return f"Type {self.code}"


_CODES = {StageLabel.TYPE_I: "I", StageLabel.TYPE_II: "II", StageLabel.TYPE_III: "III"}
_PHRASES = {
    StageLabel.TYPE_I: "normal use",
    StageLabel.TYPE_II: "early warning",
    StageLabel.TYPE_III: "not recommended",
}


class BinaryLabel(Enum):
    """Collapsed two-way verdict, ordered from benign to worn out."""

    NORMAL_USE = "normal use"
    NOT_RECOMMENDED = "not recommended"

    def __str__(self) -> str:
        return self.value

    def __lt__(self, other):
        if not isinstance(other, BinaryLabel):
            return NotImplemented
        order = list(type(self))
        return order.index(self) < order.index(other)


def to_binary(label: StageLabel) -> BinaryLabel:
    """Collapse the three stages to two: types I and II are still usable."""
    if label is StageLabel.TYPE_III:
        return BinaryLabel.NOT_RECOMMENDED
    return BinaryLabel.NORMAL_USE


class TrainingSample(NamedTuple):
    features: FeatureVector
    label: StageLabel
    sample_id: str


class Neighbor(NamedTuple):
    sample_id: str
    label: StageLabel
    distance: float


@dataclass(frozen=True)
class Prediction:
    """Classification outcome plus the k neighbors that produced it."""

    label: StageLabel
    neighbors: tuple[Neighbor, ...]


@dataclass(frozen=True)
class Model:
    """Immutable KNN model: samples, k, and feature-extraction provenance.

    ``norm_stats`` holds the per-feature (means, stds) fitted on the
    training samples when ``normalization == "zscore"``; queries and stored
    samples are both transformed with these statistics at classify time.
    """

    samples: tuple[TrainingSample, ...]
    k: int
    glcm_config: GlcmConfig
    normalization: str = "none"
    norm_stats: tuple[tuple[float, ...], tuple[float, ...]] | None = None

    def __post_init__(self):
        if not self.samples:
            raise InvalidModelError("model has no training samples")
        if not 1 <= self.k <= len(self.samples):
            raise InvalidConfigError(
                f"k must be in [1, {len(self.samples)}], got {self.k}"
            )
        ids = [s.sample_id for s in self.samples]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise InvalidModelError(f"duplicate sample ids: {dupes}")
        if self.normalization not in NORMALIZATIONS:
            raise InvalidConfigError(
                f"normalization must be one of {NORMALIZATIONS}, got {self.normalization!r}"
            )
        if (self.normalization == "zscore") != (self.norm_stats is not None):
            raise InvalidModelError("zscore models carry norm_stats; others must not")

    @property
    def fingerprint(self) -> str:
        return self.glcm_config.fingerprint()


def build_model(
    samples: Iterable[TrainingSample],
    k: int,
    glcm_config: GlcmConfig | None = None,
    normalization: str = "none",
) -> Model:
    """Assemble a model, fitting z-score statistics on the samples if asked."""
    samples = tuple(samples)
    stats = None
    if normalization == "zscore":
        if not samples:
            raise InvalidModelError("model has no training samples")
        feats = np.array([s.features for s in samples], dtype=np.float64)
        means = feats.mean(axis=0)
        stds = feats.std(axis=0)  # population std; zero-variance dims left unscaled
        stds = np.where(stds == 0.0, 1.0, stds)
        stats = (tuple(float(v) for v in means), tuple(float(v) for v in stds))
    return Model(
        samples=samples,
        k=k,
        glcm_config=glcm_config if glcm_config is not None else GlcmConfig(),
        normalization=normalization,
        norm_stats=stats,
    )


def distance(a: FeatureVector, b: FeatureVector) -> float:
    """Euclidean distance over the four feature dimensions."""
    return math.sqrt(sum((x - y) ** 2 for x, y in zip(a, b)))


def _normalized(model: Model, feats: np.ndarray) -> np.ndarray:
    if model.normalization == "zscore":
        means, stds = model.norm_stats
        return (feats - np.asarray(means)) / np.asarray(stds)
    return feats


def classify(model: Model, x: FeatureVector) -> Prediction:
    """Majority vote among the k nearest stored samples.

    Neighbors are selected under the total order (distance, sample id), so
    the outcome never depends on sample storage order.  Reported neighbor
    distances are in the model's normalized feature space.
    """
    if not model.samples:
        raise InvalidModelError("model has no training samples")
    feats = np.array([s.features for s in model.samples], dtype=np.float64)
    query = np.asarray(x, dtype=np.float64)
    feats = _normalized(model, feats)
    query = _normalized(model, query)
    dists = np.sqrt(((feats - query) ** 2).sum(axis=1))
    order = sorted(range(len(model.samples)), key=lambda i: (dists[i], model.samples[i].sample_id))
    top = order[: model.k]
    neighbors = tuple(
        Neighbor(model.samples[i].sample_id, model.samples[i].label, float(dists[i])) for i in top
    )
    votes = Counter(n.label for n in neighbors)
    best = max(votes.values())
    tied = [label for label, count in votes.items() if count == best]
    if len(tied) == 1:
        winner = tied[0]
    else:
        sums = {label: sum(n.distance for n in neighbors if n.label == label) for label in tied}
        closest = min(sums.values())
        winner = min(label for label in tied if sums[label] == closest)
    return Prediction(label=winner, neighbors=neighbors)


class SweepRow(NamedTuple):
    k: int
    correct: int
    accuracy: float


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    best_k: int


def sweep_k(
    train: Sequence[TrainingSample],
    eval_samples: Sequence,
    k_min: int,
    k_max: int,
    *,
    glcm_config: GlcmConfig | None = None,
    normalization: str = "none",
) -> SweepResult:
    """Accuracy of every k in [k_min, k_max] on a labeled evaluation set.

    ``eval_samples`` may be any objects with ``features`` and ``label``
    attributes.  Best k is the accuracy argmax; ties go to the smallest k.
    """
    train = tuple(train)
    if not eval_samples:
        raise InvalidInputError("evaluation set is empty")
    if not 1 <= k_min <= k_max <= len(train):
        raise InvalidConfigError(
            f"need 1 <= k_min <= k_max <= {len(train)}, got [{k_min}, {k_max}]"
        )
    rows = []
    for k in range(k_min, k_max + 1):
        model = build_model(train, k, glcm_config, normalization)
        correct = sum(classify(model, s.features).label == s.label for s in eval_samples)
        rows.append(SweepRow(k=k, correct=correct, accuracy=correct / len(eval_samples)))
    best = max(rows, key=lambda r: (r.accuracy, -r.k))
    return SweepResult(rows=tuple(rows), best_k=best.k)


def _model_doc(model: Model) -> dict:
    cfg = model.glcm_config
    return {
        "version": MODEL_SCHEMA_VERSION,
        "glcm_config": {
            "m": cfg.m,
            "offsets": [list(o) for o in cfg.offsets],
            "symmetric": cfg.symmetric,
            "mode": cfg.mode,
        },
        "fingerprint": model.fingerprint,
        "k": model.k,
        "normalization": model.normalization,
        "norm_stats": None
        if model.norm_stats is None
        else {"mean": list(model.norm_stats[0]), "std": list(model.norm_stats[1])},
        "samples": [
            {"id": s.sample_id, "label": s.label.code, "features": list(s.features)}
            for s in model.samples
        ],
    }


def save_model(model: Model, path: str | Path) -> None:
    """Write the model as JSON.

    Floats are serialized with Python's shortest round-trip representation,
    so ``load_model(save_model(m)) == m`` bit-exactly.
    """
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_model_doc(model), fh, indent=2)
        fh.write("\n")


def load_model(path: str | Path) -> Model:
    """Read a model JSON file back, verifying schema version and fingerprint."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DatasetParseError(f"model file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise DatasetParseError("model file must contain a JSON object")
    version = doc.get("version")
    if version != MODEL_SCHEMA_VERSION:
        raise ValidationError(f"unsupported model schema version {version!r}")
    try:
        cfg_doc = doc["glcm_config"]
        cfg = GlcmConfig(
            m=cfg_doc["m"],
            offsets=tuple(tuple(o) for o in cfg_doc["offsets"]),
            symmetric=cfg_doc["symmetric"],
            mode=cfg_doc["mode"],
        )
        samples = tuple(
            TrainingSample(
                features=FeatureVector(*(float(v) for v in s["features"])),
                label=StageLabel.from_code(s["label"]),
                sample_id=str(s["id"]),
            )
            for s in doc["samples"]
        )
        stats_doc = doc.get("norm_stats")
        stats = None
        if stats_doc is not None:
            stats = (
                tuple(float(v) for v in stats_doc["mean"]),
                tuple(float(v) for v in stats_doc["std"]),
            )
        model = Model(
            samples=samples,
            k=doc["k"],
            glcm_config=cfg,
            normalization=doc.get("normalization", "none"),
            norm_stats=stats,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DatasetParseError(f"model file is malformed: {exc}") from exc
    if doc.get("fingerprint") != model.fingerprint:
        raise ValidationError(
            "model fingerprint does not match its feature configuration; file may be corrupted"
        )
    return model


def model_digest(model: Model) -> str:
    """Content hash identifying a model; stable across save/load cycles."""
    blob = json.dumps(_model_doc(model), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()
