"""Stage labeling, triplet averaging, CSV persistence, and synthetic textures.

The CSV schema is fixed::

    source_id,day,label,contrast,correlation,energy,homogeneity

UTF-8, label in {I, II, III}, features rendered with 17 significant digits
so a save/load round trip reproduces every float bit-exactly.

The synthetic generator stands in for mask micro-photographs in tests and
demos: a bright speckled base with class-controlled impurity density
(2% / 10% / 25% dark pixels for classes 0 / 1 / 2).  It runs on a
counter-based splitmix64 stream (documented below), so the same
(class, seed) pair yields a bit-identical raster on every platform.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DatasetParseError, InvalidInputError, ValidationError
from .glcm import FeatureVector, GlcmConfig, image_features
from .knn import StageLabel, TrainingSample

__all__ = [
    "CSV_HEADER",
    "MAX_DAY",
    "stage_of_day",
    "PhotoTriplet",
    "LabeledSample",
    "make_sample",
    "average_triplet",
    "save_dataset",
    "load_dataset",
    "as_training_samples",
    "SYNTH_SIZE",
    "SYNTH_DENSITIES",
    "synth_texture",
    "synthetic_samples",
    "day_for_class",
]

CSV_HEADER = ("source_id", "day", "label", "contrast", "correlation", "energy", "homogeneity")

MAX_DAY = 5


def stage_of_day(day: int) -> StageLabel:
    """Map a use-day to its stage: 0-1 -> I, 2-3 -> II, 4-5 -> III.

    The taxonomy ends at day 5; anything outside [0, 5] is an error rather
    than being clamped.
    """
    if not 0 <= day <= MAX_DAY:
        raise InvalidInputError(f"day must be in [0, {MAX_DAY}], got {day}")
    return StageLabel(day // 2 + 1)


@dataclass(frozen=True)
class PhotoTriplet:
    """Left/middle/right micro-photos of one session, taken on one use-day."""

    left: str
    middle: str
    right: str
    day: int
    condition: str = ""

    def __post_init__(self):
        stage_of_day(self.day)

    @property
    def paths(self) -> tuple[str, str, str]:
        return (self.left, self.middle, self.right)


@dataclass(frozen=True)
class LabeledSample:
    """One feature vector with its stage label and provenance."""

    source_id: str
    day: int
    label: StageLabel
    features: FeatureVector

    def __post_init__(self):
        if not self.source_id:
            raise ValidationError("source_id must be nonempty")
        expected = stage_of_day(self.day)
        if self.label is not expected:
            raise ValidationError(
                f"label {self.label.code} contradicts day {self.day} (expected {expected.code})"
            )


def make_sample(source_id: str, day: int, features: FeatureVector) -> LabeledSample:
    """Build a sample with the label derived from the day."""
    return LabeledSample(source_id=source_id, day=day, label=stage_of_day(day), features=features)


def average_triplet(
    f_left: FeatureVector,
    f_mid: FeatureVector,
    f_right: FeatureVector,
    *,
    fingerprints: Sequence[str] | None = None,
) -> FeatureVector:
    """Component-wise mean of the three per-location feature vectors.

    When the caller knows the extraction-config fingerprints of the three
    vectors it can pass them; a mismatch is rejected so vectors produced
    under different configurations are never blended.
    """
    if fingerprints is not None:
        if len(fingerprints) != 3:
            raise InvalidInputError("expected exactly three fingerprints")
        if len(set(fingerprints)) != 1:
            raise InvalidInputError("triplet features come from different feature configurations")
    return FeatureVector(*((a + b + c) / 3.0 for a, b, c in zip(f_left, f_mid, f_right)))


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def save_dataset(samples: Iterable[LabeledSample], path: str | Path, *, append: bool = False) -> None:
    """Write samples as CSV; with ``append`` rows are added to an existing file."""
    path = Path(path)
    write_header = not (append and path.exists() and path.stat().st_size > 0)
    mode = "a" if append else "w"
    with open(path, mode, encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        if write_header:
            writer.writerow(CSV_HEADER)
        for s in samples:
            writer.writerow([s.source_id, s.day, s.label.code, *(_fmt(v) for v in s.features)])


def load_dataset(path: str | Path) -> list[LabeledSample]:
    """Read a dataset CSV; an empty file yields an empty list.

    Malformed rows raise :class:`~texstage.errors.DatasetParseError` with
    their line number; duplicated source ids or label/day contradictions
    raise :class:`~texstage.errors.ValidationError`.
    """
    samples: list[LabeledSample] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if lineno == 1:
                if tuple(row) != CSV_HEADER:
                    raise DatasetParseError(
                        f"bad header {row!r}; expected {','.join(CSV_HEADER)}", line=1
                    )
                continue
            if not row:
                continue
            if len(row) != len(CSV_HEADER):
                raise DatasetParseError(
                    f"expected {len(CSV_HEADER)} fields, got {len(row)}", line=lineno
                )
            source_id, day_s, label_s, *feature_s = row
            try:
                day = int(day_s)
                features = FeatureVector(*(float(v) for v in feature_s))
            except ValueError as exc:
                raise DatasetParseError(str(exc), line=lineno) from exc
            try:
                label = StageLabel.from_code(label_s)
                sample = LabeledSample(source_id=source_id, day=day, label=label, features=features)
            except (ValidationError, InvalidInputError) as exc:
                raise type(exc)(f"line {lineno}: {exc}") from exc
            if sample.source_id in seen:
                raise ValidationError(f"line {lineno}: duplicate source_id {sample.source_id!r}")
            seen.add(sample.source_id)
            samples.append(sample)
    return samples


def as_training_samples(samples: Iterable[LabeledSample]) -> list[TrainingSample]:
    """Adapt dataset rows to the classifier's training-sample shape."""
    return [TrainingSample(s.features, s.label, s.source_id) for s in samples]


# ---------------------------------------------------------------------------
# Synthetic textures
#
# Pseudorandom stream: splitmix64.  For a lane seeded with s, the i-th draw
# (i = 1, 2, ...) is mix64(s + i * 0x9E3779B97F4A7C15) where mix64 is the
# splitmix64 finalizer:
#
#     z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9
#     z ^= z >> 27;  z *= 0x94D049BB133111EB
#     z ^= z >> 31                                (all mod 2**64)
#
# Each raster uses three independent lanes (base values, speckle positions,
# speckle values) derived from mix64 over (seed, class_index).  Everything
# is 64-bit integer arithmetic, so outputs are identical on every platform.
# ---------------------------------------------------------------------------

SYNTH_SIZE = 128
SYNTH_DENSITIES = (0.02, 0.10, 0.25)

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

_BASE_LOW, _BASE_RANGE = 184, 48  # bright base: values in [184, 232)
_DARK_LOW, _DARK_RANGE = 24, 32  # impurity speckle: values in [24, 56)


def _mix64(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


def _lane_block(seed: int, count: int) -> np.ndarray:
    """Vectorized draws 1..count of the splitmix64 lane seeded with ``seed``."""
    z = np.uint64(seed) + np.arange(1, count + 1, dtype=np.uint64) * np.uint64(_GAMMA)
    z ^= z >> np.uint64(30)
    z *= np.uint64(_MIX1)
    z ^= z >> np.uint64(27)
    z *= np.uint64(_MIX2)
    z ^= z >> np.uint64(31)
    return z


class _Lane:
    """Scalar sequential view of the same splitmix64 stream."""

    __slots__ = ("_seed", "_i")

    def __init__(self, seed: int):
        self._seed = seed & _MASK
        self._i = 0

    def below(self, bound: int) -> int:
        self._i += 1
        draw = _mix64(self._seed + self._i * _GAMMA)
        return (draw >> 33) % bound


def synth_texture(class_index: int, seed: int) -> np.ndarray:
    """Deterministic 128x128 gray raster emulating a used-mask micro-photo.

    Higher ``class_index`` plants a denser set of dark impurity pixels
    (exactly ``round(density * pixels)`` of them, chosen by a partial
    Fisher-Yates shuffle), which drives contrast up and homogeneity down.
    """
    if class_index not in (0, 1, 2):
        raise InvalidInputError(f"class_index must be 0, 1, or 2, got {class_index}")
    root = _mix64((int(seed) & _MASK) ^ _mix64(class_index + 1))
    n = SYNTH_SIZE * SYNTH_SIZE

    base = _lane_block(_mix64(root ^ 0xB1), n)
    values = (_BASE_LOW + (base >> np.uint64(33)) % np.uint64(_BASE_RANGE)).astype(np.uint8)

    n_dark = round(SYNTH_DENSITIES[class_index] * n)
    positions = np.arange(n, dtype=np.int64)
    lane = _Lane(_mix64(root ^ 0xB2))
    for i in range(n_dark):
        j = i + lane.below(n - i)
        positions[i], positions[j] = positions[j], positions[i]

    dark = _lane_block(_mix64(root ^ 0xB3), n_dark)
    values[positions[:n_dark]] = (
        _DARK_LOW + (dark >> np.uint64(33)) % np.uint64(_DARK_RANGE)
    ).astype(np.uint8)
    return values.reshape(SYNTH_SIZE, SYNTH_SIZE)


def day_for_class(class_index: int) -> int:
    """Representative use-day for a synthetic class: 0, 2, or 4."""
    if class_index not in (0, 1, 2):
        raise InvalidInputError(f"class_index must be 0, 1, or 2, got {class_index}")
    return 2 * class_index


def synthetic_samples(
    per_class: int,
    base_seed: int = 0,
    config: GlcmConfig | None = None,
) -> list[LabeledSample]:
    """Generate ``per_class`` labeled samples for each of the three classes.

    Sample i of class c uses seed ``base_seed + i``; pick disjoint seed
    ranges for train and evaluation sets to keep them independent.
    """
    if per_class < 1:
        raise InvalidInputError(f"per_class must be >= 1, got {per_class}")
    cfg = config if config is not None else GlcmConfig()
    samples = []
    for c in (0, 1, 2):
        for i in range(per_class):
            seed = base_seed + i
            feats = image_features(synth_texture(c, seed), cfg)
            samples.append(make_sample(f"synth-c{c}-s{seed}", day_for_class(c), feats))
    return samples
