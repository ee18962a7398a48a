"""Gray-level co-occurrence matrices and the four texture measures.

The measure formulas come in two variants selected by ``GlcmConfig.mode``:

* ``"paper"`` (default): contrast weights *squared* cell probabilities,
  ``sum (i-j)^2 * p(i,j)^2``, and energy is the square root of the angular
  second moment, ``sqrt(sum p^2)``.  Correlation uses a single mean and
  variance taken from the row marginal (row and column marginals coincide
  for the default symmetric matrix).
* ``"standard"``: the classical Haralick definitions - contrast
  ``sum (i-j)^2 * p(i,j)``, energy as the plain angular second moment, and
  correlation from separate row/column moments.

Homogeneity, ``sum p(i,j) / (1 + (i-j)^2)``, is the same in both modes.

Feature vectors are always ordered (contrast, correlation, energy,
homogeneity); every consumer (distance, CSV, JSON) relies on that order.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegenerateInputError, InvalidConfigError, UndefinedCorrelationError
from .imaging import LevelMatrix, quantize

__all__ = [
    "GlcmConfig",
    "Glcm",
    "FeatureVector",
    "FEATURE_NAMES",
    "pair_counts",
    "build_glcm",
    "contrast",
    "homogeneity",
    "energy",
    "correlation",
    "extract_features",
    "image_features",
]

FEATURE_NAMES = ("contrast", "correlation", "energy", "homogeneity")

MODES = ("paper", "standard")


class FeatureVector(NamedTuple):
    """The four texture measures, in the fixed storage order."""

    contrast: float
    correlation: float
    energy: float
    homogeneity: float


@dataclass(frozen=True)
class GlcmConfig:
    """Parameters controlling co-occurrence accumulation and the measures.

    ``offsets`` lists (row-delta, col-delta) displacements; counts from all
    of them are pooled into one matrix.  The default single (0, 1) offset
    is distance 1 at angle 0.  With ``symmetric=True`` every pixel pair is
    counted in both directions, making the matrix exactly symmetric.
    """

    m: int = 8
    offsets: tuple[tuple[int, int], ...] = ((0, 1),)
    symmetric: bool = True
    mode: str = "paper"

    def __post_init__(self):
        if self.m < 2:
            raise InvalidConfigError(f"gray-level count must be >= 2, got {self.m}")
        offsets = tuple(sorted((int(dr), int(dc)) for dr, dc in self.offsets))
        if not offsets:
            raise InvalidConfigError("at least one offset is required")
        if (0, 0) in offsets:
            raise InvalidConfigError("offset (0, 0) pairs a pixel with itself")
        if self.mode not in MODES:
            raise InvalidConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        object.__setattr__(self, "offsets", offsets)

    def fingerprint(self) -> str:
        """Stable hex digest of the configuration (offset order ignored)."""
        doc = {
            "m": self.m,
            "offsets": [list(o) for o in self.offsets],
            "symmetric": self.symmetric,
            "mode": self.mode,
        }
        blob = json.dumps(doc, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("ascii")).hexdigest()


@dataclass(frozen=True)
class Glcm:
    """Normalized co-occurrence matrix: ``p[i, j]`` sums to 1."""

    m: int
    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=np.float64)
        if p.shape != (self.m, self.m):
            raise InvalidConfigError(f"probability matrix must be {self.m}x{self.m}, got {p.shape}")
        if (p < 0).any():
            raise InvalidConfigError("probabilities must be non-negative")
        total = float(p.sum())
        if abs(total - 1.0) > 1e-12:
            raise InvalidConfigError(f"probabilities must sum to 1, got {total!r}")
        p = p.copy()
        p.flags.writeable = False
        object.__setattr__(self, "p", p)


def pair_counts(levels: LevelMatrix, config: GlcmConfig) -> np.ndarray:
    """Count co-occurring level pairs for every offset, pooled into one grid.

    Returns an ``m x m`` int64 matrix; entry (i, j) counts pixel pairs whose
    first member has level i and whose offset neighbour has level j.  With
    ``config.symmetric`` each pair is also counted reversed, so the result
    equals ``counts + counts.T`` of the one-directional tally.
    """
    if levels.m != config.m:
        raise InvalidConfigError(
            f"level matrix was quantized to {levels.m} levels but config expects {config.m}"
        )
    m = config.m
    arr = levels.levels
    h, w = arr.shape
    counts = np.zeros((m, m), dtype=np.int64)
    found = False
    for dr, dc in config.offsets:
        r0, r1 = max(0, -dr), h - max(0, dr)
        c0, c1 = max(0, -dc), w - max(0, dc)
        if r0 >= r1 or c0 >= c1:
            continue
        a = arr[r0:r1, c0:c1].ravel()
        b = arr[r0 + dr:r1 + dr, c0 + dc:c1 + dc].ravel()
        counts += np.bincount(a * m + b, minlength=m * m).reshape(m, m)
        found = True
    if not found:
        raise DegenerateInputError(
            f"no in-bounds pixel pair for any offset on a {h}x{w} image"
        )
    if config.symmetric:
        counts = counts + counts.T
    return counts


def build_glcm(levels: LevelMatrix, config: GlcmConfig) -> Glcm:
    """Build the normalized co-occurrence matrix for ``levels``."""
    counts = pair_counts(levels, config)
    return Glcm(m=config.m, p=counts / counts.sum())


def _diff_sq(m: int) -> np.ndarray:
    idx = np.arange(m, dtype=np.float64)
    return (idx[:, None] - idx[None, :]) ** 2


def contrast(g: Glcm, mode: str = "paper") -> float:
    """Squared-level-difference contrast.

    Mode ``"paper"`` weights squared probabilities (``(i-j)^2 * p^2``);
    ``"standard"`` weights plain probabilities.  Zero exactly when all mass
    sits on the diagonal.
    """
    p = g.p ** 2 if mode == "paper" else g.p
    return float((_diff_sq(g.m) * p).sum())


def homogeneity(g: Glcm, mode: str = "paper") -> float:
    """Inverse-difference-moment homogeneity, ``sum p / (1 + (i-j)^2)``.

    Identical in both modes; lies in (0, 1] and equals 1 only for a purely
    diagonal matrix.
    """
    del mode
    return float((g.p / (1.0 + _diff_sq(g.m))).sum())


def energy(g: Glcm, mode: str = "paper") -> float:
    """Texture uniformity.

    ``"paper"`` returns ``sqrt(sum p^2)``; ``"standard"`` returns the plain
    angular second moment ``sum p^2``.  Both lie in (0, 1].
    """
    asm = float((g.p ** 2).sum())
    return math.sqrt(asm) if mode == "paper" else asm


def correlation(g: Glcm, mode: str = "paper") -> float:
    """Linear correlation between paired gray levels, in [-1, 1].

    ``"paper"`` uses one mean/variance from the row marginal (equal to the
    column marginal when the matrix is symmetric); ``"standard"`` uses
    separate row and column moments.  A matrix whose marginal variance is
    zero (constant image) has no defined correlation and raises
    :class:`~texstage.errors.UndefinedCorrelationError`.
    """
    idx = np.arange(g.m, dtype=np.float64)
    p_row = g.p.sum(axis=1)
    if mode == "paper":
        mu = float(idx @ p_row)
        var = float(((idx - mu) ** 2) @ p_row)
        if var <= 0.0:
            raise UndefinedCorrelationError("gray-level variance is zero; correlation undefined")
        dev = idx - mu
        cov = float((dev[:, None] * dev[None, :] * g.p).sum())
        value = cov / var
    else:
        p_col = g.p.sum(axis=0)
        mu_r = float(idx @ p_row)
        mu_c = float(idx @ p_col)
        var_r = float(((idx - mu_r) ** 2) @ p_row)
        var_c = float(((idx - mu_c) ** 2) @ p_col)
        denom = math.sqrt(var_r * var_c)
        if denom <= 0.0:
            raise UndefinedCorrelationError("gray-level variance is zero; correlation undefined")
        cov = float(((idx - mu_r)[:, None] * (idx - mu_c)[None, :] * g.p).sum())
        value = cov / denom
    # guard against |value| drifting past 1 by a few ulps
    return float(min(1.0, max(-1.0, value)))


def extract_features(levels: LevelMatrix, config: GlcmConfig) -> FeatureVector:
    """Build the matrix once and evaluate all four measures on it."""
    g = build_glcm(levels, config)
    return FeatureVector(
        contrast=contrast(g, config.mode),
        correlation=correlation(g, config.mode),
        energy=energy(g, config.mode),
        homogeneity=homogeneity(g, config.mode),
    )


def image_features(gray: np.ndarray, config: GlcmConfig, *, scale: str = "fixed") -> FeatureVector:
    """Quantize a gray raster and extract its feature vector in one step."""
    return extract_features(quantize(gray, config.m, scale=scale), config)
