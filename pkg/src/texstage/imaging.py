"""Image loading, grayscale conversion, and gray-level quantization.

A gray raster is represented as a 2-D ``uint8`` numpy array (row-major,
values 0..255).  Quantization reduces it to a :class:`LevelMatrix` whose
entries lie in ``[0, m)``; that grid is the input to co-occurrence
statistics.

Only 8-bit PNG and JPEG files are accepted.  Images with an alpha channel
or more than 8 bits per channel are rejected instead of silently
converted, so the same file always produces the same levels.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import InvalidConfigError, InvalidInputError

__all__ = ["LevelMatrix", "to_grayscale", "quantize", "load_gray"]

_ACCEPTED_FORMATS = ("PNG", "JPEG")


@dataclass(frozen=True)
class LevelMatrix:
    """2-D grid of quantized gray levels, each in ``[0, m)``.

    ``levels`` is an integer array of shape (height, width); ``m`` is the
    number of gray levels the grid was quantized to.
    """

    levels: np.ndarray
    m: int

    def __post_init__(self):
        arr = np.asarray(self.levels)
        if arr.ndim != 2 or arr.size == 0:
            raise InvalidInputError("level matrix must be a nonempty 2-D array")
        if not np.issubdtype(arr.dtype, np.integer):
            raise InvalidInputError(f"levels must be integers, got dtype {arr.dtype}")
        if self.m < 2:
            raise InvalidConfigError(f"gray-level count must be >= 2, got {self.m}")
        if arr.min() < 0 or arr.max() >= self.m:
            raise InvalidInputError(f"levels must lie in [0, {self.m})")
        arr = arr.astype(np.int64, copy=False)
        arr.flags.writeable = False
        object.__setattr__(self, "levels", arr)

    @property
    def height(self) -> int:
        return self.levels.shape[0]

    @property
    def width(self) -> int:
        return self.levels.shape[1]


def _check_gray(gray: np.ndarray) -> np.ndarray:
    arr = np.asarray(gray)
    if arr.size == 0:
        raise InvalidInputError("image is empty")
    if arr.ndim != 2:
        raise InvalidInputError(f"gray raster must be 2-D, got shape {arr.shape}")
    if arr.dtype != np.uint8:
        raise InvalidInputError(f"gray raster must be 8-bit (uint8), got {arr.dtype}")
    return arr


def to_grayscale(image: np.ndarray) -> np.ndarray:
    """Convert an 8-bit RGB raster to gray with the 0.299/0.587/0.114 weights.

    Rounding is half-up (``floor(x + 0.5)``) so the result is identical on
    every platform.  Gray inputs pass through unchanged: (g, g, g) -> g.
    """
    arr = np.asarray(image)
    if arr.size == 0:
        raise InvalidInputError("image is empty")
    if arr.ndim != 3 or arr.shape[2] != 3:
        if arr.ndim == 3 and arr.shape[2] == 4:
            raise InvalidInputError("alpha channels are not supported")
        raise InvalidInputError(f"expected an RGB raster (H, W, 3), got shape {arr.shape}")
    if arr.dtype != np.uint8:
        raise InvalidInputError(f"expected 8-bit channels, got {arr.dtype}")
    r = arr[:, :, 0].astype(np.float64)
    g = arr[:, :, 1].astype(np.float64)
    b = arr[:, :, 2].astype(np.float64)
    gray = np.floor(0.299 * r + 0.587 * g + 0.114 * b + 0.5)
    return np.clip(gray, 0, 255).astype(np.uint8)


def quantize(gray: np.ndarray, m: int, *, scale: str = "fixed") -> LevelMatrix:
    """Quantize an 8-bit gray raster to ``m`` levels.

    ``scale="fixed"`` (default) maps the full [0, 255] range so the same
    intensity always lands in the same bin: ``level = value * m // 256``.
    ``scale="minmax"`` stretches the image's own min..max range over the
    ``m`` bins instead; a constant image collapses to level 0.  Both modes
    use integer arithmetic only and are monotone in the input value.
    """
    arr = _check_gray(gray)
    if m < 2:
        raise InvalidConfigError(f"gray-level count must be >= 2, got {m}")
    values = arr.astype(np.int64)
    if scale == "fixed":
        levels = (values * m) // 256
    elif scale == "minmax":
        vmin = int(values.min())
        span = int(values.max()) - vmin + 1
        levels = ((values - vmin) * m) // span
    else:
        raise InvalidConfigError(f"unknown quantization scale {scale!r}")
    return LevelMatrix(levels=levels, m=m)


def load_gray(source: str | Path | bytes) -> np.ndarray:
    """Load a PNG or JPEG file (path or raw bytes) as a 2-D uint8 gray raster.

    RGB images are converted with :func:`to_grayscale`; single-channel
    images are used as-is.  Anything else (other formats, alpha, palette,
    16-bit) raises :class:`~texstage.errors.InvalidInputError`.
    """
    try:
        if isinstance(source, bytes):
            img = Image.open(io.BytesIO(source))
        else:
            img = Image.open(source)
        img.load()
    except (UnidentifiedImageError, OSError) as exc:
        raise InvalidInputError(f"not a readable image: {exc}") from exc
    if img.format not in _ACCEPTED_FORMATS:
        raise InvalidInputError(f"unsupported image format {img.format!r}; only PNG and JPEG are accepted")
    if img.mode == "L":
        return np.asarray(img, dtype=np.uint8)
    if img.mode == "RGB":
        return to_grayscale(np.asarray(img, dtype=np.uint8))
    raise InvalidInputError(
        f"unsupported image mode {img.mode!r}; only 8-bit grayscale and RGB are accepted"
    )
