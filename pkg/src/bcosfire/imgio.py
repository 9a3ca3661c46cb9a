"""Image file IO: 8-bit PNG/PGM/PPM in, PNG out.

Grayscale images load as float64 in [0, 1]; color images load as (H, W, 3)
uint8 so the green channel can be extracted downstream. Masks binarize at
level 127; response maps keep their raw 0-255 levels as floats.
"""

from __future__ import annotations

import numpy as np
from PIL import Image

__all__ = [
    "load_image",
    "load_gray",
    "load_mask",
    "load_response",
    "save_gray_u8",
    "save_binary",
]


def _open_array(path, mode: str) -> np.ndarray:
    with Image.open(path) as im:
        return np.asarray(im.convert(mode))


def load_image(path) -> np.ndarray:
    """Load an input image: (H, W) float64 in [0, 1], or (H, W, 3) uint8 for color."""
    with Image.open(path) as im:
        if im.mode in ("RGB", "RGBA", "P", "CMYK", "YCbCr"):
            return np.asarray(im.convert("RGB"))
        return np.asarray(im.convert("L"), dtype=np.float64) / 255.0


def load_gray(path) -> np.ndarray:
    """Load as grayscale float64 in [0, 1] regardless of the stored mode."""
    return _open_array(path, "L").astype(np.float64) / 255.0


def load_mask(path) -> np.ndarray:
    """Load a binary mask: grayscale levels above 127 count as 1."""
    return _open_array(path, "L") > 127


def load_response(path) -> np.ndarray:
    """Load a response map saved by save_gray_u8, keeping its 0-255 levels."""
    return _open_array(path, "L").astype(np.float64)


def save_gray_u8(path, values: np.ndarray) -> None:
    """Write a 0-255-scaled float map as 8-bit grayscale (rounded, clipped)."""
    arr = np.rint(np.clip(np.asarray(values, dtype=np.float64), 0.0, 255.0)).astype(np.uint8)
    Image.fromarray(arr, mode="L").save(path)


def save_binary(path, mask: np.ndarray) -> None:
    """Write a boolean mask as 8-bit grayscale with levels 0 and 255."""
    arr = np.where(np.asarray(mask, dtype=bool), 255, 0).astype(np.uint8)
    Image.fromarray(arr, mode="L").save(path)
