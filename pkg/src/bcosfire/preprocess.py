"""Preprocessing for fundus-style RGB images.

The filter consumes a single contrast-enhanced channel: the green plane
(best vessel/background contrast), with the field-of-view border smoothed
outward so the FOV edge itself does not trigger responses, followed by
contrast-limited adaptive histogram equalization.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from bcosfire.imops import as_image, as_mask

__all__ = ["extract_green", "smooth_fov_border", "clahe", "preprocess_image"]

_EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)


def extract_green(rgb: np.ndarray) -> np.ndarray:
    """Green channel of an 8-bit RGB image, scaled to [0, 1]."""
    arr = np.asarray(rgb)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"expected an (H, W, 3) RGB image, got shape {arr.shape}")
    return arr[:, :, 1].astype(np.float64) / 255.0


def smooth_fov_border(gray: np.ndarray, mask, iterations: int = 10) -> np.ndarray:
    """Grow the image content past the FOV border by iterative mean fill.

    Each iteration dilates the filled region by one pixel (8-connected);
    every newly reached pixel is assigned the mean of its neighbors that
    were already filled before the iteration started. Pixels inside the
    mask are never modified; pixels never reached keep their original
    values.

    This removes the hard intensity step at the FOV edge so the band just
    outside the mask blends smoothly into the retina, preventing false
    responses along the border.
    """
    img = as_image(gray).copy()
    filled = as_mask(mask, img.shape).copy()
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    for _ in range(int(iterations)):
        if filled.all():
            break
        ring = ndimage.binary_dilation(filled, structure=_EIGHT_CONNECTED) & ~filled
        if not ring.any():
            break
        inside = np.where(filled, img, 0.0)
        neighbor_sum = ndimage.convolve(inside, _EIGHT_CONNECTED.astype(np.float64), mode="constant")
        neighbor_cnt = ndimage.convolve(filled.astype(np.float64), _EIGHT_CONNECTED.astype(np.float64), mode="constant")
        # ring pixels are not in `filled`, so the center tap contributes 0
        img[ring] = neighbor_sum[ring] / neighbor_cnt[ring]
        filled |= ring
    return img


def _tile_edges(size: int, tiles: int) -> np.ndarray:
    return np.rint(np.linspace(0.0, size, tiles + 1)).astype(int)


def _tile_mapping(values: np.ndarray, clip_limit: float, nbins: int) -> np.ndarray:
    """Clipped-equalization lookup table (bin index -> output level) for one tile."""
    n = values.size
    vmin = values.min()
    if vmin == values.max():
        # degenerate single-level tile: map every bin to that level
        return np.full(nbins, vmin)
    bins = np.minimum((values * nbins).astype(int), nbins - 1)
    hist = np.bincount(bins, minlength=nbins).astype(np.float64)
    # limit interpolates from the uniform bin count (clip -> 0) up to the
    # tile size (clip = 1, i.e. no clipping at all)
    limit = n / nbins + clip_limit * (n - n / nbins)
    excess = np.maximum(hist - limit, 0.0).sum()
    if excess > 0.0:
        np.minimum(hist, limit, out=hist)
        hist += excess / nbins
    cdf = np.cumsum(hist)
    # redistribution keeps the total at n only up to roundoff; clamp so the
    # top of the mapping cannot drift past 1
    return np.minimum(cdf / n, 1.0)


def clahe(gray: np.ndarray, tiles_x: int = 8, tiles_y: int = 8, clip_limit: float = 0.01,
          nbins: int = 256) -> np.ndarray:
    """Contrast-limited adaptive histogram equalization on a [0, 1] image.

    The image is divided into a tiles_x by tiles_y grid. Each tile's
    histogram (nbins bins) is clipped and the excess redistributed
    uniformly across all bins, then turned into a CDF mapping. Each output
    pixel bilinearly interpolates the mappings of the four surrounding
    tile centers (clamped at the image border), which removes visible tile
    seams. Output values stay in [0, 1].

    clip_limit = 1 disables clipping entirely, so a single 1x1 tile grid
    reduces to plain global histogram equalization.
    """
    img = as_image(gray)
    tiles_x, tiles_y = int(tiles_x), int(tiles_y)
    if tiles_x < 1 or tiles_y < 1:
        raise ValueError("tile counts must be >= 1")
    if not 0.0 < clip_limit <= 1.0:
        raise ValueError("clip_limit must be in (0, 1]")
    if nbins < 2:
        raise ValueError("nbins must be >= 2")
    h, w = img.shape
    if tiles_y > h or tiles_x > w:
        raise ValueError("more tiles than pixels along an axis")

    ey = _tile_edges(h, tiles_y)
    ex = _tile_edges(w, tiles_x)
    maps = np.empty((tiles_y, tiles_x, nbins))
    for ty in range(tiles_y):
        for tx in range(tiles_x):
            tile = img[ey[ty]:ey[ty + 1], ex[tx]:ex[tx + 1]]
            maps[ty, tx] = _tile_mapping(tile.ravel(), clip_limit, nbins)

    bins = np.minimum((img * nbins).astype(int), nbins - 1)
    cy = (ey[:-1] + ey[1:] - 1) / 2.0
    cx = (ex[:-1] + ex[1:] - 1) / 2.0
    idx_y, wy = _interp_coords(np.arange(h), cy)
    idx_x, wx = _interp_coords(np.arange(w), cx)

    lo_y, hi_y = idx_y, np.minimum(idx_y + 1, tiles_y - 1)
    lo_x, hi_x = idx_x, np.minimum(idx_x + 1, tiles_x - 1)
    wy = wy[:, None]
    wx = wx[None, :]
    out = (1 - wy) * ((1 - wx) * maps[lo_y[:, None], lo_x[None, :], bins]
                      + wx * maps[lo_y[:, None], hi_x[None, :], bins]) \
        + wy * ((1 - wx) * maps[hi_y[:, None], lo_x[None, :], bins]
                + wx * maps[hi_y[:, None], hi_x[None, :], bins])
    return out


def _interp_coords(pos: np.ndarray, centers: np.ndarray):
    """Lower tile index and fractional weight toward the next center, clamped at the ends."""
    idx = np.searchsorted(centers, pos, side="right") - 1
    idx = np.clip(idx, 0, len(centers) - 1)
    if len(centers) == 1:
        return idx, np.zeros(len(pos))
    nxt = np.minimum(idx + 1, len(centers) - 1)
    span = centers[nxt] - centers[idx]
    with np.errstate(invalid="ignore", divide="ignore"):
        frac = np.where(span > 0, (pos - centers[idx]) / np.where(span > 0, span, 1.0), 0.0)
    return idx, np.clip(frac, 0.0, 1.0)


def preprocess_image(rgb_or_gray: np.ndarray, fov_mask, smoothing_iterations: int = 10,
                     tiles_x: int = 8, tiles_y: int = 8, clip_limit: float = 0.01) -> np.ndarray:
    """Full preprocessing chain: green channel, FOV border smoothing, CLAHE."""
    arr = np.asarray(rgb_or_gray)
    gray = extract_green(arr) if arr.ndim == 3 else as_image(arr)
    mask = as_mask(fov_mask, gray.shape)
    gray = smooth_fov_border(gray, mask, smoothing_iterations)
    return clahe(gray, tiles_x=tiles_x, tiles_y=tiles_y, clip_limit=clip_limit)
