"""Low-level numeric kernels for 2-D grayscale images.

Images are plain 2-D float64 numpy arrays indexed [row, col]; intensities
live in [0, 1] by convention (8-bit inputs are divided by 255 at load time).
Kernels are square (2*radius+1)^2 float64 arrays.

All boundary handling uses edge replication, which avoids the spurious
responses along image borders that zero padding would create.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import ndimage

__all__ = [
    "as_image",
    "as_mask",
    "dog_kernel",
    "gaussian_kernel",
    "kernel_radius",
    "convolve",
    "rectify",
    "weighted_max_blur",
    "dog_response",
]


def _check_sigma(sigma: float, name: str = "sigma") -> float:
    sigma = float(sigma)
    if not math.isfinite(sigma) or sigma <= 0.0:
        raise ValueError(f"{name} must be positive and finite, got {sigma!r}")
    return sigma


def as_image(image) -> np.ndarray:
    """Validate and convert to a 2-D float64 image array."""
    arr = np.asarray(image, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError(f"expected a non-empty 2-D image, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("image contains non-finite values")
    return arr


def as_mask(mask, shape=None) -> np.ndarray:
    """Validate and convert to a 2-D boolean mask, optionally checking shape."""
    arr = np.asarray(mask)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError(f"expected a non-empty 2-D mask, got shape {arr.shape}")
    if arr.dtype != bool:
        vals = np.unique(arr)
        if not np.all(np.isin(vals, (0, 1))):
            raise ValueError("mask values must be 0/1")
        arr = arr.astype(bool)
    if shape is not None and arr.shape != tuple(shape):
        raise ValueError(f"mask shape {arr.shape} does not match image shape {tuple(shape)}")
    return arr


def kernel_radius(kernel: np.ndarray) -> int:
    """Radius of a square odd-sized kernel."""
    side = kernel.shape[0]
    if kernel.ndim != 2 or kernel.shape[1] != side or side % 2 == 0:
        raise ValueError(f"expected a square odd-sized kernel, got shape {kernel.shape}")
    return side // 2


def _gauss_1d(sigma: float, radius: int) -> np.ndarray:
    # Samples of the unit-mass 1-D Gaussian; the outer product of two of
    # these equals the analytic 2-D Gaussian 1/(2*pi*sigma^2)*exp(-r^2/2sigma^2).
    t = np.arange(-radius, radius + 1, dtype=np.float64)
    return np.exp(-(t * t) / (2.0 * sigma * sigma)) / (sigma * math.sqrt(2.0 * math.pi))


def dog_kernel(sigma: float, radius: int | None = None) -> np.ndarray:
    """Difference-of-Gaussians kernel: wide Gaussian (sigma) minus narrow (0.5*sigma).

    Weights are the analytic values of the two unit-mass 2-D Gaussians,
    sampled on the integer grid; no renormalization is applied. The default
    support radius is ceil(3*sigma). On that support the weights sum to a
    small negative residual (truncation of the outer Gaussian); the sum
    approaches zero only for larger sigma on enlarged support.

    Parameters
    ----------
    sigma : float
        Standard deviation of the outer (wide) Gaussian, in pixels. The
        inner Gaussian uses 0.5*sigma.
    radius : int, optional
        Support radius override; defaults to ceil(3*sigma).
    """
    sigma = _check_sigma(sigma)
    if radius is None:
        radius = math.ceil(3.0 * sigma)
    outer = _gauss_1d(sigma, radius)
    inner = _gauss_1d(0.5 * sigma, radius)
    return np.outer(outer, outer) - np.outer(inner, inner)


def gaussian_kernel(sigma_prime: float, radius: int | None = None) -> np.ndarray:
    """Peak-normalized 2-D Gaussian weighting kernel (center weight exactly 1).

    Peak normalization (rather than unit mass) keeps the weighted-max blur
    magnitude-preserving: blurring a constant image returns the constant.
    Default support radius is ceil(3*sigma_prime).
    """
    sigma_prime = _check_sigma(sigma_prime, "sigma_prime")
    if radius is None:
        radius = math.ceil(3.0 * sigma_prime)
    t = np.arange(-radius, radius + 1, dtype=np.float64)
    g = np.exp(-(t * t) / (2.0 * sigma_prime * sigma_prime))
    return np.outer(g, g)


def convolve(image: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """2-D convolution with edge replication.

    out(x, y) = sum_{u,v} image(x-u, y-v) * kernel(u, v), with out-of-bounds
    reads clamped to the nearest edge pixel. Output has the input's shape.
    """
    img = as_image(image)
    kernel_radius(kernel)  # shape validation
    return ndimage.convolve(img, np.asarray(kernel, dtype=np.float64), mode="nearest")


def rectify(image: np.ndarray) -> np.ndarray:
    """Half-wave rectification: negative values clamped to zero."""
    return np.maximum(np.asarray(image, dtype=np.float64), 0.0)


def _weighted_max_1d(img: np.ndarray, weights: np.ndarray, axis: int) -> np.ndarray:
    radius = len(weights) // 2
    pad = [(radius, radius) if ax == axis else (0, 0) for ax in range(2)]
    padded = np.pad(img, pad, mode="edge")
    out = np.full(img.shape, -np.inf)
    tmp = np.empty(img.shape)
    n = img.shape[axis]
    for i in range(len(weights)):
        # slice start i reads img(pos - d) with d = radius - i
        sl = (slice(i, i + n), slice(None)) if axis == 0 else (slice(None), slice(i, i + n))
        np.multiply(padded[sl], weights[len(weights) - 1 - i], out=tmp)
        np.maximum(out, tmp, out=out)
    return out


def weighted_max_blur(image: np.ndarray, sigma_prime: float) -> np.ndarray:
    """Gaussian-weighted maximum over a square window of radius ceil(3*sigma_prime).

    out(x, y) = max over window offsets (dx, dy) of
    image(x-dx, y-dy) * exp(-(dx^2+dy^2) / (2*sigma_prime^2)), with edge
    replication at the borders. The weighting Gaussian is peak-normalized,
    so for non-negative input out >= image everywhere (the zero-offset term
    contributes image itself).

    The input must be non-negative; the separable evaluation relies on it,
    and the operation is only meaningful on rectified responses.
    """
    img = as_image(image)
    sigma_prime = _check_sigma(sigma_prime, "sigma_prime")
    if img.min() < 0.0:
        raise ValueError("weighted_max_blur requires a non-negative image")
    radius = math.ceil(3.0 * sigma_prime)
    t = np.arange(-radius, radius + 1, dtype=np.float64)
    w = np.exp(-(t * t) / (2.0 * sigma_prime * sigma_prime))
    # max_{dx,dy} f*g(dx)*g(dy) factorizes into two 1-D passes since f >= 0
    out = _weighted_max_1d(img, w, axis=1)
    return _weighted_max_1d(out, w, axis=0)


def dog_response(image: np.ndarray, sigma: float) -> np.ndarray:
    """Rectified DoG response: half-wave-rectified convolution with dog_kernel(sigma).

    Evaluated as the difference of two separable Gaussian convolutions,
    which matches convolve(image, dog_kernel(sigma)) to within roundoff.
    """
    img = as_image(image)
    sigma = _check_sigma(sigma)
    radius = math.ceil(3.0 * sigma)
    wide = _gauss_1d(sigma, radius)
    narrow = _gauss_1d(0.5 * sigma, radius)
    out = ndimage.correlate1d(img, wide, axis=0, mode="nearest")
    out = ndimage.correlate1d(out, wide, axis=1, mode="nearest")
    inner = ndimage.correlate1d(img, narrow, axis=0, mode="nearest")
    inner = ndimage.correlate1d(inner, narrow, axis=1, mode="nearest")
    out -= inner
    return rectify(out)
