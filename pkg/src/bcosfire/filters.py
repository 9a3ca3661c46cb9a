"""Bar-selective filters built from shifted, blurred DoG responses.

A filter is a set of points (sigma, rho, phi) placed on concentric circles
around a center. Its response at a pixel is the weighted geometric mean of
the rectified DoG responses read at the point positions, each first blurred
with a Gaussian-weighted maximum whose width grows with the circle radius.
Rotating the point set yields an orientation bank; the pixelwise maximum
across orientations gives a rotation-invariant response.

Angle convention: x = columns increasing rightward, y pointing up the
image, so a point at polar (rho, phi) relative to a center (cx, cy) sits at
column cx + rho*cos(phi), row cy - rho*sin(phi); phi = pi/2 is straight up.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from bcosfire.imops import as_image, as_mask, dog_response, weighted_max_blur

__all__ = [
    "ConfigurationError",
    "FilterPoint",
    "FilterConfig",
    "WeightScheme",
    "OrientationBank",
    "weight_scheme",
    "configure_from_prototype",
    "analytic_symmetric",
    "analytic_asymmetric",
    "rotate_config",
    "make_bank",
    "blur_shift_response",
    "combine_responses",
    "apply_filter",
    "combined_response",
    "rescale_response",
    "segment",
    "save_config",
    "load_config",
]

TWO_PI = 2.0 * math.pi

# kinds and their orientation counts at pi/12 spacing
SYMMETRIC = "symmetric"
ASYMMETRIC = "asymmetric"
_ORIENTATIONS = {SYMMETRIC: 12, ASYMMETRIC: 24}

# angular tolerance when deciding whether a point set is closed under a
# half-turn (phi -> phi + pi); generous enough for angles detected on a
# sampled circle, far below the pi/12 bank spacing
_CLOSURE_TOL = math.radians(1.0)

_RESPONSE_FLOOR = 1e-12


class ConfigurationError(ValueError):
    """Raised when a prototype pattern yields no usable filter points."""


def _norm_angle(phi: float) -> float:
    r = math.fmod(float(phi), TWO_PI)
    if r < 0.0:
        r += TWO_PI
    if r >= TWO_PI:
        r = 0.0
    return r


def _circular_diff(a: float, b: float) -> float:
    d = abs(_norm_angle(a) - _norm_angle(b))
    return min(d, TWO_PI - d)


@dataclass(frozen=True)
class FilterPoint:
    """One point of interest: DoG scale sigma, circle radius rho, polar angle phi."""

    sigma: float
    rho: float
    phi: float

    def __post_init__(self):
        sigma, rho, phi = float(self.sigma), float(self.rho), float(self.phi)
        if not math.isfinite(sigma) or sigma <= 0.0:
            raise ValueError(f"sigma must be positive and finite, got {sigma!r}")
        if not math.isfinite(rho) or rho < 0.0:
            raise ValueError(f"rho must be non-negative and finite, got {rho!r}")
        if not math.isfinite(phi):
            raise ValueError("phi must be finite")
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "phi", _norm_angle(phi))


def _is_half_turn_closed(points, tol: float = _CLOSURE_TOL) -> bool:
    offcenter = [p for p in points if p.rho > 0.0]
    for p in offcenter:
        if not any(
            abs(q.rho - p.rho) <= 1e-9 and _circular_diff(p.phi + math.pi, q.phi) <= tol
            for q in offcenter
        ):
            return False
    return True


@dataclass(frozen=True)
class FilterConfig:
    """An ordered point set with its blur parameters and symmetry kind.

    sigma0 is the blur width at the center and alpha its growth rate per
    pixel of radius: a point at radius rho is blurred with
    sigma0 + alpha * rho. kind chooses the orientation count of the bank
    (12 for symmetric full-bar filters, 24 for asymmetric bar-ending ones).
    """

    points: tuple
    sigma0: float
    alpha: float
    kind: str

    def __post_init__(self):
        points = tuple(self.points)
        if not points or not all(isinstance(p, FilterPoint) for p in points):
            raise ValueError("points must be a non-empty sequence of FilterPoint")
        centers = sum(1 for p in points if p.rho == 0.0)
        if centers != 1:
            raise ValueError(f"expected exactly one center point (rho=0), got {centers}")
        sigma0, alpha = float(self.sigma0), float(self.alpha)
        if not math.isfinite(sigma0) or sigma0 <= 0.0:
            raise ValueError(f"sigma0 must be positive and finite, got {sigma0!r}")
        if not math.isfinite(alpha) or alpha <= 0.0:
            raise ValueError(f"alpha must be positive and finite, got {alpha!r}")
        if self.kind not in _ORIENTATIONS:
            raise ValueError(f"kind must be one of {sorted(_ORIENTATIONS)}, got {self.kind!r}")
        if self.kind == SYMMETRIC and not _is_half_turn_closed(points):
            raise ValueError("symmetric kind requires the point set to be closed under phi -> phi + pi")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "sigma0", sigma0)
        object.__setattr__(self, "alpha", alpha)

    @property
    def rho_max(self) -> float:
        return max(p.rho for p in self.points)


@dataclass(frozen=True)
class WeightScheme:
    """Per-point weights omega_i = exp(-rho_i^2 / (2*sigma_hat^2)), sigma_hat = max rho / 3.

    A center-only set has sigma_hat = 0 by convention and every weight 1.
    """

    sigma_hat: float
    omega: tuple


def weight_scheme(config: FilterConfig) -> WeightScheme:
    rho_max = config.rho_max
    if rho_max == 0.0:
        return WeightScheme(0.0, tuple(1.0 for _ in config.points))
    sigma_hat = rho_max / 3.0
    denom = 2.0 * sigma_hat * sigma_hat
    omega = tuple(math.exp(-(p.rho * p.rho) / denom) for p in config.points)
    return WeightScheme(sigma_hat, omega)


@dataclass(frozen=True)
class OrientationBank:
    """A base config plus its rotated copies, one per orientation angle."""

    base: FilterConfig
    orientations: tuple  # of (psi, FilterConfig) pairs


def rotate_config(config: FilterConfig, psi: float) -> FilterConfig:
    """Rotate every point angle by psi (mod 2*pi); other fields unchanged."""
    points = tuple(replace(p, phi=_norm_angle(p.phi + psi)) for p in config.points)
    return replace(config, points=points)


def make_bank(config: FilterConfig) -> OrientationBank:
    """Orientation bank at pi/12 spacing: 12 rotations for symmetric filters, 24 for asymmetric."""
    n = _ORIENTATIONS[config.kind]
    step = math.pi / 12.0
    orientations = tuple((k * step, rotate_config(config, k * step)) for k in range(n))
    return OrientationBank(config, orientations)


def analytic_symmetric(sigma: float, rho_max: float, sigma0: float, alpha: float,
                       rho_step: float = 2.0) -> FilterConfig:
    """Ideal vertical full-bar filter: center plus point pairs at phi = pi/2 and 3*pi/2.

    Circles sit at rho = rho_step, 2*rho_step, ... up to rho_max. This is
    the closed form of what configure_from_prototype detects on an ideal
    vertical bar, so the two constructors can be cross-checked.
    """
    rhos = _circle_radii(rho_max, rho_step)
    points = [FilterPoint(sigma, 0.0, 0.0)]
    for rho in rhos:
        points.append(FilterPoint(sigma, rho, math.pi / 2.0))
        points.append(FilterPoint(sigma, rho, 3.0 * math.pi / 2.0))
    return FilterConfig(tuple(points), sigma0, alpha, SYMMETRIC)


def analytic_asymmetric(sigma: float, rho_max: float, sigma0: float, alpha: float,
                        rho_step: float = 2.0) -> FilterConfig:
    """Ideal upward half-bar (bar-ending) filter: center plus points at phi = pi/2 only."""
    rhos = _circle_radii(rho_max, rho_step)
    points = [FilterPoint(sigma, 0.0, 0.0)]
    for rho in rhos:
        points.append(FilterPoint(sigma, rho, math.pi / 2.0))
    return FilterConfig(tuple(points), sigma0, alpha, ASYMMETRIC)


def _circle_radii(rho_max: float, rho_step: float):
    rho_max, rho_step = float(rho_max), float(rho_step)
    if not (rho_max >= rho_step > 0.0):
        raise ValueError(f"need rho_max >= rho_step > 0, got rho_max={rho_max}, rho_step={rho_step}")
    rhos = []
    k = 1
    while k * rho_step <= rho_max * (1.0 + 1e-12):
        rhos.append(k * rho_step)
        k += 1
    return rhos


def _bilinear_sample(img: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    h, w = img.shape
    x = np.clip(x, 0.0, w - 1.0)
    y = np.clip(y, 0.0, h - 1.0)
    x0 = np.floor(x).astype(int)
    y0 = np.floor(y).astype(int)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = x - x0
    fy = y - y0
    return (img[y0, x0] * (1.0 - fx) * (1.0 - fy)
            + img[y0, x1] * fx * (1.0 - fy)
            + img[y1, x0] * (1.0 - fx) * fy
            + img[y1, x1] * fx * fy)


def _circular_local_maxima(values: np.ndarray):
    """Indices of strict circular local maxima; a plateau counts once, at its middle."""
    v = np.asarray(values, dtype=np.float64)
    n = v.size
    run_start = np.flatnonzero(v != np.roll(v, 1))
    if run_start.size == 0:
        return []
    k = run_start.size
    run_vals = v[run_start]
    maxima = []
    for j in range(k):
        if run_vals[j] > run_vals[j - 1] and run_vals[j] > run_vals[(j + 1) % k]:
            start = run_start[j]
            length = (run_start[(j + 1) % k] - start) % n
            if length == 0:
                length = n
            maxima.append(int((start + (length - 1) // 2) % n))
    return sorted(maxima)


def _suppress_close_angles(candidates, steps: int, window_deg: float):
    """Greedy strongest-first selection dropping candidates within the merge window."""
    step_deg = 360.0 / steps
    order = sorted(candidates, key=lambda c: (-c[1], c[0]))
    kept = []
    for idx, val in order:
        deg = idx * step_deg
        close = any(
            min(abs(deg - k_idx * step_deg), 360.0 - abs(deg - k_idx * step_deg)) < window_deg
            for k_idx, _ in kept
        )
        if not close:
            kept.append((idx, val))
    return sorted(idx for idx, _ in kept)


def configure_from_prototype(prototype: np.ndarray, center, radii, sigma: float,
                             peak_fraction: float = 0.2, *, sigma0: float = 1.0,
                             alpha: float = 0.1, angular_steps: int = 360,
                             merge_window_deg: float = 10.0) -> FilterConfig:
    """Configure a filter from a prototype pattern (a dark bar on a bright field).

    Computes the rectified DoG response of the prototype, samples it along
    each circle of radius rho > 0 centered at `center` (given as (cx, cy)
    in x/y order) with `angular_steps` bilinear samples, and keeps the
    angular local maxima that reach peak_fraction of that circle's best
    sample. Maxima closer together than merge_window_deg are merged into
    the strongest one. The center point (sigma, 0, 0) is always included.

    The kind is inferred from the detected geometry: symmetric when every
    off-center point has a partner across the center, else asymmetric.

    Raises ConfigurationError when no circle yields a usable maximum (for
    example on a blank prototype).
    """
    img = as_image(prototype)
    sigma = float(sigma)
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    if not 0.0 < float(peak_fraction) < 1.0:
        raise ValueError("peak_fraction must be in (0, 1)")
    if int(angular_steps) < 4:
        raise ValueError("angular_steps must be at least 4")
    angular_steps = int(angular_steps)
    cx, cy = (float(c) for c in center)
    rhos = sorted(float(r) for r in radii)
    if not rhos or rhos[0] != 0.0:
        raise ValueError("radii must include 0 (the filter center)")
    if any(r < 0.0 for r in rhos):
        raise ValueError("radii must be non-negative")

    c_map = dog_response(img, sigma)
    angles = TWO_PI * np.arange(angular_steps) / angular_steps
    points = [FilterPoint(sigma, 0.0, 0.0)]
    for rho in rhos:
        if rho == 0.0:
            continue
        samples = _bilinear_sample(c_map, cx + rho * np.cos(angles), cy - rho * np.sin(angles))
        circle_max = samples.max()
        if circle_max <= _RESPONSE_FLOOR:
            continue
        floor = peak_fraction * circle_max
        candidates = [(i, samples[i]) for i in _circular_local_maxima(samples) if samples[i] >= floor]
        for idx in _suppress_close_angles(candidates, angular_steps, merge_window_deg):
            points.append(FilterPoint(sigma, rho, TWO_PI * idx / angular_steps))
    if len(points) == 1 and len(rhos) > 1:
        raise ConfigurationError("prototype has no intensity variation along any sampling circle")
    kind = SYMMETRIC if _is_half_turn_closed(points) else ASYMMETRIC
    return FilterConfig(tuple(points), sigma0, alpha, kind)


def _point_shift(point: FilterPoint):
    """Integer (column, row) shift that drags the point's evidence onto the center.

    Column shift round(-rho*cos(phi)); row shift round(+rho*sin(phi)) because
    rows grow downward while phi measures angles with y pointing up.
    """
    dx = int(np.rint(-point.rho * math.cos(point.phi)))
    dy = int(np.rint(point.rho * math.sin(point.phi)))
    return dx, dy


def _shift_replicate(img: np.ndarray, dx: int, dy: int) -> np.ndarray:
    """out(x, y) = img(x - dx, y - dy), reads past the border clamped to the edge."""
    h, w = img.shape
    rows = np.clip(np.arange(h) - dy, 0, h - 1)
    cols = np.clip(np.arange(w) - dx, 0, w - 1)
    return img[rows[:, None], cols[None, :]]


def blur_shift_response(c_sigma: np.ndarray, point: FilterPoint, sigma0: float,
                        alpha: float) -> np.ndarray:
    """Blur a rectified DoG response with sigma0 + alpha*rho, then shift it to the center.

    The shift moves the evidence found at the point's position onto the
    filter center: out[r, c] = blurred[r - rho*sin(phi), c + rho*cos(phi)],
    with the offsets rounded to whole pixels.
    """
    blurred = weighted_max_blur(c_sigma, float(sigma0) + float(alpha) * point.rho)
    dx, dy = _point_shift(point)
    return _shift_replicate(blurred, dx, dy)


def combine_responses(blurred, scheme: WeightScheme) -> np.ndarray:
    """Weighted geometric mean of non-negative response maps.

    out = (prod_i s_i^omega_i)^(1 / sum omega), evaluated as
    exp(sum_i omega_i*log(s_i) / sum omega) so long products cannot
    underflow; a zero in any input forces the output pixel to zero.
    """
    images = [as_image(s) for s in blurred]
    if not images:
        raise ValueError("need at least one response map")
    if len(images) != len(scheme.omega):
        raise ValueError(f"{len(images)} maps but {len(scheme.omega)} weights")
    shape = images[0].shape
    if any(s.shape != shape for s in images):
        raise ValueError("response maps must share dimensions")
    if any(s.min() < 0.0 for s in images):
        raise ValueError("response maps must be non-negative")
    acc = np.zeros(shape)
    tmp = np.empty(shape)
    for s, wgt in zip(images, scheme.omega):
        with np.errstate(divide="ignore"):
            logs = np.log(s)
        np.multiply(logs, wgt, out=tmp)
        acc += tmp
    np.divide(acc, sum(scheme.omega), out=acc)
    np.exp(acc, out=acc)
    return acc


def _padded_log_blur(c_map: np.ndarray, sigma_prime: float, pad: int) -> np.ndarray:
    """log(weighted_max_blur(c_map, sigma_prime)) with replicated edge padding.

    Zeros become -inf, which the log-domain accumulation propagates so the
    combined response is exactly zero there.
    """
    b = weighted_max_blur(c_map, sigma_prime)
    b = np.pad(b, int(pad), mode="edge")
    with np.errstate(divide="ignore"):
        return np.log(b, out=b)


def _orientation_response(shape, config: FilterConfig, omega, omega_sum: float,
                          pad: int, get_map) -> np.ndarray:
    """Log-domain accumulation of one rotated config over its point set."""
    h, w = shape
    acc = np.zeros(shape)
    tmp = np.empty(shape)
    for p, wgt in zip(config.points, omega):
        m = get_map(p)
        dx, dy = _point_shift(p)
        view = m[pad - dy: pad - dy + h, pad - dx: pad - dx + w]
        np.multiply(view, wgt, out=tmp)
        acc += tmp
    np.divide(acc, omega_sum, out=acc)
    np.exp(acc, out=acc)
    return acc


def apply_filter(image: np.ndarray, bank: OrientationBank, *, threads: int = 1,
                 cache: bool = True) -> np.ndarray:
    """Rotation-invariant response: pixelwise maximum over all bank orientations.

    The DoG response is computed once per distinct sigma and each distinct
    (sigma, rho) blur once, shared across points and orientations (the blur
    width depends only on rho, the shift alone differs per orientation).
    Setting cache=False recomputes blurs per point; the result is
    bit-identical either way. threads > 1 evaluates orientations in a
    thread pool; the reduction order is fixed, so results do not depend on
    scheduling.
    """
    img = as_image(image)
    if not isinstance(bank, OrientationBank):
        raise TypeError("bank must be an OrientationBank")
    base = bank.base
    scheme = weight_scheme(base)
    omega_sum = sum(scheme.omega)
    pad = int(math.ceil(base.rho_max))
    c_maps = {s: dog_response(img, s) for s in sorted({p.sigma for p in base.points})}

    def fresh(point: FilterPoint) -> np.ndarray:
        return _padded_log_blur(c_maps[point.sigma], base.sigma0 + base.alpha * point.rho, pad)

    if cache:
        table = {}
        for p in base.points:
            key = (p.sigma, p.rho)
            if key not in table:
                table[key] = fresh(p)
        get_map = lambda p: table[(p.sigma, p.rho)]
    else:
        get_map = fresh

    configs = [cfg for _, cfg in bank.orientations]
    worker = lambda cfg: _orientation_response(img.shape, cfg, scheme.omega, omega_sum, pad, get_map)
    threads = max(1, int(threads))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            responses = list(pool.map(worker, configs))
    else:
        responses = [worker(cfg) for cfg in configs]
    out = responses[0]
    for r in responses[1:]:
        np.maximum(out, r, out=out)
    return out


def rescale_response(response: np.ndarray, mask=None) -> np.ndarray:
    """Rescale a response map to the 0-255 level scale.

    The scale factor is 255 over the maximum response inside the mask
    (whole image when mask is None); values outside the mask may exceed
    255. A response with no positive value inside the mask rescales to all
    zeros rather than dividing by zero.
    """
    r = as_image(response)
    if mask is None:
        peak = r.max() if r.size else 0.0
    else:
        m = as_mask(mask, r.shape)
        peak = r[m].max() if m.any() else 0.0
    if peak <= 0.0:
        return np.zeros_like(r)
    return r * (255.0 / peak)


def combined_response(image: np.ndarray, sym_bank: OrientationBank,
                      asym_bank: OrientationBank, mask=None, *, threads: int = 1,
                      cache: bool = True) -> np.ndarray:
    """Sum of the symmetric and asymmetric rotation-invariant responses, on the 0-255 scale."""
    r = apply_filter(image, sym_bank, threads=threads, cache=cache)
    r += apply_filter(image, asym_bank, threads=threads, cache=cache)
    return rescale_response(r, mask)


def segment(image: np.ndarray, sym_bank: OrientationBank, asym_bank: OrientationBank,
            mask, threshold: float, *, threads: int = 1, cache: bool = True) -> np.ndarray:
    """Binary segmentation: combined response strictly above threshold, inside the mask."""
    threshold = float(threshold)
    if not 0.0 <= threshold <= 255.0:
        raise ValueError(f"threshold must be in [0, 255], got {threshold}")
    scaled = combined_response(image, sym_bank, asym_bank, mask, threads=threads, cache=cache)
    m = as_mask(mask, scaled.shape)
    return (scaled > threshold) & m


def save_config(config: FilterConfig, path) -> None:
    """Write a filter config as plain text (kind, sigma0, alpha, one point per line)."""
    lines = [
        f"kind {config.kind}",
        f"sigma0 {config.sigma0:.6f}",
        f"alpha {config.alpha:.6f}",
    ]
    for p in config.points:
        lines.append(f"point {p.sigma:.6f} {p.rho:.6f} {p.phi:.6f}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def load_config(path) -> FilterConfig:
    """Parse a filter config written by save_config."""
    fields = {}
    points = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="ascii").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, rest = line.partition(" ")
        try:
            if key == "point":
                sigma, rho, phi = (float(tok) for tok in rest.split())
                points.append(FilterPoint(sigma, rho, phi))
            elif key in ("sigma0", "alpha"):
                fields[key] = float(rest)
            elif key == "kind":
                fields[key] = rest.strip()
            else:
                raise ValueError(f"unknown field {key!r}")
        except ValueError as exc:
            raise ValueError(f"{path}: line {lineno}: {exc}") from None
    missing = {"kind", "sigma0", "alpha"} - set(fields)
    if missing or not points:
        raise ValueError(f"{path}: incomplete filter config (missing {sorted(missing) or 'points'})")
    return FilterConfig(tuple(points), fields["sigma0"], fields["alpha"], fields["kind"])
