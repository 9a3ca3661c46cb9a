"""Parameter selection: train/validation splitting, grid search, sensitivity study.

The grid search scores every (sigma, rho_max, sigma0, alpha) cell by the
mean MCC over the training images, sweeping all 256 integer thresholds of
the normalized response. The symmetric filter is tuned first; the
asymmetric search then scores the summed response with the symmetric
filter held fixed, since the sum is what the segmenter thresholds.
"""

from __future__ import annotations

import itertools
import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from bcosfire.filters import (
    ASYMMETRIC,
    SYMMETRIC,
    FilterConfig,
    _orientation_response,
    _padded_log_blur,
    analytic_asymmetric,
    analytic_symmetric,
    apply_filter,
    make_bank,
    rescale_response,
    weight_scheme,
)
from bcosfire.imops import as_image, as_mask, dog_response
from bcosfire.metrics import (
    RocCurve,
    THRESHOLDS,
    TTestResult,
    confusion,
    mcc,
    mcc_values,
    paired_t_test,
    threshold_counts,
)

__all__ = [
    "SearchSpace",
    "TuningResult",
    "SensitivityRow",
    "split_dataset",
    "grid_search",
    "sensitivity_experiment",
    "format_tuning_result",
    "format_sensitivity_table",
]


@dataclass(frozen=True)
class SearchSpace:
    """Grid axes for one filter kind; rho values are circle maxima at rho_step spacing."""

    sigma: tuple
    rho_max: tuple
    sigma0: tuple
    alpha: tuple
    rho_step: float = 2.0

    def __post_init__(self):
        for name in ("sigma", "rho_max", "sigma0", "alpha"):
            values = tuple(sorted(float(v) for v in getattr(self, name)))
            if not values:
                raise ValueError(f"search axis {name} is empty")
            if any(not math.isfinite(v) or v <= 0.0 for v in values):
                raise ValueError(f"search axis {name} must hold positive finite values")
            if len(set(values)) != len(values):
                raise ValueError(f"search axis {name} has duplicate values")
            object.__setattr__(self, name, values)
        step = float(self.rho_step)
        if not math.isfinite(step) or step <= 0.0:
            raise ValueError("rho_step must be positive and finite")
        if min(self.rho_max) < step:
            raise ValueError("every rho_max must be at least rho_step")
        object.__setattr__(self, "rho_step", step)

    def cells(self):
        """All parameter tuples (sigma, rho_max, sigma0, alpha) in lexicographic order."""
        return list(itertools.product(self.sigma, self.rho_max, self.sigma0, self.alpha))


@dataclass(frozen=True)
class TuningResult:
    kind: str
    params: tuple  # (sigma, rho_max, sigma0, alpha)
    threshold: int
    mean_mcc: float
    roc: RocCurve
    table: tuple  # per-cell rows (sigma, rho_max, sigma0, alpha, best threshold, best mean MCC)

    def config(self, rho_step: float = 2.0) -> FilterConfig:
        sigma, rho_max, sigma0, alpha = self.params
        build = analytic_symmetric if self.kind == SYMMETRIC else analytic_asymmetric
        return build(sigma, rho_max, sigma0, alpha, rho_step)


def split_dataset(items, seed: int):
    """Deterministic half/half split: shuffle by seed, first half trains."""
    items = list(items)
    n = len(items)
    if n < 2 or n % 2 != 0:
        raise ValueError(f"dataset size must be even and at least 2, got {n}")
    order = list(range(n))
    random.Random(seed).shuffle(order)
    half = n // 2
    return [items[i] for i in order[:half]], [items[i] for i in order[half:]]


def _validate_dataset(images, gts, masks):
    images = [as_image(im) for im in images]
    if not images or not (len(images) == len(gts) == len(masks)):
        raise ValueError("need equally many images, ground truths, and masks (at least one)")
    gts = [as_mask(g, im.shape) for g, im in zip(gts, images)]
    masks = [as_mask(m, im.shape) for m, im in zip(masks, images)]
    for g, m in zip(gts, masks):
        if not (g & m).any() or not (~g & m).any():
            raise ValueError("each image needs positive and negative ground-truth pixels in its mask")
    return images, gts, masks


def _cell_scores(image, gt, mask, sigma, sigma0, alpha, rho_maxes, space, kind,
                 fixed_response, c_map, pad):
    """Per-image scores of every rho_max cell sharing (sigma, sigma0, alpha).

    Returns one (tpr, fpr, mcc) triple of 256-vectors per rho_max, reusing
    the blur maps across cells: a smaller rho_max uses a prefix of the same
    circles, only the weights change with the outermost radius.
    """
    build = analytic_symmetric if kind == SYMMETRIC else analytic_asymmetric
    blur = {0.0: _padded_log_blur(c_map, sigma0, pad)}
    k = 1
    while k * space.rho_step <= max(rho_maxes) * (1.0 + 1e-12):
        rho = k * space.rho_step
        blur[rho] = _padded_log_blur(c_map, sigma0 + alpha * rho, pad)
        k += 1
    get_map = lambda p: blur[p.rho]

    pos = gt & mask
    neg = ~gt & mask
    n_pos = int(np.count_nonzero(pos))
    n_neg = int(np.count_nonzero(neg))
    out = []
    for rho_max in rho_maxes:
        bank = make_bank(build(sigma, rho_max, sigma0, alpha, space.rho_step))
        scheme = weight_scheme(bank.base)
        omega_sum = sum(scheme.omega)
        response = None
        for _, cfg in bank.orientations:
            r = _orientation_response(image.shape, cfg, scheme.omega, omega_sum, pad, get_map)
            response = r if response is None else np.maximum(response, r, out=response)
        if fixed_response is not None:
            response = fixed_response + response
        scaled = rescale_response(response, mask)
        tp = threshold_counts(scaled, pos)
        fp = threshold_counts(scaled, neg)
        out.append((tp / n_pos, fp / n_neg, mcc_values(tp, fp, n_pos - tp, n_neg - fp)))
    return out


def grid_search(images, gts, masks, space: SearchSpace, kind: str,
                fixed_other: FilterConfig | None = None, *, threads: int = 1) -> TuningResult:
    """Exhaustive search maximizing mean MCC over images and 256 thresholds.

    For the asymmetric kind, fixed_other must hold the already-tuned
    symmetric config; each cell is then scored on the summed response.
    Ties break toward the lower threshold, then the lexicographically
    smaller (sigma, rho_max, sigma0, alpha) tuple.
    """
    images, gts, masks = _validate_dataset(images, gts, masks)
    if kind not in (SYMMETRIC, ASYMMETRIC):
        raise ValueError(f"kind must be {SYMMETRIC!r} or {ASYMMETRIC!r}, got {kind!r}")
    if kind == ASYMMETRIC and fixed_other is None:
        raise ValueError("asymmetric search requires the fixed symmetric config")
    if kind == SYMMETRIC and fixed_other is not None:
        raise ValueError("fixed_other only applies to the asymmetric search")

    threads = max(1, int(threads))
    cells = space.cells()
    index = {params: i for i, params in enumerate(cells)}
    pad = int(math.ceil(max(space.rho_max)))
    groups = list(itertools.product(space.sigma, space.sigma0, space.alpha))

    fixed_bank = make_bank(fixed_other) if fixed_other is not None else None
    mcc_sum = np.zeros((len(cells), 256))
    tpr_sum = np.zeros((len(cells), 256))
    fpr_sum = np.zeros((len(cells), 256))
    for image, gt, mask in zip(images, gts, masks):
        fixed_response = (
            apply_filter(image, fixed_bank, threads=threads) if fixed_bank is not None else None
        )
        c_maps = {s: dog_response(image, s) for s in space.sigma}

        def run_group(group):
            sigma, sigma0, alpha = group
            return _cell_scores(image, gt, mask, sigma, sigma0, alpha, space.rho_max,
                                space, kind, fixed_response, c_maps[sigma], pad)

        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(run_group, groups))
        else:
            results = [run_group(g) for g in groups]
        for (sigma, sigma0, alpha), scores in zip(groups, results):
            for rho_max, (tpr, fpr, mccs) in zip(space.rho_max, scores):
                i = index[(sigma, rho_max, sigma0, alpha)]
                tpr_sum[i] += tpr
                fpr_sum[i] += fpr
                mcc_sum[i] += mccs

    n = len(images)
    mean_mcc = mcc_sum / n
    best = None
    table = []
    for i, params in enumerate(cells):
        t = int(np.argmax(mean_mcc[i]))  # argmax takes the first, hence lowest, threshold
        score = float(mean_mcc[i, t])
        table.append(params + (t, score))
        candidate = (score, t, params, i)
        if best is None or _beats(candidate, best):
            best = candidate
    score, t, params, i = best
    curve = RocCurve(THRESHOLDS, tuple(fpr_sum[i] / n), tuple(tpr_sum[i] / n))
    return TuningResult(kind, params, t, score, curve, tuple(table))


def _beats(candidate, best) -> bool:
    score, t, params, _ = candidate
    b_score, b_t, b_params, _ = best
    if score != b_score:
        return score > b_score
    if t != b_t:
        return t < b_t
    return params < b_params


@dataclass(frozen=True)
class SensitivityRow:
    offset: float
    status: str  # "ok" | "skipped" | "invalid"
    result: TTestResult | None


def _per_image_mccs(images, gts, masks, config, threshold, threads):
    bank = make_bank(config)
    values = []
    for image, gt, mask in zip(images, gts, masks):
        scaled = rescale_response(apply_filter(image, bank, threads=threads), mask)
        pred = (scaled > threshold) & mask
        values.append(mcc(confusion(pred, gt, mask)))
    return values


def sensitivity_experiment(images, gts, masks, params, threshold, offsets, param: str,
                           *, rho_step: float = 2.0, threads: int = 1):
    """Perturb one symmetric-filter parameter and t-test the per-image MCC drop.

    For every offset the symmetric filter is rebuilt with the parameter
    moved by that amount, all images are segmented at the given threshold,
    and the per-image MCCs are compared to the optimum's with a paired
    t-test on (perturbed - optimal); negative t therefore means the
    perturbation hurt. A zero offset is skipped and a perturbation that
    drives the parameter to zero or below is marked invalid.
    """
    images, gts, masks = _validate_dataset(images, gts, masks)
    names = ("sigma", "rho_max", "sigma0", "alpha")
    if param not in ("sigma", "sigma0", "alpha"):
        raise ValueError(f"param must be one of sigma, sigma0, alpha, got {param!r}")
    base = dict(zip(names, (float(v) for v in params)))
    threshold = float(threshold)

    optimal = analytic_symmetric(base["sigma"], base["rho_max"], base["sigma0"],
                                 base["alpha"], rho_step)
    optimal_mccs = _per_image_mccs(images, gts, masks, optimal, threshold, threads)
    rows = []
    for offset in offsets:
        offset = float(offset)
        if offset == 0.0:
            rows.append(SensitivityRow(offset, "skipped", None))
            continue
        perturbed = dict(base)
        perturbed[param] += offset
        if perturbed[param] <= 0.0:
            rows.append(SensitivityRow(offset, "invalid", None))
            continue
        config = analytic_symmetric(perturbed["sigma"], perturbed["rho_max"],
                                    perturbed["sigma0"], perturbed["alpha"], rho_step)
        values = _per_image_mccs(images, gts, masks, config, threshold, threads)
        rows.append(SensitivityRow(offset, "ok", paired_t_test(values, optimal_mccs)))
    return rows


def format_tuning_result(result: TuningResult) -> str:
    """Winning parameters plus the full per-cell audit table, as plain text."""
    sigma, rho_max, sigma0, alpha = result.params
    lines = [
        f"kind {result.kind}",
        f"sigma {sigma:.6f}",
        f"rho_max {rho_max:.6f}",
        f"sigma0 {sigma0:.6f}",
        f"alpha {alpha:.6f}",
        f"threshold {result.threshold}",
        f"mean_mcc {result.mean_mcc:.6f}",
        "",
        "sigma,rho_max,sigma0,alpha,threshold,mean_mcc",
    ]
    for s, r, s0, a, t, score in result.table:
        lines.append(f"{s:.6f},{r:.6f},{s0:.6f},{a:.6f},{t},{score:.6f}")
    return "\n".join(lines) + "\n"


def format_sensitivity_table(rows) -> str:
    """One CSV row per offset: offset, row status, t value, significance flag."""
    lines = ["offset,status,t,significant"]
    for row in rows:
        if row.status != "ok":
            lines.append(f"{row.offset:+.1f},{row.status},-,-")
        else:
            flag = "true" if row.result.significant else "false"
            lines.append(f"{row.offset:+.1f},ok,{row.result.t:.4f},{flag}")
    return "\n".join(lines) + "\n"
