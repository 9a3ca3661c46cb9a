"""Segmentation quality measures: confusion counts, MCC, ROC/AUC, paired t-test.

All pixel counting is restricted to a field-of-view mask. Responses are
expected on the 0-255 level scale; ROC sweeps use the 256 integer
thresholds with the same strict `response > t` rule the segmenter applies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from bcosfire.imops import as_image, as_mask

__all__ = [
    "UndefinedMetricError",
    "ConfusionMatrix",
    "RocCurve",
    "TTestResult",
    "confusion",
    "mcc",
    "mcc_values",
    "basic_metrics",
    "threshold_counts",
    "roc",
    "auc",
    "paired_t_test",
    "format_roc_csv",
]

THRESHOLDS = tuple(range(256))


class UndefinedMetricError(ValueError):
    """A metric's denominator is zero for the given counts."""


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self):
        for name in ("tp", "fp", "fn", "tn"):
            v = getattr(self, name)
            if int(v) != v or v < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {v!r}")
            object.__setattr__(self, name, int(v))

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


def confusion(pred, gt, mask) -> ConfusionMatrix:
    """Pixel counts over mask=1 pixels only; pred/gt must be binary."""
    p = as_mask(pred)
    g = as_mask(gt, p.shape)
    m = as_mask(mask, p.shape)
    tp = int(np.count_nonzero(p & g & m))
    fp = int(np.count_nonzero(p & ~g & m))
    fn = int(np.count_nonzero(~p & g & m))
    tn = int(np.count_nonzero(~p & ~g & m))
    return ConfusionMatrix(tp, fp, fn, tn)


def mcc(cm: ConfusionMatrix) -> float:
    """Matthews correlation coefficient; 0 when any marginal count is zero."""
    tp, fp, fn, tn = float(cm.tp), float(cm.fp), float(cm.fn), float(cm.tn)
    f1, f2, f3, f4 = tp + fp, tp + fn, tn + fp, tn + fn
    if f1 == 0.0 or f2 == 0.0 or f3 == 0.0 or f4 == 0.0:
        return 0.0
    return (tp * tn - fp * fn) / math.sqrt((f1 * f2) * (f3 * f4))


def mcc_values(tp, fp, fn, tn) -> np.ndarray:
    """Vectorized MCC over parallel count arrays; same arithmetic as mcc()."""
    tp, fp = np.asarray(tp, np.float64), np.asarray(fp, np.float64)
    fn, tn = np.asarray(fn, np.float64), np.asarray(tn, np.float64)
    f1, f2, f3, f4 = tp + fp, tp + fn, tn + fp, tn + fn
    den = np.sqrt((f1 * f2) * (f3 * f4))
    num = tp * tn - fp * fn
    out = np.zeros(np.broadcast(num, den).shape)
    np.divide(num, den, out=out, where=den > 0.0)
    return out


def basic_metrics(cm: ConfusionMatrix) -> dict:
    """Accuracy, sensitivity, and specificity as a dict keyed by metric name."""
    if cm.total == 0:
        raise UndefinedMetricError("accuracy undefined: no pixels inside the mask")
    if cm.tp + cm.fn == 0:
        raise UndefinedMetricError("sensitivity undefined: no positive ground-truth pixels")
    if cm.tn + cm.fp == 0:
        raise UndefinedMetricError("specificity undefined: no negative ground-truth pixels")
    return {
        "accuracy": (cm.tp + cm.tn) / cm.total,
        "sensitivity": cm.tp / (cm.tp + cm.fn),
        "specificity": cm.tn / (cm.tn + cm.fp),
    }


def threshold_counts(response: np.ndarray, select: np.ndarray) -> np.ndarray:
    """counts[t] = number of selected pixels with response > t, for t = 0..255.

    Exactly equivalent to thresholding at every integer level: for v > 0,
    v > t holds iff ceil(v) - 1 >= t, so one histogram pass replaces 256
    comparisons over the image.
    """
    v = np.asarray(response, np.float64)[np.asarray(select, bool)]
    v = v[v > 0.0]
    bins = np.ceil(v).astype(np.int64) - 1
    np.clip(bins, 0, 255, out=bins)
    hist = np.bincount(bins, minlength=256)
    return np.cumsum(hist[::-1])[::-1]


@dataclass(frozen=True)
class RocCurve:
    """Operating points (threshold, FPR, TPR), thresholds strictly increasing."""

    thresholds: tuple
    fpr: tuple
    tpr: tuple

    def __post_init__(self):
        t = tuple(float(x) for x in self.thresholds)
        f = tuple(float(x) for x in self.fpr)
        p = tuple(float(x) for x in self.tpr)
        if not (len(t) == len(f) == len(p)) or not t:
            raise ValueError("thresholds, fpr, tpr must be non-empty and equally long")
        if any(b <= a for a, b in zip(t, t[1:])):
            raise ValueError("thresholds must be strictly increasing")
        for name, series in (("fpr", f), ("tpr", p)):
            if any(b > a + 1e-12 for a, b in zip(series, series[1:])):
                raise ValueError(f"{name} must be non-increasing as the threshold rises")
        object.__setattr__(self, "thresholds", t)
        object.__setattr__(self, "fpr", f)
        object.__setattr__(self, "tpr", p)

    def rows(self):
        return list(zip(self.thresholds, self.fpr, self.tpr))


def roc(responses, gts, masks) -> RocCurve:
    """Macro-averaged ROC over the 256 integer thresholds.

    Per image and threshold, TPR and FPR come from strict thresholding of
    the response inside the mask; the curve averages the per-image rates at
    each threshold. Every image must contain both positive and negative
    ground-truth pixels inside its mask.
    """
    responses, gts, masks = list(responses), list(gts), list(masks)
    if not responses or not (len(responses) == len(gts) == len(masks)):
        raise ValueError("need equally many responses, ground truths, and masks (at least one)")
    tpr_sum = np.zeros(256)
    fpr_sum = np.zeros(256)
    for r, g, m in zip(responses, gts, masks):
        img = as_image(r)
        gt = as_mask(g, img.shape)
        mask = as_mask(m, img.shape)
        pos = gt & mask
        neg = ~gt & mask
        n_pos = int(np.count_nonzero(pos))
        n_neg = int(np.count_nonzero(neg))
        if n_pos == 0 or n_neg == 0:
            raise ValueError("each image needs positive and negative ground-truth pixels in its mask")
        tpr_sum += threshold_counts(img, pos) / n_pos
        fpr_sum += threshold_counts(img, neg) / n_neg
    n = len(responses)
    return RocCurve(THRESHOLDS, tuple(fpr_sum / n), tuple(tpr_sum / n))


def auc(curve: RocCurve) -> float:
    """Trapezoidal area under TPR over FPR, with the curve closed at (0,0) and (1,1).

    The operating points are walked from the strictest threshold to the
    loosest so FPR is non-decreasing along the path and runs of equal FPR
    exit at their highest TPR.
    """
    fpr = np.asarray(curve.fpr)
    tpr = np.asarray(curve.tpr)
    if fpr.size < 2:
        raise ValueError("need at least two operating points")
    x = np.concatenate(([0.0], fpr[::-1], [1.0]))
    y = np.concatenate(([0.0], tpr[::-1], [1.0]))
    return float(np.sum(np.diff(x) * (y[:-1] + y[1:]) * 0.5))


@dataclass(frozen=True)
class TTestResult:
    t: float
    df: int
    significant: bool


def paired_t_test(a, b) -> TTestResult:
    """Two-tailed paired t-test at p = 0.05 on the differences a - b.

    Uses the sample standard deviation (n-1 denominator). Zero-variance
    differences give t = 0 (not significant) when the mean difference is
    zero, and a signed-infinity t (significant) otherwise.
    """
    a = np.asarray(a, np.float64)
    b = np.asarray(b, np.float64)
    if a.ndim != 1 or a.shape != b.shape:
        raise ValueError("samples must be 1-D and equally long")
    n = a.size
    if n < 2:
        raise ValueError("need at least two paired values")
    d = a - b
    mean = float(d.mean())
    sd = float(d.std(ddof=1))
    df = n - 1
    if sd == 0.0:
        if mean == 0.0:
            return TTestResult(0.0, df, False)
        return TTestResult(math.copysign(math.inf, mean), df, True)
    t = mean / (sd / math.sqrt(n))
    critical = float(stats.t.ppf(0.975, df))
    return TTestResult(t, df, abs(t) > critical)


def format_roc_csv(curve: RocCurve) -> str:
    """Comma-separated dump: header `threshold,fpr,tpr`, 6-decimal fixed-point rows."""
    lines = ["threshold,fpr,tpr"]
    for t, f, p in curve.rows():
        lines.append(f"{t:.6f},{f:.6f},{p:.6f}")
    return "\n".join(lines) + "\n"
