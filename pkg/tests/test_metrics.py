"""Metric correctness against hand counts, loop oracles, and mpmath statistics."""

import math

import mpmath as mp
import numpy as np
import pytest

from bcosfire.metrics import (
    ConfusionMatrix,
    RocCurve,
    UndefinedMetricError,
    auc,
    basic_metrics,
    confusion,
    format_roc_csv,
    mcc,
    mcc_values,
    paired_t_test,
    roc,
    threshold_counts,
)

mp.mp.dps = 50


def t_cdf(t, df):
    """Student-t CDF through the regularized incomplete beta function."""
    t = mp.mpf(t)
    df = mp.mpf(df)
    x = df / (df + t * t)
    tail = mp.betainc(df / 2, mp.mpf(1) / 2, 0, x, regularized=True) / 2
    return 1 - tail if t >= 0 else tail


def t_statistic_oracle(a, b):
    """Paired t statistic recomputed in high precision."""
    d = [mp.mpf(float(x)) - mp.mpf(float(y)) for x, y in zip(a, b)]
    n = len(d)
    mean = mp.fsum(d) / n
    var = mp.fsum((x - mean) ** 2 for x in d) / (n - 1)
    if var == 0:
        return None, mean
    return mean / mp.sqrt(var / n), mean


class TestConfusion:
    def test_hand_counted_case(self):
        pred = np.array([[1, 1, 0], [1, 0, 0], [1, 1, 0]])
        gt = np.array([[1, 0, 1], [1, 0, 0], [1, 1, 1]])
        mask = np.ones((3, 3), dtype=bool)
        mask[0, 2] = False  # a disagreeing pixel that must not be counted
        cm = confusion(pred, gt, mask)
        assert (cm.tp, cm.fp, cm.fn, cm.tn) == (4, 1, 1, 2)
        assert cm.total == 8

    def test_mask_restricts_all_counts(self):
        pred = np.ones((4, 4), dtype=bool)
        gt = np.zeros((4, 4), dtype=bool)
        mask = np.zeros((4, 4), dtype=bool)
        mask[0, 0] = True
        cm = confusion(pred, gt, mask)
        assert (cm.tp, cm.fp, cm.fn, cm.tn) == (0, 1, 0, 0)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError):
            confusion(np.ones((2, 2), bool), np.ones((3, 3), bool), np.ones((2, 2), bool))

    def test_non_binary_rejected(self):
        with pytest.raises(ValueError):
            confusion(np.full((2, 2), 3), np.ones((2, 2), bool), np.ones((2, 2), bool))

    def test_counts_must_be_integers(self):
        with pytest.raises(ValueError):
            ConfusionMatrix(1.5, 0, 0, 0)
        with pytest.raises(ValueError):
            ConfusionMatrix(-1, 0, 0, 0)


class TestMcc:
    def test_known_value(self):
        # (3*4 - 1*2) / sqrt(4*5*5*6) = 10 / sqrt(600) = 1/sqrt(6)
        assert mcc(ConfusionMatrix(3, 1, 2, 4)) == pytest.approx(1.0 / math.sqrt(6.0), rel=1e-15)

    def test_perfect_and_inverted(self):
        assert mcc(ConfusionMatrix(5, 0, 0, 7)) == 1.0
        assert mcc(ConfusionMatrix(0, 5, 7, 0)) == -1.0

    def test_zero_marginals_give_zero(self):
        assert mcc(ConfusionMatrix(0, 0, 3, 4)) == 0.0  # nothing predicted positive
        assert mcc(ConfusionMatrix(0, 3, 0, 4)) == 0.0  # no positive ground truth
        assert mcc(ConfusionMatrix(3, 0, 4, 0)) == 0.0  # no negative ground truth
        assert mcc(ConfusionMatrix(3, 4, 0, 0)) == 0.0  # nothing predicted negative

    def test_vectorized_matches_scalar_bitwise(self):
        rng = np.random.default_rng(17)
        tp = rng.integers(0, 50, 200)
        fp = rng.integers(0, 50, 200)
        fn = rng.integers(0, 50, 200)
        tn = rng.integers(0, 50, 200)
        vec = mcc_values(tp, fp, fn, tn)
        for i in range(200):
            scalar = mcc(ConfusionMatrix(int(tp[i]), int(fp[i]), int(fn[i]), int(tn[i])))
            assert vec[i] == scalar


class TestBasicMetrics:
    def test_known_values(self):
        m = basic_metrics(ConfusionMatrix(3, 1, 2, 4))
        assert m["accuracy"] == 7 / 10
        assert m["sensitivity"] == 3 / 5
        assert m["specificity"] == 4 / 5

    def test_undefined_cases_raise(self):
        with pytest.raises(UndefinedMetricError, match="accuracy"):
            basic_metrics(ConfusionMatrix(0, 0, 0, 0))
        with pytest.raises(UndefinedMetricError, match="sensitivity"):
            basic_metrics(ConfusionMatrix(0, 1, 0, 1))
        with pytest.raises(UndefinedMetricError, match="specificity"):
            basic_metrics(ConfusionMatrix(1, 0, 1, 0))


class TestThresholdCounts:
    def test_matches_direct_comparison(self):
        rng = np.random.default_rng(19)
        response = rng.random((20, 20)) * 256.0
        # exercise exact integer levels, zeros, and the top of the range
        response[0, :5] = [0.0, 1.0, 128.0, 255.0, 255.7]
        select = rng.random((20, 20)) > 0.3
        counts = threshold_counts(response, select)
        for t in range(256):
            direct = int(np.count_nonzero((response > t) & select))
            assert counts[t] == direct

    def test_empty_selection(self):
        counts = threshold_counts(np.ones((4, 4)), np.zeros((4, 4), dtype=bool))
        assert np.array_equal(counts, np.zeros(256, dtype=int))


class TestRocCurve:
    def test_validations(self):
        RocCurve((0.0, 1.0), (1.0, 0.0), (1.0, 0.5))
        with pytest.raises(ValueError):
            RocCurve((1.0, 0.0), (1.0, 0.0), (1.0, 0.0))  # thresholds not increasing
        with pytest.raises(ValueError):
            RocCurve((0.0, 1.0), (0.0, 1.0), (1.0, 1.0))  # fpr increases
        with pytest.raises(ValueError):
            RocCurve((0.0,), (), (1.0,))

    def test_rows(self):
        curve = RocCurve((0.0, 1.0), (1.0, 0.0), (1.0, 0.5))
        assert curve.rows() == [(0.0, 1.0, 1.0), (1.0, 0.0, 0.5)]


class TestRoc:
    def test_perfect_separation_auc_one(self):
        resp = np.zeros((6, 6))
        gt = np.zeros((6, 6), dtype=bool)
        gt[:3] = True
        resp[gt] = 255.0
        mask = np.ones((6, 6), dtype=bool)
        curve = roc([resp], [gt], [mask])
        assert auc(curve) == 1.0

    def test_constant_response_auc_half(self):
        resp = np.full((6, 6), 128.0)
        gt = np.zeros((6, 6), dtype=bool)
        gt[:2] = True
        mask = np.ones((6, 6), dtype=bool)
        assert auc(roc([resp], [gt], [mask])) == pytest.approx(0.5, abs=1e-15)

    def test_monotone_transform_keeps_auc(self):
        rng = np.random.default_rng(23)
        levels = np.array([0.0, 64.0, 128.0, 192.0, 255.0])
        resp = levels[rng.integers(0, 5, (16, 16))]
        gt = rng.random((16, 16)) < 0.4
        gt[0, 0], gt[0, 1] = True, False  # guarantee both classes
        mask = np.ones((16, 16), dtype=bool)
        cubed = (resp / 255.0) ** 3 * 255.0
        a1 = auc(roc([resp], [gt], [mask]))
        a2 = auc(roc([cubed], [gt], [mask]))
        assert a1 == pytest.approx(a2, abs=1e-12)

    def test_macro_average_is_mean_of_per_image_rates(self):
        rng = np.random.default_rng(29)
        shape = (10, 10)
        resps = [rng.random(shape) * 255.0 for _ in range(2)]
        gts = [rng.random(shape) < 0.5 for _ in range(2)]
        masks = [np.ones(shape, dtype=bool)] * 2
        combined = roc(resps, gts, masks)
        singles = [roc([r], [g], [m]) for r, g, m in zip(resps, gts, masks)]
        for t in range(256):
            want_tpr = (singles[0].tpr[t] + singles[1].tpr[t]) / 2.0
            want_fpr = (singles[0].fpr[t] + singles[1].fpr[t]) / 2.0
            assert combined.tpr[t] == pytest.approx(want_tpr, abs=1e-15)
            assert combined.fpr[t] == pytest.approx(want_fpr, abs=1e-15)

    def test_sweep_is_monotone(self):
        rng = np.random.default_rng(31)
        resp = rng.random((12, 12)) * 255.0
        gt = rng.random((12, 12)) < 0.5
        gt[0, 0], gt[0, 1] = True, False
        curve = roc([resp], [gt], [np.ones((12, 12), dtype=bool)])
        assert all(a >= b for a, b in zip(curve.tpr, curve.tpr[1:]))
        assert all(a >= b for a, b in zip(curve.fpr, curve.fpr[1:]))

    def test_requires_both_classes(self):
        resp = np.ones((4, 4))
        with pytest.raises(ValueError):
            roc([resp], [np.ones((4, 4), bool)], [np.ones((4, 4), bool)])

    def test_auc_needs_two_points(self):
        with pytest.raises(ValueError):
            auc(RocCurve((0.0,), (0.5,), (0.5,)))


class TestPairedTTest:
    def test_matches_high_precision_oracle(self):
        rng = np.random.default_rng(37)
        for n in (5, 30):
            for _ in range(10):
                a = rng.normal(0.6, 0.1, n)
                b = a + rng.normal(0.02, 0.05, n)
                result = paired_t_test(a, b)
                t_ref, _ = t_statistic_oracle(a, b)
                assert abs(result.t - float(t_ref)) < 1e-6
                p_ref = 2 * (1 - t_cdf(abs(t_ref), n - 1))
                assert result.significant == (p_ref < mp.mpf("0.05"))
                assert result.df == n - 1

    def test_antisymmetry(self):
        rng = np.random.default_rng(41)
        a = rng.random(12)
        b = rng.random(12)
        assert paired_t_test(a, b).t == -paired_t_test(b, a).t

    def test_zero_variance_branches(self):
        same = np.array([0.4, 0.4, 0.4])
        r = paired_t_test(same, same)
        assert r.t == 0.0 and not r.significant
        up = paired_t_test(same + 0.1, same)
        assert r.df == 2
        assert up.t == math.inf and up.significant
        down = paired_t_test(same - 0.1, same)
        assert down.t == -math.inf and down.significant

    def test_critical_value_brackets(self):
        # t = s*sqrt(29) for 15 values at s+1 and 15 at s-1; the
        # significance boundary for df = 29 sits near 2.0452
        def sample(target_t):
            s = target_t / math.sqrt(29.0)
            return np.array([s + 1.0] * 15 + [s - 1.0] * 15)

        zeros = np.zeros(30)
        assert not paired_t_test(sample(2.0), zeros).significant
        assert paired_t_test(sample(2.09), zeros).significant

    def test_validation(self):
        with pytest.raises(ValueError):
            paired_t_test([1.0], [2.0])
        with pytest.raises(ValueError):
            paired_t_test([1.0, 2.0], [1.0, 2.0, 3.0])
        with pytest.raises(ValueError):
            paired_t_test(np.ones((2, 2)), np.ones((2, 2)))


def test_format_roc_csv():
    curve = RocCurve((0.0, 1.0, 2.0), (1.0, 0.25, 0.0), (1.0, 0.75, 0.0))
    text = format_roc_csv(curve)
    lines = text.splitlines()
    assert lines[0] == "threshold,fpr,tpr"
    assert lines[1] == "0.000000,1.000000,1.000000"
    assert lines[2] == "1.000000,0.250000,0.750000"
    assert len(lines) == 4 and text.endswith("\n")
