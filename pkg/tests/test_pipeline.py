import numpy as np
import pytest

from datassim.core import SimilarityOptions, Variant
from datassim.pipeline import normalize_joint, quantize, score, score_sweep_constants
from datassim.testgen import base_field, perturb_case, precision_codec

from conftest import random_pair

ALL = list(Variant)


def test_normalize_joint_example():
    xn, yn, lo, hi = normalize_joint([[1.0, 3.0]], [[2.0, 5.0]])
    assert xn.data.tolist() == [[0.0, 0.5]]
    assert yn.data.tolist() == [[0.25, 1.0]]
    assert (lo, hi) == (1.0, 5.0)


def test_normalize_constant_is_zero():
    xn, yn, lo, hi = normalize_joint(np.full((2, 2), 7.0), np.full((2, 2), 7.0))
    assert lo == hi
    assert (xn.data == 0).all() and (yn.data == 0).all()


def test_normalize_keeps_nan():
    x = np.array([[np.nan, 1.0], [2.0, 3.0]])
    xn, _, _, _ = normalize_joint(x, x)
    assert np.isnan(xn.data[0, 0]) and not np.isnan(xn.data[1, 1])


def test_normalize_all_nan():
    with pytest.raises(ValueError, match="all-NaN"):
        normalize_joint(np.full((2, 2), np.nan), np.full((2, 2), np.nan))


def test_quantize_endpoints_and_tie():
    q = quantize([[0.0, 1.0, 0.5]], 256).data[0]
    assert q[0] == 0.0 and q[1] == 1.0
    assert q[2] == 128 / 255
    assert q[2] == pytest.approx(0.501961, abs=1e-6)


def test_quantize_two_bins():
    assert quantize([[0.49, 0.51]], 2).data.tolist() == [[0.0, 1.0]]


def test_quantize_range_check():
    with pytest.raises(ValueError):
        quantize([[1.1]], 256)
    with pytest.raises(ValueError):
        quantize([[-0.01]], 256)
    quantize([[1.0 + 1e-13]], 256)


def test_quantize_nan_preserved():
    assert np.isnan(quantize([[np.nan, 0.2]], 16).data[0, 0])


@pytest.mark.parametrize("variant", ALL)
def test_identity_every_variant(variant):
    x, _ = random_pair(0, (20, 24), 0.05)
    assert score(x, x, SimilarityOptions(variant=variant)).mean_value == 1.0


@pytest.mark.parametrize("variant", ALL)
def test_identity_constant_field(variant):
    x = np.full((12, 12), 4.0)
    if variant is Variant.SF_DSSIM:
        # range zero makes both SF-DSSIM constants zero
        with pytest.raises(ValueError, match="zero"):
            score(x, x, SimilarityOptions(variant=variant))
        return
    rep = score(x, x, SimilarityOptions(variant=variant))
    assert rep.mean_value == 1.0 and rep.degenerate


def test_inverse_is_negative(ts_like):
    inv = perturb_case(ts_like, "inv")
    assert score(ts_like, inv).mean_value < 0


def test_mean_field_near_zero(ts_like):
    assert abs(score(ts_like, perturb_case(ts_like, "mean")).mean_value) < 0.01


def test_report_accounting():
    x, y = random_pair(5, (30, 40), 0.1)
    rep = score(x, y, with_map=True)
    assert rep.windows_total + rep.windows_missing_excluded == 20 * 30
    assert rep.windows_border_excluded == 30 * 40 - 20 * 30
    m = rep.map.data
    assert rep.mean_value == pytest.approx(np.nanmean(m), abs=1e-15)
    assert rep.data_min == pytest.approx(min(np.nanmin(x), np.nanmin(y)))


def test_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension mismatch"):
        score(np.zeros((12, 12)), np.zeros((12, 13)))


def test_zero_constants_give_nan_with_override():
    x = np.zeros((30, 30))
    x[:, 20:] = 1.0
    y = x.copy()
    y[29, 29] = 0.5
    # windows centred in the all-zero block are 0/0 in both factors
    opts = SimilarityOptions(k1=0.0, k2=0.0, allow_zero_constants=True, variant=Variant.DSSIM_NOQUANT)
    assert np.isnan(score(x, y, opts).mean_value)


def test_sf_dssim_not_shift_invariant():
    x, y = random_pair(9, (24, 24))
    sf = SimilarityOptions(variant=Variant.SF_DSSIM)
    a = score(x, y, sf).mean_value
    b = score(x + 5.0, y + 5.0, sf).mean_value
    assert a != b


def test_dssim_affine_invariance():
    x, y = random_pair(9, (24, 24))
    a = score(x, y).mean_value
    b = score(3.0 * x - 1.0, 3.0 * y - 1.0).mean_value
    assert a == pytest.approx(b, abs=1e-12)


def test_pixel_baseline_is_uint8_scale():
    x, y = random_pair(4, (20, 20))
    rep = score(x, y, SimilarityOptions(variant="pixel"))
    assert -1 <= rep.mean_value <= 1
    assert rep.options.resolved_k1 == 0.01


def test_dssim_one_when_quantized_equal():
    x, _ = random_pair(6, (16, 16))
    x[0, 0], x[0, 1] = 0.0, 1.0
    # shifts well inside a bin leave every quantized value unchanged
    y = x + 1e-6 * (0.5 - np.abs(x - 0.5))
    assert np.array_equal(quantize(x, 256).data, quantize(y, 256).data)
    assert score(x, y).mean_value == 1.0


def test_sweep_identity():
    x, _ = random_pair(1, (16, 16))
    assert all(v == 1.0 for _, v in score_sweep_constants(x, x, Variant.DSSIM, [1e-2, 1e-4, 1e-6]))


def test_sweep_plateau_and_ordering(ts_like):
    y = precision_codec(ts_like, 8).reconstructed
    ks = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6]
    vals = dict(score_sweep_constants(ts_like, y, Variant.DSSIM, ks))
    assert abs(vals[1e-4] - vals[1e-6]) < 1e-4
    seq = [vals[k] for k in ks]
    assert all(b <= a + 1e-9 for a, b in zip(seq, seq[1:]))
