"""Pick a DSSIM pass threshold that agrees best with a reference metric.

Truth comes from a reference score (image SSIM in practice) compared against
``t_ref``; the candidate DSSIM threshold is judged by how many pairs it
classifies differently. Both comparisons are closed above: a score equal to
the threshold passes.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .core import ClassificationMatrix

__all__ = ["DEFAULT_T_REF", "ThresholdResult", "classification_matrix", "candidate_thresholds", "find_threshold"]

DEFAULT_T_REF = 0.99995


class ThresholdResult(NamedTuple):
    threshold: float
    matrix: ClassificationMatrix
    sweep: list


def _as_arrays(pairs):
    arr = np.asarray(pairs, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("empty pair list")
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"pairs must be (ref, dssim) rows, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError("pair scores must be finite")
    return arr[:, 0], arr[:, 1]


def classification_matrix(pairs, t_ref: float, t_dssim: float) -> ClassificationMatrix:
    ref, dssim = _as_arrays(pairs)
    truth = ref >= t_ref
    model = dssim >= t_dssim
    return ClassificationMatrix(
        pass_pass=int(np.sum(model & truth)),
        pass_fail=int(np.sum(model & ~truth)),
        fail_pass=int(np.sum(~model & truth)),
        fail_fail=int(np.sum(~model & ~truth)),
    )


def candidate_thresholds(dssim) -> np.ndarray:
    """Sorted thresholds that realise every distinct pass/fail split.

    Midpoints between consecutive distinct scores, plus 0 and 1. The lowest
    score is added when it is negative (so "pass everything" is reachable)
    and the float just above the highest score when that score is >= 1
    (so "fail everything" is reachable).
    """
    d = np.unique(np.asarray(dssim, dtype=np.float64))
    mids = (d[:-1] + d[1:]) / 2.0
    extra = [0.0, 1.0]
    if d[0] < 0.0:
        extra.append(d[0])
    if d[-1] >= 1.0:
        extra.append(np.nextafter(d[-1], np.inf))
    return np.unique(np.concatenate([mids, extra]))


def find_threshold(pairs, t_ref: float = DEFAULT_T_REF, pass_fail_weight: float = 1.0) -> ThresholdResult:
    """Threshold minimizing ``pass_fail_weight * pass_fail + fail_pass``.

    ``pass_fail`` counts pairs DSSIM passes but the reference fails; raise
    its weight above 1 to penalize optimistic passes more than false
    alarms. Ties go to the largest threshold. ``sweep`` lists
    ``(threshold, inconsistencies)`` for every candidate, where
    inconsistencies is the unweighted off-diagonal count.
    """
    ref, dssim = _as_arrays(pairs)
    if pass_fail_weight < 0:
        raise ValueError("pass_fail_weight must be non-negative")
    truth = ref >= t_ref
    cands = candidate_thresholds(dssim)

    order = np.argsort(dssim, kind="stable")
    d_sorted = dssim[order]
    t_sorted = truth[order]
    # pairs with dssim < t are the first `n_fail` sorted entries
    n_fail = np.searchsorted(d_sorted, cands, side="left")
    cum_true = np.concatenate([[0], np.cumsum(t_sorted)])
    n_true = int(t_sorted.sum())
    n = d_sorted.size
    fail_pass = cum_true[n_fail]
    fail_fail = n_fail - fail_pass
    pass_pass = n_true - fail_pass
    pass_fail = (n - n_fail) - pass_pass

    cost = pass_fail_weight * pass_fail + fail_pass
    best = np.flatnonzero(cost == cost.min())[-1]
    matrix = ClassificationMatrix(
        pass_pass=int(pass_pass[best]),
        pass_fail=int(pass_fail[best]),
        fail_pass=int(fail_pass[best]),
        fail_fail=int(fail_fail[best]),
    )
    sweep = [(float(t), int(pf + fp)) for t, pf, fp in zip(cands, pass_fail, fail_pass)]
    return ThresholdResult(float(cands[best]), matrix, sweep)
