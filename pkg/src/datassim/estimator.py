"""scikit-learn compatible wrappers.

:class:`DataSSIM` exposes the scoring variants with ``get_params`` /
``set_params`` so it can be cloned, grid-searched over constants, or dropped
into tooling that expects an estimator. :class:`ThresholdCalibrator` is a
proper fit/predict classifier: it learns a DSSIM pass threshold from
reference scores and then labels new DSSIM values pass/fail.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .calibrate import DEFAULT_T_REF, find_threshold
from .core import SimilarityOptions, check_pair
from .pipeline import score as _score

__all__ = ["DataSSIM", "ThresholdCalibrator"]


class DataSSIM(BaseEstimator):
    """Similarity scorer for pairs of 2-D grids.

    Parameters
    ----------
    variant : {"dssim", "dssim-noquant", "sf-dssim", "pixel"}
    k1, k2 : float or None
        Stability constants; ``None`` picks the variant default.
    kernel_size : int
        Odd Gaussian window width.
    sigma : float
        Gaussian standard deviation in grid cells.
    bins : int
        Quantization levels for the ``dssim`` and ``pixel`` variants.
    allow_zero_constants : bool
        Permit ``k1 = 0`` or ``k2 = 0`` (flat windows then score NaN).

    Examples
    --------
    >>> import numpy as np
    >>> x = np.add.outer(np.arange(16.0), np.arange(16.0) ** 1.5)
    >>> DataSSIM().score(x, x)
    1.0
    """

    def __init__(self, variant="dssim", k1=None, k2=None, kernel_size=11, sigma=1.5, bins=256,
                 allow_zero_constants=False):
        self.variant = variant
        self.k1 = k1
        self.k2 = k2
        self.kernel_size = kernel_size
        self.sigma = sigma
        self.bins = bins
        self.allow_zero_constants = allow_zero_constants

    def _options(self) -> SimilarityOptions:
        return SimilarityOptions(**self.get_params())

    def fit(self, X=None, y=None):
        """Validate parameters. There is nothing to learn; returns ``self``."""
        self.options_ = self._options()
        return self

    def report(self, X, Y, with_map=False):
        return _score(X, Y, self._options(), with_map=with_map)

    def score(self, X, Y):
        """Mean similarity of grid ``X`` against grid ``Y``."""
        return self.report(X, Y).mean_value

    def transform(self, X, Y):
        """Per-window similarity map as a float64 array (NaN where excluded)."""
        X, Y = check_pair(X, Y)
        return np.asarray(self.report(X, Y, with_map=True).map, dtype=np.float64)


class ThresholdCalibrator(ClassifierMixin, BaseEstimator):
    """Learn the DSSIM cutoff most consistent with a reference metric.

    ``fit(X, y)`` takes DSSIM scores ``X`` (shape ``(n,)`` or ``(n, 1)``)
    and reference scores ``y``; the reference label is ``y >= t_ref``.
    After fitting, ``threshold_`` holds the cutoff, ``matrix_`` the
    classification matrix there and ``sweep_`` the full inconsistency sweep.
    """

    def __init__(self, t_ref=DEFAULT_T_REF, pass_fail_weight=1.0):
        self.t_ref = t_ref
        self.pass_fail_weight = pass_fail_weight

    @staticmethod
    def _scores(X):
        X = check_array(X, ensure_2d=False, dtype=np.float64)
        if X.ndim == 2:
            if X.shape[1] != 1:
                raise ValueError(f"expected a single column of DSSIM scores, got shape {X.shape}")
            X = X[:, 0]
        return X

    def fit(self, X, y):
        d = self._scores(X)
        ref = check_array(y, ensure_2d=False, dtype=np.float64)
        if ref.shape != d.shape:
            raise ValueError(f"X and y lengths differ: {d.shape} vs {ref.shape}")
        result = find_threshold(np.column_stack([ref, d]), self.t_ref, self.pass_fail_weight)
        self.threshold_ = result.threshold
        self.matrix_ = result.matrix
        self.sweep_ = result.sweep
        self.classes_ = np.array([False, True])
        return self

    def decision_function(self, X):
        check_is_fitted(self, "threshold_")
        return self._scores(X) - self.threshold_

    def predict(self, X):
        return self.decision_function(X) >= 0

    def score(self, X, y, sample_weight=None):
        """Fraction of pairs where the DSSIM decision matches the reference."""
        ref = check_array(y, ensure_2d=False, dtype=np.float64)
        return super().score(X, ref >= self.t_ref, sample_weight=sample_weight)
