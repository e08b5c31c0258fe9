"""The four scoring variants.

``score`` is the main entry point. Each variant differs only in how the two
grids are transformed before windowing and in how the stability constants
C1 = (k1 L)^2, C2 = (k2 L)^2 are scaled:

=============  ==========================================  ===========
variant        transform                                   L
=============  ==========================================  ===========
pixel          joint [0, 1] -> ``bins`` levels -> 0..bins-1  bins - 1
sf-dssim       none                                        joint range
dssim          joint [0, 1] -> ``bins`` levels on [0, 1]   1
dssim-noquant  joint [0, 1]                                1
=============  ==========================================  ===========
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from .core import GridField2D, SimilarityOptions, SimilarityReport, Variant, check_pair
from .kernel import _embed, gaussian_kernel
from .metrics import _map_interior, mean_similarity

__all__ = ["normalize_joint", "quantize", "score", "score_sweep_constants", "joint_range"]


def joint_range(x, y):
    x, y = check_pair(x, y)
    xd, yd = x.data, y.data
    finite = np.concatenate([xd[~np.isnan(xd)], yd[~np.isnan(yd)]])
    if finite.size == 0:
        raise ValueError("all-NaN inputs: no data to compare")
    return float(finite.min()), float(finite.max())


def _normalize(xd, yd, lo, hi):
    span = hi - lo
    if span == 0.0:
        return np.where(np.isnan(xd), np.nan, 0.0), np.where(np.isnan(yd), np.nan, 0.0)
    return (xd - lo) / span, (yd - lo) / span


def normalize_joint(x, y):
    """Map both grids onto [0, 1] with a shared min/max.

    Returns ``(xn, yn, lo, hi)``. When ``lo == hi`` every valid value maps
    to 0.
    """
    x, y = check_pair(x, y)
    lo, hi = joint_range(x, y)
    xn, yn = _normalize(x.data, y.data, lo, hi)
    return GridField2D(xn), GridField2D(yn), lo, hi


_QUANT_SLACK = 1e-12


def _quantize_levels(a: np.ndarray, bins: int) -> np.ndarray:
    """Integer level index (as float) in 0..bins-1, ties rounded away from zero."""
    valid = a[~np.isnan(a)]
    if valid.size and (valid.min() < -_QUANT_SLACK or valid.max() > 1.0 + _QUANT_SLACK):
        raise ValueError("quantize expects values in [0, 1]")
    scaled = np.clip(a, 0.0, 1.0) * (bins - 1)
    return np.floor(scaled + 0.5)


def quantize(xn, bins: int = 256) -> GridField2D:
    """Snap [0, 1] data onto ``bins`` evenly spaced levels, staying on [0, 1]."""
    if int(bins) != bins or bins < 2:
        raise ValueError(f"bins must be an integer >= 2, got {bins}")
    arr = np.asarray(xn, dtype=np.float64)
    return GridField2D(_quantize_levels(arr, int(bins)) / (int(bins) - 1))


def _prepare(xd, yd, opts: SimilarityOptions, lo: float, hi: float):
    """Transformed arrays plus the dynamic range L for this variant."""
    v = opts.variant
    if v is Variant.SF_DSSIM:
        return xd, yd, hi - lo
    xn, yn = _normalize(xd, yd, lo, hi)
    if v is Variant.DSSIM_NOQUANT:
        return xn, yn, 1.0
    qx = _quantize_levels(xn, opts.bins)
    qy = _quantize_levels(yn, opts.bins)
    if v is Variant.PIXEL:
        return qx, qy, float(opts.bins - 1)
    return qx / (opts.bins - 1), qy / (opts.bins - 1), 1.0


def score(x, y, opts: SimilarityOptions | None = None, *, with_map: bool = False) -> SimilarityReport:
    """Mean similarity of two grids under ``opts.variant``."""
    opts = opts or SimilarityOptions()
    x, y = check_pair(x, y, opts.kernel_size)
    lo, hi = joint_range(x, y)
    xt, yt, L = _prepare(x.data, y.data, opts, lo, hi)
    c1 = (opts.resolved_k1 * L) ** 2
    c2 = (opts.resolved_k2 * L) ** 2
    if (c1 == 0.0 or c2 == 0.0) and not opts.allow_zero_constants:
        # SF-DSSIM on a constant pair has L = 0
        raise ValueError(
            "stability constants evaluate to zero; pass allow_zero_constants=True to permit NaN results"
        )

    k = gaussian_kernel(opts.kernel_size, opts.sigma)
    interior, center = _map_interior(xt, yt, k, c1, c2)
    full = _embed(interior, x.shape, k.pad)
    valid = _embed(center.astype(np.float64), x.shape, k.pad) == 1.0
    mean, counts = mean_similarity(full, pad=k.pad, valid=valid)
    return SimilarityReport(
        mean_value=mean,
        windows_total=counts.total,
        windows_border_excluded=counts.border_excluded,
        windows_missing_excluded=counts.missing_excluded,
        data_min=lo,
        data_max=hi,
        options=opts,
        degenerate=(hi == lo),
        map=GridField2D(full) if with_map else None,
    )


def score_sweep_constants(x, y, variant=Variant.DSSIM, k_values=(1e-2, 1e-3, 1e-4, 1e-5, 1e-6), **kwargs):
    """Score with ``k1 = k2 = k`` for each ``k``; returns ``[(k, mean), ...]``."""
    base = SimilarityOptions(variant=variant, **kwargs)
    x, y = check_pair(x, y, base.kernel_size)
    return [(float(k), score(x, y, replace(base, k1=k, k2=k)).mean_value) for k in k_values]
