"""Per-window similarity and its mean over the grid."""

from __future__ import annotations

import numpy as np

from .core import GridField2D, SimilarityOptions, WindowCounts, WindowStats, check_pair
from .kernel import KernelWeights, _embed, _stat_arrays, gaussian_kernel

__all__ = ["ssim_pair", "ssim_from_moments", "similarity_map", "mean_similarity"]


def ssim_from_moments(mu_x, mu_y, var_x, var_y, cov_xy, c1: float, c2: float):
    """Simplified SSIM (unit exponents, C3 = C2/2), vectorized.

    With ``c1 = c2 = 0`` a flat window gives 0/0 and the result is NaN.
    """
    with np.errstate(invalid="ignore", divide="ignore"):
        s1 = (2.0 * mu_x * mu_y + c1) / (mu_x * mu_x + mu_y * mu_y + c1)
        s2 = (2.0 * cov_xy + c2) / (var_x + var_y + c2)
    return s1 * s2


def ssim_pair(s: WindowStats, c1: float, c2: float) -> float:
    if c1 < 0 or c2 < 0:
        raise ValueError("stability constants must be non-negative")
    return float(ssim_from_moments(
        np.float64(s.mu_x), np.float64(s.mu_y), np.float64(s.var_x),
        np.float64(s.var_y), np.float64(s.cov_xy), c1, c2,
    ))


def _map_interior(xd, yd, k: KernelWeights, c1: float, c2: float):
    mx, my, vx, vy, cxy, center = _stat_arrays(xd, yd, k)
    values = ssim_from_moments(mx, my, vx, vy, cxy, c1, c2)
    values[~center] = np.nan
    return values, center


def similarity_map(x, y, opts: SimilarityOptions, c1: float, c2: float) -> GridField2D:
    """Per-window similarity on already-transformed inputs.

    No normalization happens here; ``c1``/``c2`` are used as given. Border
    positions and missing centres are NaN.
    """
    x, y = check_pair(x, y, opts.kernel_size)
    k = gaussian_kernel(opts.kernel_size, opts.sigma)
    values, _ = _map_interior(x.data, y.data, k, c1, c2)
    return GridField2D(_embed(values, x.shape, k.pad))


def mean_similarity(sim_map, pad: int = 5, valid=None):
    """Mean of the per-window values, excluding border and missing centres.

    Parameters
    ----------
    sim_map : GridField2D or array
        Full-size map as returned by :func:`similarity_map`.
    pad : int
        Border width that was excluded (``(kernel_size - 1) // 2``).
    valid : array of bool, optional
        Full-size mask of centres that were scored. Defaults to the non-NaN
        entries; pass it explicitly so that NaN produced by zero constants
        propagates to the mean instead of being counted as missing.

    Returns
    -------
    mean : float
    counts : WindowCounts
    """
    arr = np.asarray(sim_map, dtype=np.float64)
    rows, cols = arr.shape
    inner_r, inner_c = rows - 2 * pad, cols - 2 * pad
    if inner_r < 1 or inner_c < 1:
        raise ValueError("no valid windows: grid is smaller than the kernel")
    interior = arr[pad : rows - pad, pad : cols - pad]
    if valid is None:
        mask = ~np.isnan(interior)
    else:
        mask = np.asarray(valid, dtype=bool)[pad : rows - pad, pad : cols - pad]
    n = int(mask.sum())
    if n == 0:
        raise ValueError("no valid windows")
    counts = WindowCounts(
        total=n,
        border_excluded=rows * cols - inner_r * inner_c,
        missing_excluded=inner_r * inner_c - n,
    )
    return float(interior[mask].mean()), counts
