"""Gaussian windows and NaN-aware windowed moments.

Missing samples are handled by renormalizing the kernel over the positions
where *both* inputs are valid. Because the mask is folded into the data
(``w * m * x`` summed, then divided by ``w * m`` summed) the Gaussian stays
separable even in windows that contain NaN, so the fast path is two 1-D
passes per moment with no special casing near gaps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import GridField2D, WindowStats, check_pair

__all__ = ["KernelWeights", "gaussian_kernel", "window_stats_brute", "stat_fields"]


@dataclass(frozen=True, eq=False)
class KernelWeights:
    size: int
    sigma: float
    weights: np.ndarray
    profile: np.ndarray

    @property
    def pad(self) -> int:
        return (self.size - 1) // 2


def gaussian_kernel(size: int, sigma: float) -> KernelWeights:
    """Normalized ``size`` x ``size`` Gaussian.

    ``profile`` is the matching normalized 1-D factor, whose outer product
    with itself equals ``weights`` up to rounding.
    """
    if int(size) != size or size < 1 or size % 2 == 0:
        raise ValueError(f"kernel size must be a positive odd integer, got {size}")
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    size = int(size)
    offsets = np.arange(size, dtype=np.float64) - (size - 1) / 2
    d2 = offsets[:, None] ** 2 + offsets[None, :] ** 2
    w = np.exp(-d2 / (2.0 * sigma * sigma))
    w /= w.sum()
    g = np.exp(-(offsets**2) / (2.0 * sigma * sigma))
    g /= g.sum()
    w.flags.writeable = False
    g.flags.writeable = False
    return KernelWeights(size=size, sigma=float(sigma), weights=w, profile=g)


def window_stats_brute(x, y, k: KernelWeights, i: int, j: int) -> WindowStats:
    """Moments of the single window centred at ``(i, j)``, computed directly.

    Two-pass (mean first, then centred sums), kept deliberately naive: it is
    the reference the vectorized path is checked against.
    """
    x, y = check_pair(x, y)
    pad = k.pad
    rows, cols = x.shape
    if not (pad <= i < rows - pad and pad <= j < cols - pad):
        raise ValueError(f"center ({i}, {j}) lies within {pad} of the grid edge")
    xa = x.data[i - pad : i + pad + 1, j - pad : j + pad + 1]
    ya = y.data[i - pad : i + pad + 1, j - pad : j + pad + 1]
    if np.isnan(xa[pad, pad]) or np.isnan(ya[pad, pad]):
        raise ValueError(f"center ({i}, {j}) is missing")

    valid = ~(np.isnan(xa) | np.isnan(ya))
    wsum = float(k.weights[valid].sum())
    if wsum == 0.0:
        raise ValueError(f"no valid samples around ({i}, {j})")
    w = k.weights[valid] / wsum
    xs = xa[valid]
    ys = ya[valid]
    mu_x = float(np.sum(w * xs))
    mu_y = float(np.sum(w * ys))
    dx = xs - mu_x
    dy = ys - mu_y
    var_x = max(float(np.sum(w * dx * dx)), 0.0)
    var_y = max(float(np.sum(w * dy * dy)), 0.0)
    cov = float(np.sum(w * dx * dy))
    return WindowStats(mu_x, mu_y, var_x, var_y, cov)


def _correlate_valid(a: np.ndarray, g: np.ndarray) -> np.ndarray:
    # separable 'valid' correlation, fixed tap order so results are reproducible
    n = g.size
    r = a.shape[0] - n + 1
    c = a.shape[1] - n + 1
    tmp = g[0] * a[0:r, :]
    for t in range(1, n):
        tmp = tmp + g[t] * a[t : t + r, :]
    out = g[0] * tmp[:, 0:c]
    for t in range(1, n):
        out = out + g[t] * tmp[:, t : t + c]
    return out


_SNAP = 8 * np.finfo(np.float64).eps


def _stat_arrays(xd: np.ndarray, yd: np.ndarray, k: KernelWeights):
    """Interior moment arrays (shape reduced by ``2 * pad``) plus the centre mask."""
    pad = k.pad
    valid = ~(np.isnan(xd) | np.isnan(yd))
    # shift by the global mean: moments are shift-covariant and the one-pass
    # variance formula loses digits when |mean| >> local spread
    cx = float(xd[valid].mean()) if valid.any() else 0.0
    cy = float(yd[valid].mean()) if valid.any() else 0.0
    xm = np.where(valid, xd - cx, 0.0)
    ym = np.where(valid, yd - cy, 0.0)
    g = k.profile

    wsum = _correlate_valid(valid.astype(np.float64), g)
    sx = _correlate_valid(xm, g)
    sy = _correlate_valid(ym, g)
    sxx = _correlate_valid(xm * xm, g)
    syy = _correlate_valid(ym * ym, g)
    sxy = _correlate_valid(xm * ym, g)

    center = valid[pad : xd.shape[0] - pad, pad : xd.shape[1] - pad]
    with np.errstate(invalid="ignore", divide="ignore"):
        inv = np.where(center, 1.0 / wsum, np.nan)
        mx = sx * inv
        my = sy * inv
        ex2 = sxx * inv
        ey2 = syy * inv
        vx = ex2 - mx * mx
        vy = ey2 - my * my
        # below this the one-pass difference is rounding noise; flat windows
        # must come out exactly 0 so zero constants give 0/0 there
        vx[vx <= _SNAP * ex2] = 0.0
        vy[vy <= _SNAP * ey2] = 0.0
        cxy = sxy * inv - mx * my
        bound = np.sqrt(vx * vy)
        cxy = np.clip(cxy, -bound, bound)
    vx[~center] = np.nan
    vy[~center] = np.nan
    return mx + cx, my + cy, vx, vy, cxy, center


def _embed(interior: np.ndarray, shape, pad: int) -> np.ndarray:
    full = np.full(shape, np.nan)
    full[pad : shape[0] - pad, pad : shape[1] - pad] = interior
    return full


def stat_fields(x, y, k: KernelWeights):
    """Weighted mean, variance and covariance at every interior centre.

    Returns five grids ``(mu_x, mu_y, var_x, var_y, cov_xy)`` the size of the
    inputs, NaN along the ``pad``-wide border and wherever either input is NaN
    at the centre.
    """
    x, y = check_pair(x, y, k.size)
    fields = _stat_arrays(x.data, y.data, k)[:5]
    return tuple(GridField2D(_embed(f, x.shape, k.pad)) for f in fields)
