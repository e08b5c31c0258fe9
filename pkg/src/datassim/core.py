"""Domain types shared across the package.

Grids are thin immutable wrappers over 2-D numpy arrays with NaN marking
missing or fill values. Everything downstream computes in float64.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

__all__ = [
    "Variant",
    "GridField2D",
    "SimilarityOptions",
    "SimilarityReport",
    "WindowCounts",
    "WindowStats",
    "ClassificationMatrix",
    "CodecResult",
    "make_grid",
    "check_grid",
    "check_pair",
]


class Variant(str, enum.Enum):
    PIXEL = "pixel"
    SF_DSSIM = "sf-dssim"
    DSSIM = "dssim"
    DSSIM_NOQUANT = "dssim-noquant"

    @classmethod
    def parse(cls, value) -> "Variant":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            names = ", ".join(v.value for v in cls)
            raise ValueError(f"unknown variant {value!r} (expected one of {names})") from None


_SUPPORTED_DTYPES = (np.dtype(np.float32), np.dtype(np.float64))


class GridField2D:
    """Rectangular grid of floats, NaN where data is missing.

    The stored dtype (float32 or float64) is kept so that files round-trip
    bit for bit; use :attr:`data` for a float64 view suitable for arithmetic.
    """

    __slots__ = ("_values",)

    def __init__(self, values):
        arr = np.array(values, copy=True)
        if arr.ndim != 2:
            raise ValueError(f"grid must be 2-D, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"grid dimensions must be positive, got {arr.shape}")
        if arr.dtype not in _SUPPORTED_DTYPES:
            if not np.issubdtype(arr.dtype, np.number):
                raise ValueError(f"grid values must be numeric, got dtype {arr.dtype}")
            arr = arr.astype(np.float64)
        if np.isinf(arr).any():
            raise ValueError("non-finite non-NaN value in grid")
        arr.flags.writeable = False
        self._values = arr

    @property
    def values(self) -> np.ndarray:
        """Read-only array in the stored dtype."""
        return self._values

    @property
    def data(self) -> np.ndarray:
        return self._values.astype(np.float64, copy=False)

    @property
    def rows(self) -> int:
        return self._values.shape[0]

    @property
    def cols(self) -> int:
        return self._values.shape[1]

    @property
    def shape(self) -> tuple:
        return self._values.shape

    @property
    def dtype(self) -> np.dtype:
        return self._values.dtype

    @property
    def nan_mask(self) -> np.ndarray:
        return np.isnan(self._values)

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._values.copy()
        return self._values.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, GridField2D):
            return NotImplemented
        return (
            self.dtype == other.dtype
            and self.shape == other.shape
            and self._values.tobytes() == other._values.tobytes()
        )

    def __hash__(self):
        return hash((self.shape, self.dtype.str, self._values.tobytes()))

    def __repr__(self):
        n_nan = int(self.nan_mask.sum())
        return f"GridField2D(rows={self.rows}, cols={self.cols}, dtype={self.dtype}, nan={n_nan})"


def make_grid(rows: int, cols: int, values, dtype=np.float64) -> GridField2D:
    """Build a grid from a flat row-major sequence."""
    if int(rows) != rows or int(cols) != cols or rows < 1 or cols < 1:
        raise ValueError(f"rows and cols must be positive integers, got {rows}x{cols}")
    flat = np.asarray(values, dtype=dtype).ravel()
    if flat.size != rows * cols:
        raise ValueError(f"length mismatch: expected {rows * cols} values, got {flat.size}")
    return GridField2D(flat.reshape(int(rows), int(cols)))


def check_grid(x, name: str = "x") -> GridField2D:
    """Coerce array-likes to :class:`GridField2D`, validating along the way."""
    if isinstance(x, GridField2D):
        return x
    try:
        return GridField2D(x)
    except ValueError as exc:
        raise ValueError(f"{name}: {exc}") from None


def check_pair(x, y, kernel_size: Optional[int] = None):
    x = check_grid(x, "x")
    y = check_grid(y, "y")
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    if kernel_size is not None and kernel_size > min(x.shape):
        raise ValueError(
            f"grid {x.shape} is smaller than the {kernel_size}x{kernel_size} kernel"
        )
    return x, y


_DSSIM_K = 1e-4
_IMAGE_K1, _IMAGE_K2 = 0.01, 0.03


@dataclass(frozen=True)
class SimilarityOptions:
    """Variant selector plus tunables.

    ``k1``/``k2`` left as ``None`` resolve to the variant default:
    1e-4 for the data variants (so C1 = C2 = 1e-8 on unit range) and
    0.01/0.03 for the pixel baseline and SF-DSSIM.
    """

    variant: Variant = Variant.DSSIM
    k1: Optional[float] = None
    k2: Optional[float] = None
    kernel_size: int = 11
    sigma: float = 1.5
    bins: int = 256
    allow_zero_constants: bool = False

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant.parse(self.variant))
        if int(self.kernel_size) != self.kernel_size or self.kernel_size < 3 or self.kernel_size % 2 == 0:
            raise ValueError(f"kernel_size must be an odd integer >= 3, got {self.kernel_size}")
        object.__setattr__(self, "kernel_size", int(self.kernel_size))
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if int(self.bins) != self.bins or self.bins < 2:
            raise ValueError(f"bins must be an integer >= 2, got {self.bins}")
        object.__setattr__(self, "bins", int(self.bins))
        for name in ("k1", "k2"):
            k = getattr(self, name)
            if k is None:
                continue
            if not np.isfinite(k) or k < 0:
                raise ValueError(f"{name} must be a non-negative finite number, got {k}")
            if k == 0 and not self.allow_zero_constants:
                raise ValueError(
                    f"{name}=0 gives undefined windows; pass allow_zero_constants=True to permit it"
                )

    @property
    def pad(self) -> int:
        return (self.kernel_size - 1) // 2

    @property
    def resolved_k1(self) -> float:
        if self.k1 is not None:
            return float(self.k1)
        return _IMAGE_K1 if self.variant in (Variant.PIXEL, Variant.SF_DSSIM) else _DSSIM_K

    @property
    def resolved_k2(self) -> float:
        if self.k2 is not None:
            return float(self.k2)
        return _IMAGE_K2 if self.variant in (Variant.PIXEL, Variant.SF_DSSIM) else _DSSIM_K

    def with_constants(self, k1, k2) -> "SimilarityOptions":
        return replace(self, k1=k1, k2=k2)

    def to_dict(self) -> dict:
        return {
            "variant": self.variant.value,
            "k1": self.resolved_k1,
            "k2": self.resolved_k2,
            "kernel_size": self.kernel_size,
            "sigma": float(self.sigma),
            "bins": self.bins,
        }


@dataclass(frozen=True)
class WindowCounts:
    total: int
    border_excluded: int
    missing_excluded: int


@dataclass(frozen=True)
class SimilarityReport:
    mean_value: float
    windows_total: int
    windows_border_excluded: int
    windows_missing_excluded: int
    data_min: float
    data_max: float
    options: SimilarityOptions
    degenerate: bool = False
    map: Optional[GridField2D] = None
    nominal_cr: Optional[float] = None


@dataclass(frozen=True)
class WindowStats:
    mu_x: float
    mu_y: float
    var_x: float
    var_y: float
    cov_xy: float


@dataclass(frozen=True)
class ClassificationMatrix:
    """2x2 agreement table; rows are the DSSIM decision, columns the reference."""

    pass_pass: int = 0
    pass_fail: int = 0
    fail_pass: int = 0
    fail_fail: int = 0

    @property
    def total(self) -> int:
        return self.pass_pass + self.pass_fail + self.fail_pass + self.fail_fail

    @property
    def inconsistent(self) -> int:
        return self.pass_fail + self.fail_pass

    def as_array(self) -> np.ndarray:
        return np.array([[self.pass_pass, self.pass_fail], [self.fail_pass, self.fail_fail]])


@dataclass(frozen=True)
class CodecResult:
    reconstructed: GridField2D
    precision_p: int
    nominal_cr: float
