"""Synthetic fields, perturbation cases and a fixed-precision stand-in codec.

Random streams
--------------
Every generator draws from ``numpy.random.PCG64`` seeded through
``SeedSequence([seed, stream])``, where ``stream`` is a fixed integer per
generator (see ``_STREAMS``). Distinct generators called with the same seed
therefore never share random numbers, and outputs are identical across
platforms for a given numpy major version.
"""

from __future__ import annotations

import enum

import numpy as np

from .core import CodecResult, GridField2D, check_grid

__all__ = ["Case", "base_field", "perturb_case", "precision_codec", "rng_for"]

_STREAMS = {"base": 1, "rand": 2, "pert": 3}

BASE_RANGE = 100.0
MIN_BASE_DIM = 32


def rng_for(seed: int, stream: str) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), _STREAMS[stream]])))


class Case(str, enum.Enum):
    INV = "inv"
    RAND = "rand"
    MEAN = "mean"
    MIN = "min"
    ZERO = "zero"
    PERT = "pert"

    @classmethod
    def parse(cls, value) -> "Case":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"invalid case {value!r}") from None


def base_field(rows: int, cols: int, seed: int) -> GridField2D:
    """Smooth seeded test field on roughly [0, 100].

    A sum of 3-5 plane waves with wavelengths of 10-48 cells plus a small
    uniform noise floor. The noise keeps every window from going flat at
    the crests and troughs of the waves.
    """
    if rows < MIN_BASE_DIM or cols < MIN_BASE_DIM:
        raise ValueError(f"base_field needs at least {MIN_BASE_DIM}x{MIN_BASE_DIM}, got {rows}x{cols}")
    rng = rng_for(seed, "base")
    n_modes = int(rng.integers(3, 6))
    r = np.arange(rows, dtype=np.float64)[:, None]
    c = np.arange(cols, dtype=np.float64)[None, :]
    field = np.zeros((rows, cols))
    for _ in range(n_modes):
        amp = rng.uniform(0.5, 1.0)
        wavelength = rng.uniform(10.0, 48.0)
        angle = rng.uniform(0.0, np.pi)
        phase = rng.uniform(0.0, 2.0 * np.pi)
        k = 2.0 * np.pi / wavelength
        field += amp * np.sin(k * (np.cos(angle) * c + np.sin(angle) * r) + phase)
    span = field.max() - field.min()
    field += rng.uniform(-0.1 * span, 0.1 * span, size=field.shape)
    field = (field - field.min()) / (field.max() - field.min()) * BASE_RANGE
    return GridField2D(field)


def perturb_case(x, case, seed: int = 0, pert_lo: float = 1.0e-7, pert_hi: float = 0.1) -> GridField2D:
    """Apply one of the INV/RAND/MEAN/MIN/ZERO/PERT modifications to ``x``.

    NaN positions in ``x`` stay NaN in the result.
    """
    x = check_grid(x)
    case = Case.parse(case)
    xd = x.data
    nan = np.isnan(xd)
    if nan.all():
        raise ValueError("cannot perturb an all-NaN grid")
    lo = float(np.nanmin(xd))
    hi = float(np.nanmax(xd))

    if case is Case.INV:
        out = hi - xd + lo
    elif case is Case.RAND:
        out = rng_for(seed, "rand").uniform(lo, hi, size=xd.shape)
    elif case is Case.MEAN:
        out = np.full(xd.shape, float(xd[~nan].mean()))
    elif case is Case.MIN:
        out = np.full(xd.shape, lo)
    elif case is Case.ZERO:
        out = np.zeros(xd.shape)
    else:
        if not (0 < pert_lo <= pert_hi) or not np.isfinite(pert_hi):
            raise ValueError(f"invalid perturbation bounds [{pert_lo}, {pert_hi}]")
        out = xd + rng_for(seed, "pert").uniform(pert_lo, pert_hi, size=xd.shape)
    out[nan] = np.nan
    return GridField2D(out)


def precision_codec(x, p: int) -> CodecResult:
    """Uniform ``p``-bit quantizer standing in for a fixed-precision compressor.

    Levels are ``lo + k * range * 2**-p`` for ``k = 0 .. 2**p``. Since the
    step halves exactly from ``p`` to ``p + 1``, every level at ``p`` is also
    a level at ``p + 1`` (bitwise: ``k * s`` and ``2k * (s/2)`` round the same
    exact product), so the per-point error never grows with ``p``. Values are
    snapped to the nearest level, ties upward, and returned as float64.

    ``nominal_cr = 32 / p`` is a bookkeeping figure, not a measured
    compression ratio.
    """
    if int(p) != p or not 1 <= p <= 32:
        raise ValueError(f"precision p must be an integer in [1, 32], got {p}")
    p = int(p)
    x = check_grid(x)
    xd = x.data
    nan = np.isnan(xd)
    if nan.all():
        raise ValueError("cannot encode an all-NaN grid")
    lo = float(np.nanmin(xd))
    hi = float(np.nanmax(xd))
    span = hi - lo
    if span == 0.0:
        raise ValueError("codec requires a non-degenerate data range")
    levels = float(2**p)
    step = span / levels
    k = np.floor((xd - lo) / span * levels + 0.5)
    out = np.clip(lo + k * step, lo, hi)
    out[nan] = np.nan
    return CodecResult(reconstructed=GridField2D(out), precision_p=p, nominal_cr=32.0 / p)
