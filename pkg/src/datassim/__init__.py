"""Structural similarity (SSIM, SF-DSSIM, DSSIM) for 2-D floating-point grids."""

from .calibrate import classification_matrix, find_threshold
from .core import (
    ClassificationMatrix,
    CodecResult,
    GridField2D,
    SimilarityOptions,
    SimilarityReport,
    Variant,
    WindowStats,
    make_grid,
)
from .estimator import DataSSIM, ThresholdCalibrator
from .kernel import gaussian_kernel, stat_fields, window_stats_brute
from .metrics import mean_similarity, similarity_map, ssim_pair
from .pipeline import normalize_joint, quantize, score, score_sweep_constants
from .testgen import base_field, perturb_case, precision_codec

__version__ = "0.1.0"

__all__ = [
    "ClassificationMatrix",
    "CodecResult",
    "DataSSIM",
    "GridField2D",
    "SimilarityOptions",
    "SimilarityReport",
    "ThresholdCalibrator",
    "Variant",
    "WindowStats",
    "base_field",
    "classification_matrix",
    "find_threshold",
    "gaussian_kernel",
    "make_grid",
    "mean_similarity",
    "normalize_joint",
    "perturb_case",
    "precision_codec",
    "quantize",
    "score",
    "score_sweep_constants",
    "similarity_map",
    "ssim_pair",
    "stat_fields",
    "window_stats_brute",
]
